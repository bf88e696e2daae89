#include "racsep/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "racsep/builders.hpp"
#include "racsep/random.hpp"
#include "racsep/report.hpp"
#include "racsep/serialization.hpp"
#include "racsep/tensor_network.hpp"
#include "racsep/verification.hpp"

namespace racsep {

namespace {

std::size_t parse_uint(std::string_view part, const std::string& whole) {
  std::size_t v = 0;
  const auto* first = part.data();
  const auto* last = part.data() + part.size();
  auto [end, ec] = std::from_chars(first, last, v);
  if (part.empty() || ec != std::errc() || end != last)
    throw InvalidInputError("malformed range '" + whole + "'");
  return v;
}

struct Config {
  std::string check, kind;
  std::string M = "2", R = "2", T = "4", L, N = "3", Rbar = "2", P = "2";
  std::optional<std::size_t> trials;
  std::string field;
  std::uint64_t seed = 0;
  double rel_tol = kDefaultRelTol;
  std::string out, params, graph, tensor, family = "shallow";
  std::size_t class_index = 0;
  unsigned long omega = 0;
  bool witness = false;
  Budgets budgets{};
};

std::size_t single(const std::string& text, const char* name) {
  const auto v = parse_range(text);
  if (v.size() != 1) throw InvalidInputError(std::string("--") + name + " takes a single value here");
  return v.front();
}

void require_even_all(const std::vector<std::size_t>& ts) {
  for (auto t : ts)
    if (t == 0 || t % 2 != 0) throw InvalidInputError("T must be a positive even integer, got " + std::to_string(t));
}

Field field_or(const Config& c, Field fallback) { return c.field.empty() ? fallback : parse_field(c.field); }

RunOptions options(const Config& c) { return {c.seed, c.rel_tol, c.budgets}; }

void emit(const Config& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
  } else {
    save_text(c.out, text);
  }
}

struct Outcome {
  Report report;
  bool ok = true;
};

void absorb(Outcome& o, const CheckSummary& s, std::ostream& err) {
  o.report.add_all(s.rows);
  o.ok = o.ok && s.ok;
  err << s.check << ": " << s.hits << "/" << s.trials << (s.ok ? " ok" : " FAILED") << '\n';
}

Outcome run_verify(const Config& c, std::ostream& err) {
  Outcome o;
  const auto opts = options(c);
  const auto& check = c.check;
  auto ms = [&] { return parse_range(c.M); };
  auto rs = [&] { return parse_range(c.R); };
  auto ts_even = [&] {
    auto ts = parse_range(c.T);
    require_even_all(ts);
    return ts;
  };
  auto trials = [&](std::size_t fallback) { return c.trials.value_or(fallback); };

  if (check == "shallow" || check == "deep" || check == "claim1" || check == "mincut") {
    const auto M = ms(), R = rs(), T = ts_even();
    for (auto m : M)
      for (auto r : R)
        for (auto t : T) {
          if (check == "shallow")
            absorb(o, verify_shallow_rank_law(m, r, t, trials(50), field_or(c, Field::Exact), opts), err);
          else if (check == "deep")
            absorb(o, verify_deep_lower_bound(m, r, t, trials(30), opts), err);
          else if (check == "claim1")
            absorb(o, check_claim1_equality(m, r, t, trials(20), opts), err);
          else
            absorb(o, verify_min_cut_certificate(m, r, t, trials(30), opts), err);
        }
  } else if (check == "equivalence") {
    const auto M = ms(), R = rs(), T = parse_range(c.T), L = parse_range(c.L.empty() ? "1:2" : c.L);
    for (auto m : M)
      for (auto r : R)
        for (auto t : T)
          for (auto l : L) {
            if (l == 1) absorb(o, check_mps_equivalence(m, r, t, trials(20), opts), err);
            absorb(o, check_deep_tn_equivalence(m, r, t, l, trials(20), field_or(c, Field::Exact), opts), err);
          }
  } else if (check == "counting") {
    const auto T = ts_even(), L = parse_range(c.L.empty() ? "1:4" : c.L);
    for (auto l : L)
      for (auto t : T) absorb(o, check_basic_units(l, t), err);
  } else if (check == "decomposition") {
    const auto M = ms(), Rb = parse_range(c.Rbar), T = ts_even();
    for (auto m : M)
      for (auto rb : Rb)
        for (auto t : T) absorb(o, check_decomposition_identity(m, rb, t, opts), err);
  } else if (check == "rearrangement") {
    const auto N = parse_range(c.N), Rb = parse_range(c.Rbar);
    for (auto n : N)
      for (auto rb : Rb) absorb(o, check_rearrangement_lemma(n, rb, trials(100), opts), err);
  } else if (check == "bucket") {
    const auto Rb = parse_range(c.Rbar), T = ts_even();
    for (auto rb : Rb)
      for (auto t : T) absorb(o, check_bucket_lemma(rb, t, c.omega), err);
  } else if (check == "hadamard") {
    absorb(o, check_hadamard_rank_bound(trials(50), opts), err);
  } else if (check == "noclone") {
    for (auto p : parse_range(c.P)) absorb(o, check_no_clone(p), err);
  } else if (check == "prevalence") {
    const auto family = parse_rank_family(c.family);
    const auto M = ms(), R = rs(), T = ts_even();
    for (auto m : M)
      for (auto r : R)
        for (auto t : T) absorb(o, check_polynomial_rank_prevalence(family, m, r, t, trials(50), opts), err);
  } else if (check == "conjecture") {
    const auto M = ms(), R = rs(), T = ts_even(), L = parse_range(c.L.empty() ? "2" : c.L);
    for (auto m : M)
      for (auto r : R)
        for (auto t : T)
          for (auto l : L)
            absorb(o, check_conjecture_bound(m, r, t, l, trials(10), field_or(c, Field::Float64), opts), err);
  } else {
    throw InvalidInputError("unknown check '" + check + "'");
  }
  return o;
}

Outcome run_scan(const Config& c) {
  Outcome o{Report(scan_columns()), true};
  const auto M = parse_range(c.M), R = parse_range(c.R), T = parse_range(c.T),
             L = parse_range(c.L.empty() ? "1:2" : c.L);
  require_even_all(T);
  const auto field = field_or(c, Field::Exact);
  const auto opts = options(c);
  std::uint64_t cell = 0;
  for (auto m : M)
    for (auto r : R)
      for (auto t : T)
        for (auto l : L) {
          auto row = scan_cell(m, r, t, l, field, trial_seed(c.seed, cell++), opts);
          if (row.verdict == Verdict::Fail) o.ok = false;
          o.report.add(std::move(row));
        }
  return o;
}

RacParams export_params(const Config& c, std::size_t fallback_depth) {
  if (!c.params.empty()) {
    std::istringstream in(load_text(c.params));
    return read_params(in);
  }
  const auto m = single(c.M, "M"), r = single(c.R, "R");
  if (c.witness) return make_witness(m, r, single(c.T, "T"), 2, c.omega).params;
  const auto l = c.L.empty() ? fallback_depth : single(c.L, "L");
  Rng rng(trial_seed(c.seed, 0));
  return random_rac_params(l, r, m, 1, field_or(c, Field::Exact), rng);
}

std::string run_export(const Config& c) {
  std::ostringstream os;
  const auto& kind = c.kind;
  if (kind == "params") {
    write_params(os, export_params(c, 1));
  } else if (kind == "weights") {
    write_tensor(os, build_weights_tensor(export_params(c, 1), c.class_index, single(c.T, "T")).tensor);
  } else if (kind == "grid") {
    const auto p = export_params(c, 1);
    const auto enc = TemplateEncoder::identity(p.input_dim(), p.field());
    write_tensor(os, build_grid_tensor(p, Nonlinearity::rac(), enc, c.class_index, single(c.T, "T"), c.budgets).tensor);
  } else if (kind == "mps") {
    write_graph(os, build_mps(export_params(c, 1), single(c.T, "T"), c.class_index));
  } else if (kind == "deep-tn") {
    write_graph(os, build_deep_tn(export_params(c, 2), single(c.T, "T"), c.budgets));
  } else {
    throw InvalidInputError("unknown export kind '" + kind + "'");
  }
  return os.str();
}

std::string run_contract(const Config& c) {
  if (c.graph.empty()) throw InvalidInputError("contract needs --graph");
  std::istringstream in(load_text(c.graph));
  std::ostringstream os;
  write_tensor(os, contract(read_graph(in), c.budgets));
  return os.str();
}

std::string run_rank(const Config& c) {
  if (c.tensor.empty()) throw InvalidInputError("rank needs --tensor");
  std::istringstream in(load_text(c.tensor));
  const auto t = read_tensor(in);
  const auto r = t.order() == 2 ? rank_of(t, c.rel_tol) : start_end_rank(t, c.rel_tol);
  std::ostringstream os;
  os << "rank " << r.rank << " method " << (r.method == RankMethod::Exact ? "exact" : "svd") << '\n';
  return os.str();
}

void add_common(CLI::App& app, Config& c) {
  app.add_option("--M", c.M, "input dims, e.g. 2 or 2,3 or 1:4");
  app.add_option("--R", c.R, "hidden channels");
  app.add_option("--T", c.T, "sequence lengths");
  app.add_option("--L", c.L, "depths");
  app.add_option("--N", c.N, "vector counts (rearrangement)");
  app.add_option("--Rbar", c.Rbar, "colors / rows of Z");
  app.add_option("--P", c.P, "delta dims (noclone)");
  app.add_option("--trials", c.trials, "random draws per cell");
  app.add_option("--field", c.field, "exact|float");
  app.add_option("--seed", c.seed, "run seed");
  app.add_option("--rel-tol", c.rel_tol, "relative SVD rank tolerance")->check(CLI::PositiveNumber);
  app.add_option("--out", c.out, "output file (default stdout)");
  app.add_option("--params", c.params, "parameter file to export from");
  app.add_option("--graph", c.graph, "tensor network file (contract)");
  app.add_option("--tensor", c.tensor, "tensor file (rank)");
  app.add_option("--family", c.family, "shallow|deep|constant (prevalence)");
  app.add_option("--class", c.class_index, "class index");
  app.add_option("--omega", c.omega, "witness Omega (0 = (T/2)^2+1)");
  app.add_flag("--witness", c.witness, "export the deep witness parameters");
  app.add_option("--grid-budget", c.budgets.grid_entries, "max grid tensor entries")
      ->envname("RACSEP_GRID_BUDGET")
      ->check(CLI::PositiveNumber);
  app.add_option("--contract-budget", c.budgets.contraction_entries, "max intermediate entries")
      ->envname("RACSEP_CONTRACT_BUDGET")
      ->check(CLI::PositiveNumber);
  app.add_option("--deep-max-L", c.budgets.deep_tn_max_depth, "deep network depth cap")
      ->envname("RACSEP_DEEP_TN_MAX_L")
      ->check(CLI::PositiveNumber);
  app.add_option("--deep-max-T", c.budgets.deep_tn_max_steps, "deep network length cap")
      ->envname("RACSEP_DEEP_TN_MAX_T")
      ->check(CLI::PositiveNumber);
}

}  // namespace

std::vector<std::size_t> parse_range(const std::string& text) {
  std::vector<std::size_t> out;
  std::string_view rest = text;
  if (rest.empty()) throw InvalidInputError("empty range");
  while (true) {
    const auto comma = rest.find(',');
    const auto part = rest.substr(0, comma);
    const auto colon = part.find(':');
    if (colon == std::string_view::npos) {
      out.push_back(parse_uint(part, text));
    } else {
      const auto lo = parse_uint(part.substr(0, colon), text), hi = parse_uint(part.substr(colon + 1), text);
      if (lo > hi) throw InvalidInputError("empty range '" + text + "'");
      for (auto v = lo; v <= hi; ++v) out.push_back(v);
    }
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Separation-rank experiments for recurrent arithmetic circuits", "racsep"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with the same keys as the flags");
  add_common(app, c);

  auto* verify = app.add_subcommand("verify", "run a check, CSV report");
  verify->add_option("check", c.check,
                     "shallow|deep|claim1|mincut|equivalence|counting|rearrangement|bucket|decomposition|hadamard|"
                     "noclone|prevalence|conjecture")
      ->required();
  auto* scan = app.add_subcommand("scan", "sweep M, R, T, L, one CSV row per cell");
  auto* exp = app.add_subcommand("export", "write weights|grid|mps|deep-tn|params");
  exp->add_option("kind", c.kind, "weights|grid|mps|deep-tn|params")->required();
  auto* con = app.add_subcommand("contract", "contract a tensor network file");
  auto* rank = app.add_subcommand("rank", "Start-End rank of a tensor file");
  for (auto* sub : {verify, scan, exp, con, rank}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (verify->parsed() || scan->parsed()) {
      auto outcome = verify->parsed() ? run_verify(c, err) : run_scan(c);
      std::ostringstream csv;
      outcome.report.write_csv(csv);
      emit(c, csv.str(), out);
      return outcome.ok ? kExitPass : kExitCheckFailed;
    }
    if (exp->parsed()) emit(c, run_export(c), out);
    if (con->parsed()) emit(c, run_contract(c), out);
    if (rank->parsed()) emit(c, run_rank(c), out);
    return kExitPass;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << '\n';
    return kExitResource;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace racsep
