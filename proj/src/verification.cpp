#include "racsep/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include "racsep/detail/kernels.hpp"
#include "racsep/linalg.hpp"
#include "racsep/random.hpp"

namespace racsep {

namespace {

BigInt pow_big(std::size_t base, std::size_t exp) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, exp);
  return out;
}

BigInt big(std::size_t v) { return BigInt(static_cast<unsigned long>(v)); }

void require_even(std::size_t T) {
  if (T == 0 || T % 2 != 0) throw ParameterError("T must be a positive even integer, got " + std::to_string(T));
}

void require_positive(std::size_t v, const char* name) {
  if (v == 0) throw ParameterError(std::string(name) + " must be at least 1");
}

void require_grid_budget(std::size_t M, std::size_t T, const Budgets& budgets) {
  const double required = std::pow(static_cast<double>(M), static_cast<double>(T));
  if (required > static_cast<double>(budgets.grid_entries))
    throw ResourceError("tensor with M^T = " + std::to_string(static_cast<unsigned long long>(required)) +
                            " entries exceeds budget " + std::to_string(budgets.grid_entries),
                        required);
}

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string fmt_state(const BucketState& p) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.size(); ++i) out += (i ? " " : "") + std::to_string(p[i]);
  return out + ")";
}

Verdict verdict(bool pass) { return pass ? Verdict::Pass : Verdict::Fail; }

ReportRow base_row(std::string check, std::size_t M, std::size_t R, std::size_t T, std::size_t L, Field field,
                   std::uint64_t seed) {
  ReportRow row;
  row.check = std::move(check);
  row.M = M;
  row.R = R;
  row.T = T;
  row.L = L;
  row.field = field;
  row.seed = seed;
  return row;
}

void add_summary(CheckSummary& s, std::size_t M, std::size_t R, std::size_t T, std::size_t L, Field field,
                 std::uint64_t seed, std::string expected) {
  auto row = base_row(s.check + "_summary", M, R, T, L, field, seed);
  row.observed = std::to_string(s.hits) + "/" + std::to_string(s.trials);
  row.expected = std::move(expected);
  row.verdict = verdict(s.ok);
  s.rows.push_back(std::move(row));
}

bool meets_threshold(std::size_t hits, std::size_t trials) {
  return trials == 0 || static_cast<double>(hits) >= kPrevalenceThreshold * static_cast<double>(trials);
}

DenseTensor grid_of(const RacParams& p, const Budgets& budgets, std::size_t T, Nonlinearity g = Nonlinearity::rac()) {
  const auto enc = TemplateEncoder::identity(p.input_dim(), p.field());
  return build_grid_tensor(p, g, enc, 0, T, budgets).tensor;
}

DenseTensor weights_of(const RacParams& p, std::size_t T) { return build_weights_tensor(p, 0, T).tensor; }

template <class F>
void for_each_sequence(std::size_t M, std::size_t T, F&& f) {
  std::vector<std::size_t> seq(T, 0);
  while (true) {
    f(seq);
    std::size_t i = T;
    while (i > 0 && seq[i - 1] + 1 == M) seq[--i] = 0;
    if (i == 0) return;
    ++seq[i - 1];
  }
}

DenseTensor witness_z(std::size_t rows, std::size_t M, const Rational& z, unsigned long omega) {
  std::vector<Rational> v(rows * M, Rational(0));
  for (std::size_t i = 0; i < rows && i < M; ++i) {
    for (std::size_t j = 0; j < M; ++j) v[i * M + j] = 1;
    BigInt e;
    mpz_ui_pow_ui(e.get_mpz_t(), omega, i + 1);
    if (!e.fits_ulong_p()) throw ParameterError("witness exponent overflows");
    v[i * M + i] = detail::power(z, static_cast<unsigned>(e.get_ui()));
  }
  return DenseTensor::matrix(rows, M, std::move(v));
}

}  // namespace

BigInt shallow_rank_law(std::size_t M, std::size_t R, std::size_t T) {
  const auto cap = pow_big(M, T / 2);
  return big(R) < cap ? big(R) : cap;
}

BigInt deep_rank_bound(std::size_t M, std::size_t R, std::size_t T) {
  return multiset_coefficient(std::min(M, R), T / 2);
}

BigInt conjecture_bound(std::size_t M, std::size_t R, std::size_t T, std::size_t L) {
  require_positive(L, "L");
  const auto inner = multiset_coefficient(T / 2, L - 1);
  const auto cap = pow_big(M, T / 2);
  const auto n = std::min(M, R);
  if (n == 1) return BigInt(1);
  // For n >= 2, multiset(n, k) >= k + 1.
  if (inner >= cap) return cap;
  const auto value = multiset_coefficient(n, inner.get_ui());
  return value < cap ? value : cap;
}

RankReport start_end_rank(const DenseTensor& t, double rel_tol) {
  return rank_of(matricize(t, IndexPartition::start_end(t.order())), rel_tol);
}

unsigned long default_omega(std::size_t T) {
  const auto half = static_cast<unsigned long>(T / 2);
  return half * half + 1;
}

WitnessAssignment make_witness(std::size_t M, std::size_t R, std::size_t T, const Rational& z, unsigned long omega) {
  return make_witness(M, R, T, z, omega, TemplateEncoder::identity(M, Field::Exact));
}

WitnessAssignment make_witness(std::size_t M, std::size_t R, std::size_t T, const Rational& z, unsigned long omega,
                               const TemplateEncoder& encoder) {
  require_positive(M, "M");
  require_positive(R, "R");
  require_even(T);
  if (sgn(z) == 0) throw ParameterError("witness requires z != 0");
  if (omega == 0) omega = default_omega(T);
  const auto half = static_cast<unsigned long>(T / 2);
  if (omega <= half * half) throw ParameterError("witness requires Omega > (T/2)^2");
  if (encoder.dim() != M || encoder.matrix().field() != Field::Exact)
    throw ParameterError("witness encoder must be an exact M x M encoder");

  auto zm = witness_z(R, M, z, omega);
  auto w_in1 = matmul(zm, inverse(transpose(encoder.matrix())));
  std::vector<Rational> w_in2(R * R, Rational(0));
  for (std::size_t j = 0; j < R; ++j) w_in2[j] = 1;
  std::vector<Rational> w_out(R, Rational(0));
  w_out[0] = 1;
  RacParams params({w_in1, DenseTensor::matrix(R, R, std::move(w_in2))},
                   {identity_matrix(R, Field::Exact), identity_matrix(R, Field::Exact)},
                   DenseTensor::matrix(1, R, std::move(w_out)), {ones(R, Field::Exact), ones(R, Field::Exact)});
  return {z, omega, M, R, T, std::move(zm), encoder, std::move(params)};
}

std::vector<BucketState> bucket_states(std::size_t colors, std::size_t balls) {
  std::vector<BucketState> out;
  if (colors == 0) {
    if (balls == 0) out.emplace_back();
    return out;
  }
  BucketState p(colors, 0);
  std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t r, std::size_t left) {
    if (r + 1 == colors) {
      p[r] = left;
      out.push_back(p);
      return;
    }
    for (std::size_t k = left + 1; k-- > 0;) {
      p[r] = k;
      fill(r + 1, left - k);
    }
  };
  fill(0, balls);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<BucketState>> bucket_trajectories(const BucketState& start) {
  std::vector<std::vector<BucketState>> out;
  std::vector<BucketState> path;
  std::function<void(BucketState)> walk = [&](BucketState cur) {
    const auto left = std::accumulate(cur.begin(), cur.end(), std::size_t{0});
    if (left <= 1) {
      out.push_back(path);
      return;
    }
    for (std::size_t r = 0; r < cur.size(); ++r) {
      if (cur[r] == 0) continue;
      --cur[r];
      path.push_back(cur);
      walk(cur);
      path.pop_back();
      ++cur[r];
    }
  };
  walk(start);
  return out;
}

BigInt bucket_reward(const std::vector<std::size_t>& d, const BucketState& start, unsigned long omega) {
  const auto total = std::accumulate(start.begin(), start.end(), std::size_t{0});
  if (d.size() != total) throw InvalidInputError("color sequence length must equal the number of balls");
  for (auto c : d)
    if (c >= start.size()) throw InvalidInputError("color out of range");
  std::vector<BigInt> weight(start.size());
  for (std::size_t r = 0; r < start.size(); ++r) mpz_ui_pow_ui(weight[r].get_mpz_t(), omega, r + 1);
  std::function<BigInt(BucketState&, std::size_t)> best = [&](BucketState& cur, std::size_t j) -> BigInt {
    if (j == d.size()) return 0;
    const BigInt gain = weight[d[j]] * big(cur[d[j]]);
    BigInt top = -1;
    for (std::size_t r = 0; r < cur.size(); ++r) {
      if (cur[r] == 0) continue;
      --cur[r];
      const BigInt v = best(cur, j + 1);
      ++cur[r];
      if (v > top) top = v;
    }
    return gain + top;
  };
  BucketState cur = start;
  return best(cur, 0);
}

DecompositionResult decomposition_identity(const DenseTensor& z_matrix, std::size_t T) {
  require_even(T);
  const auto& z = z_matrix.values<Rational>();
  const auto rb = z_matrix.rows(), M = z_matrix.cols();
  const auto half = T / 2;
  const auto states = bucket_states(rb, half);
  std::vector<std::vector<std::vector<BucketState>>> trajs;
  for (const auto& p : states) trajs.push_back(bucket_trajectories(p));

  DecompositionResult res;
  for_each_sequence(M, T, [&](const std::vector<std::size_t>& d) {
    Rational lhs = 1;
    for (std::size_t t = half + 1; t <= T; ++t) {
      Rational sum = 0;
      for (std::size_t r = 0; r < rb; ++r) {
        Rational prod = 1;
        for (std::size_t j = 0; j < t; ++j) prod *= z[r * M + d[j]];
        sum += prod;
      }
      lhs *= sum;
    }
    Rational rhs = 0;
    for (std::size_t s = 0; s < states.size(); ++s) {
      const auto& p = states[s];
      Rational start_part = 1;
      for (std::size_t r = 0; r < rb; ++r)
        for (std::size_t j = 0; j < half; ++j) start_part *= detail::power(z[r * M + d[j]], static_cast<unsigned>(p[r]));
      for (const auto& traj : trajs[s]) {
        Rational term = start_part;
        for (std::size_t i = 0; i < half; ++i) {
          const auto& q = i == 0 ? p : traj[i - 1];
          for (std::size_t r = 0; r < rb; ++r)
            term *= detail::power(z[r * M + d[half + i]], static_cast<unsigned>(q[r]));
        }
        if (sgn(term) != 0) ++res.nonzero_terms;
        rhs += term;
      }
    }
    ++res.entries;
    if (lhs != rhs) ++res.mismatches;
  });
  return res;
}

bool rearrangement_strict(const std::vector<std::vector<long>>& vectors) {
  const auto n = vectors.size();
  auto dot = [&](std::size_t a, std::size_t b) {
    long s = 0;
    for (std::size_t k = 0; k < vectors[a].size(); ++k) s += vectors[a][k] * vectors[b][k];
    return s;
  };
  long norms = 0;
  for (std::size_t i = 0; i < n; ++i) norms += dot(i, i);
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  while (std::next_permutation(sigma.begin(), sigma.end())) {
    long s = 0;
    for (std::size_t i = 0; i < n; ++i) s += dot(i, sigma[i]);
    if (s >= norms) return false;
  }
  return true;
}

CheckSummary verify_shallow_rank_law(std::size_t M, std::size_t R, std::size_t T, std::size_t trials, Field field,
                                     const RunOptions& opts) {
  require_positive(M, "M");
  require_positive(R, "R");
  require_even(T);
  require_grid_budget(M, T, opts.budgets);
  CheckSummary s{"shallow", true, trials, 0, {}};
  const auto expected = shallow_rank_law(M, R, T);
  bool exceeded = false;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto seed = trial_seed(opts.seed, i);
    Rng rng(seed);
    const auto p = random_rac_params(1, R, M, 1, field, rng);
    const auto rank = big(start_end_rank(weights_of(p, T), opts.rel_tol).rank);
    if (rank == expected) ++s.hits;
    if (rank > expected) exceeded = true;
    auto row = base_row("shallow", M, R, T, 1, field, seed);
    row.observed = rank.get_str();
    row.expected = expected.get_str();
    row.verdict = verdict(rank == expected);
    s.rows.push_back(std::move(row));
  }
  s.ok = meets_threshold(s.hits, trials) && !exceeded;
  add_summary(s, M, R, T, 1, field, opts.seed, ">=95% equal, none above");
  return s;
}

CheckSummary verify_deep_lower_bound(std::size_t M, std::size_t R, std::size_t T, std::size_t trials,
                                     const RunOptions& opts) {
  require_positive(M, "M");
  require_positive(R, "R");
  require_even(T);
  require_grid_budget(M, T, opts.budgets);
  CheckSummary s{"deep", true, trials, 0, {}};
  const auto bound = deep_rank_bound(M, R, T);

  const auto w = make_witness(M, R, T);
  const auto witness_rank = big(start_end_rank(grid_of(w.params, opts.budgets, T)).rank);
  auto wrow = base_row("deep_witness", M, R, T, 2, Field::Exact, 0);
  wrow.observed = witness_rank.get_str();
  wrow.expected = bound.get_str();
  wrow.verdict = verdict(witness_rank == bound);
  s.rows.push_back(std::move(wrow));

  for (std::size_t i = 0; i < trials; ++i) {
    const auto seed = trial_seed(opts.seed, i);
    Rng rng(seed);
    const auto p = random_rac_params(2, R, M, 1, Field::Float64, rng);
    const auto rank = big(start_end_rank(grid_of(p, opts.budgets, T), opts.rel_tol).rank);
    if (rank >= bound) ++s.hits;
    auto row = base_row("deep", M, R, T, 2, Field::Float64, seed);
    row.observed = rank.get_str();
    row.expected = ">=" + bound.get_str();
    row.verdict = verdict(rank >= bound);
    s.rows.push_back(std::move(row));
  }
  s.ok = witness_rank == bound && meets_threshold(s.hits, trials);
  add_summary(s, M, R, T, 2, Field::Float64, opts.seed, "witness equal, >=95% at or above bound");
  return s;
}

CheckSummary check_claim1_equality(std::size_t M, std::size_t R, std::size_t T, std::size_t trials,
                                   const RunOptions& opts) {
  require_positive(M, "M");
  require_positive(R, "R");
  require_even(T);
  require_grid_budget(M, T, opts.budgets);
  CheckSummary s{"claim1", true, trials, 0, {}};
  for (std::size_t i = 0; i < trials; ++i) {
    const auto seed = trial_seed(opts.seed, i);
    Rng rng(seed);
    const auto p = random_rac_params(1, R, M, 1, Field::Exact, rng);
    const auto grid_rank = start_end_rank(grid_of(p, opts.budgets, T)).rank;
    const auto tensor_rank = start_end_rank(weights_of(p, T)).rank;
    if (grid_rank == tensor_rank) ++s.hits;
    auto row = base_row("claim1", M, R, T, 1, Field::Exact, seed);
    row.observed = std::to_string(grid_rank);
    row.expected = std::to_string(tensor_rank);
    row.verdict = verdict(grid_rank == tensor_rank);
    s.rows.push_back(std::move(row));
  }
  s.ok = s.hits == trials;
  add_summary(s, M, R, T, 1, Field::Exact, opts.seed, "all equal");
  return s;
}

CheckSummary verify_min_cut_certificate(std::size_t M, std::size_t R, std::size_t T, std::size_t trials,
                                        const RunOptions& opts) {
  require_positive(M, "M");
  require_positive(R, "R");
  require_even(T);
  require_grid_budget(M, T, opts.budgets);
  CheckSummary s{"mincut", true, trials, 0, {}};
  const auto law = shallow_rank_law(M, R, T);
  bool structural = true;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto seed = trial_seed(opts.seed, i);
    Rng rng(seed);
    const auto p = random_rac_params(1, R, M, 1, Field::Exact, rng);
    const auto cut = min_cut(build_mps(p, T)).value;
    const auto rank = big(start_end_rank(weights_of(p, T)).rank);
    if (cut != law) structural = false;
    if (cut == rank) ++s.hits;
    auto row = base_row("mincut", M, R, T, 1, Field::Exact, seed);
    row.observed = cut.get_str();
    row.expected = rank.get_str();
    row.verdict = verdict(cut == rank);
    s.rows.push_back(std::move(row));
  }
  auto srow = base_row("mincut_structural", M, R, T, 1, Field::Exact, opts.seed);
  srow.observed = structural ? law.get_str() : "differs";
  srow.expected = law.get_str();
  srow.verdict = verdict(structural);
  s.rows.push_back(std::move(srow));
  s.ok = structural && meets_threshold(s.hits, trials);
  add_summary(s, M, R, T, 1, Field::Exact, opts.seed, "structural equal, >=95% equal to rank");
  return s;
}

CheckSummary check_mps_equivalence(std::size_t M, std::size_t R, std::size_t T, std::size_t trials,
                                   const RunOptions& opts) {
  require_positive(M, "M");
  require_positive(R, "R");
  require_positive(T, "T");
  require_grid_budget(M, T, opts.budgets);
  CheckSummary s{"mps_equivalence", true, trials, 0, {}};
  for (std::size_t i = 0; i < trials; ++i) {
    const auto seed = trial_seed(opts.seed, i);
    Rng rng(seed);
    const auto p = random_rac_params(1, R, M, 1, Field::Exact, rng);
    const bool same = contract(build_mps(p, T), opts.budgets) == weights_of(p, T);
    if (same) ++s.hits;
    auto row = base_row("mps_equivalence", M, R, T, 1, Field::Exact, seed);
    row.observed = same ? "equal" : "differs";
    row.expected = "equal";
    row.verdict = verdict(same);
    s.rows.push_back(std::move(row));
  }
  s.ok = s.hits == trials;
  add_summary(s, M, R, T, 1, Field::Exact, opts.seed, "all equal");
  return s;
}

CheckSummary check_deep_tn_equivalence(std::size_t M, std::size_t R, std::size_t T, std::size_t L,
                                       std::size_t trials, Field field, const RunOptions& opts) {
  require_positive(M, "M");
  require_positive(R, "R");
  require_positive(T, "T");
  require_positive(L, "L");
  require_grid_budget(M, T, opts.budgets);
  CheckSummary s{"deep_tn_equivalence", true, trials, 0, {}};
  for (std::size_t i = 0; i < trials; ++i) {
    const auto seed = trial_seed(opts.seed, i);
    Rng rng(seed);
    const auto p = random_rac_params(L, R, M, 1, field, rng);
    const auto g = build_deep_tn(p, T, opts.budgets);
    const auto enc = TemplateEncoder::identity(M, field);
    bool exact_match = true;
    double worst = 0.0;
    for_each_sequence(M, T, [&](const std::vector<std::size_t>& symbols) {
      const InputSequence seq{symbols};
      const auto tn = contract(attach_inputs(g, enc, seq), opts.budgets);
      const auto fwd = forward_deep(p, Nonlinearity::rac(), enc, seq);
      if (field == Field::Exact) {
        exact_match = exact_match && tn == fwd;
        return;
      }
      const auto& a = tn.values<double>();
      const auto& b = fwd.values<double>();
      for (std::size_t k = 0; k < b.size(); ++k) {
        const double diff = std::abs(a[k] - b[k]);
        const double err = b[k] != 0.0 ? diff / std::abs(b[k]) : diff;
        worst = std::max(worst, err);
      }
    });
    const bool pass = field == Field::Exact ? exact_match : worst <= kEquivalenceRelTol;
    if (pass) ++s.hits;
    auto row = base_row("deep_tn_equivalence", M, R, T, L, field, seed);
    if (field == Field::Exact) {
      row.observed = exact_match ? "equal" : "differs";
      row.expected = "equal";
    } else {
      row.observed = fmt_double(worst);
      row.expected = "<=" + fmt_double(kEquivalenceRelTol);
    }
    row.verdict = verdict(pass);
    s.rows.push_back(std::move(row));
  }
  s.ok = s.hits == trials;
  add_summary(s, M, R, T, L, field, opts.seed, "all within tolerance");
  return s;
}

CheckSummary check_basic_units(std::size_t L, std::size_t T) {
  const auto c = count_basic_units(L, T);
  CheckSummary s{"counting", c.match, 1, c.match ? 1u : 0u, {}};
  auto row = base_row("counting", 0, 0, T, L, Field::Exact, 0);
  row.observed = c.enumerated.get_str();
  row.expected = c.closed_form.get_str();
  row.verdict = verdict(c.match);
  s.rows.push_back(std::move(row));
  return s;
}

CheckSummary check_decomposition_identity(std::size_t M, std::size_t Rbar, std::size_t T, const RunOptions& opts) {
  require_positive(M, "M");
  require_positive(Rbar, "Rbar");
  require_even(T);
  require_grid_budget(M, T, opts.budgets);
  CheckSummary s{"decomposition", true, 2, 0, {}};
  auto run = [&](const DenseTensor& z, std::string label, std::uint64_t seed) {
    const auto res = decomposition_identity(z, T);
    if (res.mismatches == 0) ++s.hits;
    auto row = base_row("decomposition_" + label, M, Rbar, T, 2, Field::Exact, seed);
    row.observed = std::to_string(res.entries - res.mismatches) + "/" + std::to_string(res.entries);
    row.expected = std::to_string(res.entries) + "/" + std::to_string(res.entries);
    row.verdict = verdict(res.mismatches == 0);
    s.rows.push_back(std::move(row));
  };
  run(witness_z(Rbar, M, 2, default_omega(T)), "witness", 0);
  const auto seed = trial_seed(opts.seed, 0);
  Rng rng(seed);
  run(random_matrix(Rbar, M, Field::Exact, rng), "random", seed);
  s.ok = s.hits == s.trials;
  return s;
}

CheckSummary check_rearrangement_lemma(std::size_t N, std::size_t Rbar, std::size_t trials, const RunOptions& opts) {
  require_positive(N, "N");
  require_positive(Rbar, "Rbar");
  if (N > 8) throw ParameterError("rearrangement check enumerates N! permutations; N must be at most 8");
  const long top = 9;
  double distinct_sets = 1.0;
  for (std::size_t k = 0; k < Rbar; ++k) distinct_sets *= static_cast<double>(top + 1);
  if (distinct_sets < static_cast<double>(N)) throw ParameterError("not enough distinct vectors for N");
  CheckSummary s{"rearrangement", true, trials, 0, {}};
  for (std::size_t i = 0; i < trials; ++i) {
    const auto seed = trial_seed(opts.seed, i);
    Rng rng(seed);
    std::vector<std::vector<long>> vs;
    do {
      vs.assign(N, std::vector<long>(Rbar));
      for (auto& v : vs)
        for (auto& x : v) x = rng.uniform_int(0, top);
      auto sorted = vs;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) break;
    } while (true);
    const bool strict = rearrangement_strict(vs);
    if (strict) ++s.hits;
    auto row = base_row("rearrangement", N, Rbar, 0, 0, Field::Exact, seed);
    row.observed = strict ? "strict" : "violated";
    row.expected = "strict";
    row.verdict = verdict(strict);
    s.rows.push_back(std::move(row));
  }
  s.ok = s.hits == trials;
  return s;
}

CheckSummary check_bucket_lemma(std::size_t Rbar, std::size_t T, unsigned long omega) {
  require_positive(Rbar, "Rbar");
  require_even(T);
  if (omega == 0) omega = default_omega(T);
  const auto half = T / 2;
  const auto states = bucket_states(Rbar, half);
  CheckSummary s{"bucket", true, 0, 0, {}};
  // Non-decreasing color sequences correspond one-to-one to bucket states.
  for (const auto& hat : states) {
    std::vector<std::size_t> d;
    for (std::size_t r = 0; r < Rbar; ++r) d.insert(d.end(), hat[r], r);
    const auto target = bucket_reward(d, hat, omega);
    bool unique = true;
    BucketState arg = hat;
    BigInt best = target;
    for (const auto& p : states) {
      if (p == hat) continue;
      const auto v = bucket_reward(d, p, omega);
      if (v >= target) unique = false;
      if (v > best) {
        best = v;
        arg = p;
      }
    }
    ++s.trials;
    if (unique) ++s.hits;
    auto row = base_row("bucket", 0, Rbar, T, 0, Field::Exact, omega);
    row.observed = fmt_state(arg) + " reward " + best.get_str();
    row.expected = fmt_state(hat) + " strict";
    row.verdict = verdict(unique);
    s.rows.push_back(std::move(row));
  }
  s.ok = s.hits == s.trials;
  return s;
}

CheckSummary check_hadamard_rank_bound(std::size_t trials, const RunOptions& opts) {
  CheckSummary s{"hadamard", true, trials, 0, {}};
  for (std::size_t i = 0; i < trials; ++i) {
    const auto seed = trial_seed(opts.seed, i);
    Rng rng(seed);
    const auto rows = static_cast<std::size_t>(rng.uniform_int(2, 6));
    const auto cols = static_cast<std::size_t>(rng.uniform_int(2, 6));
    const auto k = static_cast<std::size_t>(rng.uniform_int(1, static_cast<long>(std::min(rows, cols))));
    const auto power = static_cast<unsigned>(rng.uniform_int(1, 4));
    const auto u = random_matrix(rows, k, Field::Exact, rng);
    const auto v = random_matrix(k, cols, Field::Exact, rng);
    const auto m = matmul(u, v);
    const auto base_rank = rank_exact(m).rank;
    const auto had_rank = rank_exact(hadamard_power(m, power)).rank;
    const auto bound = multiset_coefficient(base_rank, power);
    const bool pass = big(had_rank) <= bound;
    if (pass) ++s.hits;
    auto row = base_row("hadamard", rows, base_rank, power, 0, Field::Exact, seed);
    row.observed = std::to_string(had_rank);
    row.expected = "<=" + bound.get_str();
    row.verdict = verdict(pass);
    s.rows.push_back(std::move(row));
  }
  s.ok = s.hits == trials;
  return s;
}

CheckSummary check_no_clone(std::size_t P) {
  const auto r = no_clone_counterexample(P);
  // The all-ones vector is a fixed point of cloning only when P = 1.
  const bool expect_ones = P == 1;
  const bool pass = r.clones_basis && r.clones_ones == expect_ones;
  CheckSummary s{"noclone", pass, 1, pass ? 1u : 0u, {}};
  auto row = base_row("noclone", P, 0, 0, 0, Field::Exact, 0);
  row.observed = std::string("basis ") + (r.clones_basis ? "cloned" : "not cloned") + ", ones " +
                 (r.clones_ones ? "cloned" : "not cloned");
  row.expected = std::string("basis cloned, ones ") + (expect_ones ? "cloned" : "not cloned");
  row.verdict = verdict(pass);
  s.rows.push_back(std::move(row));
  return s;
}

std::string_view to_string(RankFamily f) noexcept {
  switch (f) {
    case RankFamily::Shallow: return "shallow";
    case RankFamily::Deep: return "deep";
    case RankFamily::Constant: return "constant";
  }
  return "shallow";
}

RankFamily parse_rank_family(std::string_view text) {
  if (text == "shallow") return RankFamily::Shallow;
  if (text == "deep") return RankFamily::Deep;
  if (text == "constant") return RankFamily::Constant;
  throw InvalidInputError("unknown family '" + std::string(text) + "' (expected shallow|deep|constant)");
}

CheckSummary check_polynomial_rank_prevalence(RankFamily family, std::size_t M, std::size_t R, std::size_t T,
                                              std::size_t trials, const RunOptions& opts) {
  require_positive(M, "M");
  require_positive(R, "R");
  require_even(T);
  require_grid_budget(M, T, opts.budgets);
  const std::string name = "prevalence_" + std::string(to_string(family));
  const auto field = family == RankFamily::Deep ? Field::Float64 : Field::Exact;
  const std::size_t depth = family == RankFamily::Deep ? 2 : 1;
  CheckSummary s{name, true, trials, 0, {}};
  std::vector<std::size_t> ranks;
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto seed = trial_seed(opts.seed, i);
    Rng rng(seed);
    auto p = random_rac_params(depth, R, M, 1, field, rng);
    std::size_t rank = 0;
    switch (family) {
      case RankFamily::Shallow: rank = start_end_rank(weights_of(p, T)).rank; break;
      case RankFamily::Deep: rank = start_end_rank(grid_of(p, opts.budgets, T), opts.rel_tol).rank; break;
      case RankFamily::Constant: {
        const RacParams q({DenseTensor::zeros({R, M}, field)}, {p.w_hidden(0)}, p.w_out(), {p.h0(0)});
        rank = start_end_rank(grid_of(q, opts.budgets, T, Nonlinearity::rnn(Nonlinearity::Activation::Identity)))
                   .rank;
        break;
      }
    }
    ranks.push_back(rank);
    seeds.push_back(seed);
  }
  const auto top = ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
  for (std::size_t i = 0; i < trials; ++i) {
    if (ranks[i] == top) ++s.hits;
    auto row = base_row(name, M, R, T, depth, field, seeds[i]);
    row.observed = std::to_string(ranks[i]);
    row.expected = std::to_string(top);
    row.verdict = verdict(ranks[i] == top);
    s.rows.push_back(std::move(row));
  }
  s.ok = meets_threshold(s.hits, trials);
  add_summary(s, M, R, T, depth, field, opts.seed, ">=95% at max rank " + std::to_string(top));
  return s;
}

CheckSummary check_conjecture_bound(std::size_t M, std::size_t R, std::size_t T, std::size_t L, std::size_t trials,
                                    Field field, const RunOptions& opts) {
  require_positive(M, "M");
  require_positive(R, "R");
  require_positive(L, "L");
  require_even(T);
  require_grid_budget(M, T, opts.budgets);
  if (L > opts.budgets.deep_tn_max_depth)
    throw ResourceError("conjecture check depth exceeds cap " + std::to_string(opts.budgets.deep_tn_max_depth),
                        static_cast<double>(L));
  const auto bound = conjecture_bound(M, R, T, L);
  const auto cap = pow_big(M, T / 2);
  CheckSummary s{"conjecture", true, trials, 0, {}};
  for (std::size_t i = 0; i < trials; ++i) {
    const auto seed = trial_seed(opts.seed, i);
    Rng rng(seed);
    const auto p = random_rac_params(L, R, M, 1, field, rng);
    const auto rank = big(start_end_rank(grid_of(p, opts.budgets, T), opts.rel_tol).rank);
    if (rank >= bound) ++s.hits;
    if (rank > cap) s.ok = false;
    auto row = base_row("conjecture", M, R, T, L, field, seed);
    row.observed = rank.get_str();
    row.expected = bound.get_str();
    row.verdict = Verdict::Reported;
    s.rows.push_back(std::move(row));
  }
  auto row = base_row("conjecture_summary", M, R, T, L, field, opts.seed);
  row.observed = std::to_string(s.hits) + "/" + std::to_string(s.trials) + " at or above bound";
  row.expected = "rank <= " + cap.get_str();
  row.verdict = s.ok ? Verdict::Reported : Verdict::Fail;
  s.rows.push_back(std::move(row));
  return s;
}

std::vector<std::string> scan_columns() { return {"min_cut", "basic_units", "basic_units_closed"}; }

ReportRow scan_cell(std::size_t M, std::size_t R, std::size_t T, std::size_t L, Field field, std::uint64_t cell_seed,
                    const RunOptions& opts) {
  require_positive(M, "M");
  require_positive(R, "R");
  require_positive(L, "L");
  require_even(T);
  require_grid_budget(M, T, opts.budgets);
  Rng rng(cell_seed);
  const auto p = random_rac_params(L, R, M, 1, field, rng);
  auto row = base_row("scan", M, R, T, L, field, cell_seed);
  const auto units = count_basic_units(L, T);
  std::string cut;
  if (L == 1) {
    const auto rank = big(start_end_rank(weights_of(p, T), opts.rel_tol).rank);
    const auto law = shallow_rank_law(M, R, T);
    row.observed = rank.get_str();
    row.expected = law.get_str();
    row.verdict = verdict(rank == law);
    cut = min_cut(build_mps(p, T)).value.get_str();
  } else {
    const auto rank = big(start_end_rank(grid_of(p, opts.budgets, T), opts.rel_tol).rank);
    if (L == 2) {
      const auto bound = deep_rank_bound(M, R, T);
      row.observed = rank.get_str();
      row.expected = ">=" + bound.get_str();
      row.verdict = verdict(rank >= bound);
    } else {
      row.observed = rank.get_str();
      row.expected = conjecture_bound(M, R, T, L).get_str();
      row.verdict = Verdict::Reported;
    }
  }
  row.extra = {cut, units.enumerated.get_str(), units.closed_form.get_str()};
  return row;
}

}  // namespace racsep
