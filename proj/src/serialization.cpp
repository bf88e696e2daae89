#include "racsep/serialization.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace racsep {

namespace {

constexpr std::string_view kParamsMagic = "racsep-params";
constexpr std::string_view kTensorMagic = "racsep-tensor";
constexpr std::string_view kGraphMagic = "racsep-graph";
constexpr int kVersion = 1;

std::string next_token(std::istream& is, std::string_view what) {
  std::string tok;
  if (!(is >> tok)) throw InvalidInputError("unexpected end of input while reading " + std::string(what));
  return tok;
}

void expect(std::istream& is, std::string_view keyword) {
  const auto tok = next_token(is, keyword);
  if (tok != keyword) throw InvalidInputError("expected '" + std::string(keyword) + "', found '" + tok + "'");
}

std::size_t read_size(std::istream& is, std::string_view what) {
  const auto tok = next_token(is, what);
  std::size_t v = 0;
  auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || end != tok.data() + tok.size())
    throw InvalidInputError("malformed " + std::string(what) + " '" + tok + "'");
  return v;
}

void read_header(std::istream& is, std::string_view magic) {
  expect(is, magic);
  if (read_size(is, "format version") != kVersion) throw InvalidInputError("unsupported format version");
}

double parse_double(const std::string& tok) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || end != tok.data() + tok.size()) throw InvalidInputError("malformed number '" + tok + "'");
  return v;
}

void write_dims(std::ostream& os, const DenseTensor::Dims& dims) {
  os << dims.size();
  for (auto d : dims) os << ' ' << d;
}

DenseTensor::Dims read_dims(std::istream& is) {
  const auto order = read_size(is, "order");
  if (order == 0) throw InvalidInputError("tensor order must be positive");
  DenseTensor::Dims dims(order);
  for (auto& d : dims) d = read_size(is, "dimension");
  return dims;
}

std::size_t product(const DenseTensor::Dims& dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

// Entries separated by `sep`; the field is known from an enclosing header.
void write_entries(std::ostream& os, const DenseTensor& t, char sep) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) os << sep;
    os << format_scalar(t.flat(i));
  }
  os << '\n';
}

DenseTensor read_entries(std::istream& is, DenseTensor::Dims dims, Field field) {
  const auto n = product(dims);
  if (field == Field::Exact) {
    std::vector<Rational> v(n);
    for (auto& x : v) x = parse_rational(next_token(is, "entry"));
    return DenseTensor(std::move(dims), std::move(v));
  }
  std::vector<double> v(n);
  for (auto& x : v) x = parse_double(next_token(is, "entry"));
  return DenseTensor(std::move(dims), std::move(v));
}

void write_block(std::ostream& os, std::string_view name, std::size_t layer, const DenseTensor& t) {
  os << name << ' ' << layer << ' ';
  write_dims(os, t.dims());
  os << '\n';
  write_entries(os, t, ' ');
}

DenseTensor read_block(std::istream& is, std::string_view name, std::size_t layer, Field field) {
  expect(is, name);
  if (read_size(is, "layer") != layer) throw InvalidInputError("layers out of order in " + std::string(name));
  return read_entries(is, read_dims(is), field);
}

}  // namespace

void write_params(std::ostream& os, const RacParams& p) {
  os << kParamsMagic << ' ' << kVersion << '\n';
  os << "field " << to_string(p.field()) << '\n';
  os << "L " << p.depth() << " R " << p.hidden() << " M " << p.input_dim() << " C " << p.classes() << '\n';
  for (std::size_t l = 0; l < p.depth(); ++l) write_block(os, "w_in", l, p.w_in(l));
  for (std::size_t l = 0; l < p.depth(); ++l) write_block(os, "w_hidden", l, p.w_hidden(l));
  write_block(os, "w_out", 0, p.w_out());
  for (std::size_t l = 0; l < p.depth(); ++l) write_block(os, "h0", l, p.h0(l));
}

RacParams read_params(std::istream& is) {
  read_header(is, kParamsMagic);
  expect(is, "field");
  const auto field = parse_field(next_token(is, "field"));
  expect(is, "L");
  const auto depth = read_size(is, "L");
  expect(is, "R");
  const auto r = read_size(is, "R");
  expect(is, "M");
  const auto m = read_size(is, "M");
  expect(is, "C");
  const auto c = read_size(is, "C");
  if (depth == 0) throw InvalidInputError("depth must be positive");
  std::vector<DenseTensor> w_in, w_hidden, h0;
  for (std::size_t l = 0; l < depth; ++l) w_in.push_back(read_block(is, "w_in", l, field));
  for (std::size_t l = 0; l < depth; ++l) w_hidden.push_back(read_block(is, "w_hidden", l, field));
  auto w_out = read_block(is, "w_out", 0, field);
  for (std::size_t l = 0; l < depth; ++l) h0.push_back(read_block(is, "h0", l, field));
  RacParams p(std::move(w_in), std::move(w_hidden), std::move(w_out), std::move(h0));
  if (p.hidden() != r || p.input_dim() != m || p.classes() != c)
    throw InvalidInputError("parameter header does not match matrix shapes");
  return p;
}

void write_tensor(std::ostream& os, const DenseTensor& t) {
  os << kTensorMagic << ' ' << kVersion << '\n';
  os << "field " << to_string(t.field()) << '\n';
  os << "dims ";
  write_dims(os, t.dims());
  os << '\n';
  write_entries(os, t, '\n');
}

DenseTensor read_tensor(std::istream& is) {
  read_header(is, kTensorMagic);
  expect(is, "field");
  const auto field = parse_field(next_token(is, "field"));
  expect(is, "dims");
  return read_entries(is, read_dims(is), field);
}

void write_graph(std::ostream& os, const TnGraph& g) {
  if (g.empty()) throw InvalidInputError("refusing to export an empty tensor network");
  os << kGraphMagic << ' ' << kVersion << '\n';
  os << "field " << to_string(g.nodes().front().tensor.field()) << '\n';
  os << "nodes " << g.nodes().size() << '\n';
  for (const auto& n : g.nodes()) {
    if (n.label.empty() || n.label.find_first_of(" \t\r\n") != std::string::npos)
      throw InvalidInputError("node label '" + n.label + "' is empty or contains whitespace");
    os << "node " << n.label << ' ';
    write_dims(os, n.tensor.dims());
    os << '\n';
    write_entries(os, n.tensor, ' ');
  }
  os << "edges " << g.edges().size() << '\n';
  for (const auto& e : g.edges())
    os << "edge " << e.node_a << ' ' << e.leg_a << ' ' << e.node_b << ' ' << e.leg_b << ' ' << e.bond_dim << '\n';
  os << "open " << g.open_legs().size() << '\n';
  for (const auto& o : g.open_legs())
    os << "leg " << o.node << ' ' << o.leg << ' ' << o.dim << ' ' << o.time_index << ' ' << to_string(o.side) << '\n';
}

TnGraph read_graph(std::istream& is) {
  read_header(is, kGraphMagic);
  expect(is, "field");
  const auto field = parse_field(next_token(is, "field"));
  TnGraph g;
  expect(is, "nodes");
  const auto n = read_size(is, "node count");
  for (std::size_t i = 0; i < n; ++i) {
    expect(is, "node");
    auto label = next_token(is, "label");
    g.add_node(std::move(label), read_entries(is, read_dims(is), field));
  }
  expect(is, "edges");
  const auto e = read_size(is, "edge count");
  for (std::size_t i = 0; i < e; ++i) {
    expect(is, "edge");
    const auto a = read_size(is, "node"), la = read_size(is, "leg");
    const auto b = read_size(is, "node"), lb = read_size(is, "leg");
    const auto dim = read_size(is, "bond dim");
    g.connect(a, la, b, lb);
    if (g.edges().back().bond_dim != dim) throw InvalidInputError("edge bond dim does not match node tensors");
  }
  expect(is, "open");
  const auto k = read_size(is, "open leg count");
  for (std::size_t i = 0; i < k; ++i) {
    expect(is, "leg");
    const auto node = read_size(is, "node"), leg = read_size(is, "leg");
    const auto dim = read_size(is, "dim"), time = read_size(is, "time");
    const auto side = parse_leg_side(next_token(is, "side"));
    g.add_open_leg(node, leg, time, side);
    if (g.open_legs().back().dim != dim) throw InvalidInputError("open leg dim does not match node tensor");
  }
  g.validate();
  return g;
}

void save_text(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  if (!out.flush()) throw IoError("failed writing '" + path + "'");
}

std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace racsep
