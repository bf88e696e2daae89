#include "racsep/tensor_network.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

#include "racsep/detail/kernels.hpp"
#include "racsep/linalg.hpp"

namespace racsep {

std::string_view to_string(LegSide side) noexcept {
  switch (side) {
    case LegSide::Start: return "start";
    case LegSide::End: return "end";
    case LegSide::Output: return "output";
  }
  return "output";
}

LegSide parse_leg_side(std::string_view text) {
  if (text == "start") return LegSide::Start;
  if (text == "end") return LegSide::End;
  if (text == "output") return LegSide::Output;
  throw InvalidInputError("unknown leg side '" + std::string(text) + "'");
}

std::size_t TnGraph::add_node(std::string label, DenseTensor tensor) {
  if (!nodes_.empty() && nodes_.front().tensor.field() != tensor.field())
    throw FieldMismatchError("tensor network nodes must share one field");
  used_.emplace_back(tensor.order(), 0);
  nodes_.push_back({std::move(label), std::move(tensor)});
  return nodes_.size() - 1;
}

void TnGraph::claim(std::size_t node, std::size_t leg) {
  if (node >= nodes_.size()) throw StructuralError("node " + std::to_string(node) + " does not exist");
  if (leg >= used_[node].size())
    throw StructuralError("node " + std::to_string(node) + " has no leg " + std::to_string(leg));
  if (used_[node][leg]) throw StructuralError("leg " + std::to_string(leg) + " of node " + std::to_string(node) + " is already used");
  used_[node][leg] = 1;
}

void TnGraph::connect(std::size_t node_a, std::size_t leg_a, std::size_t node_b, std::size_t leg_b) {
  if (node_a == node_b) throw StructuralError("self-loop edges are not supported");
  if (node_a >= nodes_.size() || node_b >= nodes_.size()) throw StructuralError("edge refers to a missing node");
  if (leg_a >= nodes_[node_a].tensor.order() || leg_b >= nodes_[node_b].tensor.order())
    throw StructuralError("edge refers to a missing leg");
  const auto da = nodes_[node_a].tensor.dim(leg_a);
  if (da != nodes_[node_b].tensor.dim(leg_b)) throw StructuralError("bond dims differ across edge");
  claim(node_a, leg_a);
  claim(node_b, leg_b);
  edges_.push_back({node_a, leg_a, node_b, leg_b, da});
}

void TnGraph::add_open_leg(std::size_t node, std::size_t leg, std::size_t time_index, LegSide side) {
  claim(node, leg);
  open_.push_back({node, leg, nodes_[node].tensor.dim(leg), time_index, side});
}

void TnGraph::validate() const {
  for (std::size_t n = 0; n < nodes_.size(); ++n)
    for (std::size_t l = 0; l < used_[n].size(); ++l)
      if (!used_[n][l])
        throw StructuralError("leg " + std::to_string(l) + " of node " + std::to_string(n) + " (" + nodes_[n].label +
                              ") is neither bonded nor open");
  if (nodes_.empty()) return;
  std::vector<std::vector<std::size_t>> adj(nodes_.size());
  for (const auto& e : edges_) {
    adj[e.node_a].push_back(e.node_b);
    adj[e.node_b].push_back(e.node_a);
  }
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
  }
  if (reached != nodes_.size()) throw StructuralError("tensor network is not connected");
}

bool operator==(const TnGraph& a, const TnGraph& b) {
  if (a.nodes_.size() != b.nodes_.size() || a.edges_.size() != b.edges_.size() || a.open_.size() != b.open_.size())
    return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i)
    if (a.nodes_[i].label != b.nodes_[i].label || !(a.nodes_[i].tensor == b.nodes_[i].tensor)) return false;
  for (std::size_t i = 0; i < a.edges_.size(); ++i) {
    const auto &x = a.edges_[i], &y = b.edges_[i];
    if (x.node_a != y.node_a || x.leg_a != y.leg_a || x.node_b != y.node_b || x.leg_b != y.leg_b ||
        x.bond_dim != y.bond_dim)
      return false;
  }
  for (std::size_t i = 0; i < a.open_.size(); ++i) {
    const auto &x = a.open_[i], &y = b.open_[i];
    if (x.node != y.node || x.leg != y.leg || x.dim != y.dim || x.time_index != y.time_index || x.side != y.side)
      return false;
  }
  return true;
}

DenseTensor delta_tensor(std::size_t dim, Field field) {
  if (dim == 0) throw InvalidInputError("delta tensor dimension must be positive");
  auto make = [&](auto one) {
    using S = decltype(one);
    std::vector<S> v(dim * dim * dim, detail::zero<S>());
    for (std::size_t i = 0; i < dim; ++i) v[(i * dim + i) * dim + i] = one;
    return DenseTensor({dim, dim, dim}, std::move(v));
  };
  return field == Field::Exact ? make(Rational(1)) : make(1.0);
}

namespace {

LegSide half_of(std::size_t t, std::size_t steps) { return t < steps / 2 ? LegSide::Start : LegSide::End; }

DenseTensor matrix_row(const DenseTensor& m, std::size_t i) {
  return m.visit([&](const auto& v) {
    using S = typename std::decay_t<decltype(v)>::value_type;
    return DenseTensor::vector(std::vector<S>(v.begin() + i * m.cols(), v.begin() + (i + 1) * m.cols()));
  });
}

}  // namespace

TnGraph build_mps(const RacParams& p, std::size_t steps, std::size_t class_index) {
  if (p.depth() != 1) throw ParameterError("matrix product state requires a depth-1 network");
  if (steps == 0) throw ParameterError("matrix product state requires T >= 1");
  if (class_index >= p.classes()) throw ParameterError("class index out of range");
  const auto r = p.hidden(), m = p.input_dim();
  auto block = p.w_in(0).visit([&](const auto& wi) {
    using S = typename std::decay_t<decltype(wi)>::value_type;
    const auto& wh = p.w_hidden(0).values<S>();
    std::vector<S> b(r * m * r);
    for (std::size_t kp = 0; kp < r; ++kp)
      for (std::size_t d = 0; d < m; ++d)
        for (std::size_t k = 0; k < r; ++k) b[(kp * m + d) * r + k] = wi[k * m + d] * wh[k * r + kp];
    return DenseTensor({r, m, r}, std::move(b));
  });

  TnGraph g;
  std::size_t prev = g.add_node("h0", p.h0(0));
  std::size_t prev_leg = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    const auto b = g.add_node("B" + std::to_string(t), block);
    g.connect(prev, prev_leg, b, 0);
    g.add_open_leg(b, 1, t, half_of(t, steps));
    prev = b;
    prev_leg = 2;
  }
  const auto out = g.add_node("w_out", matrix_row(p.w_out(), class_index));
  g.connect(prev, prev_leg, out, 0);
  return g;
}

TnGraph build_unit_cell(const RacParams& p, std::size_t layer) {
  if (layer >= p.depth()) throw ParameterError("layer out of range");
  TnGraph g;
  const auto wh = g.add_node("w_hidden", p.w_hidden(layer));
  const auto wi = g.add_node("w_in", p.w_in(layer));
  const auto delta = g.add_node("delta", delta_tensor(p.hidden(), p.field()));
  g.connect(wh, 0, delta, 0);
  g.connect(wi, 0, delta, 1);
  g.add_open_leg(wh, 1, 0, LegSide::Output);
  g.add_open_leg(wi, 1, 0, LegSide::Start);
  g.add_open_leg(delta, 2, 1, LegSide::Output);
  return g;
}

namespace {

struct DeepBuilder {
  const RacParams& p;
  std::size_t steps;
  TnGraph g;
  DenseTensor delta;

  // Adds the sub-network computing h[t][l] (t, l 1-based; t = 0 is h0) and
  // returns the node and leg carrying it.
  std::pair<std::size_t, std::size_t> hidden(std::size_t t, std::size_t l) {
    const auto tag = "_t" + std::to_string(t) + "_l" + std::to_string(l);
    if (t == 0) return {g.add_node("h0" + tag, p.h0(l - 1)), 0};
    const auto d = g.add_node("delta" + tag, delta);
    const auto wh = g.add_node("w_hidden" + tag, p.w_hidden(l - 1));
    const auto wi = g.add_node("w_in" + tag, p.w_in(l - 1));
    g.connect(wh, 0, d, 0);
    g.connect(wi, 0, d, 1);
    const auto [pn, pl] = hidden(t - 1, l);
    g.connect(wh, 1, pn, pl);
    if (l == 1) {
      g.add_open_leg(wi, 1, t - 1, half_of(t - 1, steps));
    } else {
      const auto [bn, bl] = hidden(t, l - 1);
      g.connect(wi, 1, bn, bl);
    }
    return {d, 2};
  }
};

}  // namespace

TnGraph build_deep_tn(const RacParams& p, std::size_t steps, const Budgets& budgets) {
  if (steps == 0) throw ParameterError("deep tensor network requires T >= 1");
  if (p.depth() > budgets.deep_tn_max_depth)
    throw ResourceError("deep tensor network depth " + std::to_string(p.depth()) + " exceeds cap " +
                            std::to_string(budgets.deep_tn_max_depth),
                        static_cast<double>(p.depth()));
  if (steps > budgets.deep_tn_max_steps)
    throw ResourceError("deep tensor network length " + std::to_string(steps) + " exceeds cap " +
                            std::to_string(budgets.deep_tn_max_steps),
                        static_cast<double>(steps));
  DeepBuilder b{p, steps, {}, delta_tensor(p.hidden(), p.field())};
  const auto out = b.g.add_node("w_out", p.w_out());
  const auto [top, leg] = b.hidden(steps, p.depth());
  b.g.connect(out, 1, top, leg);
  b.g.add_open_leg(out, 0, 0, LegSide::Output);
  return std::move(b.g);
}

namespace {

// Copies g, replacing open leg i by a bond to attached[i] when present.
TnGraph rebuild(const TnGraph& g, const std::vector<std::optional<std::pair<std::string, DenseTensor>>>& attached) {
  TnGraph out;
  for (const auto& n : g.nodes()) out.add_node(n.label, n.tensor);
  for (const auto& e : g.edges()) out.connect(e.node_a, e.leg_a, e.node_b, e.leg_b);
  for (std::size_t i = 0; i < g.open_legs().size(); ++i) {
    const auto& o = g.open_legs()[i];
    if (attached[i]) {
      const auto& [label, vec] = *attached[i];
      if (vec.order() != 1 || vec.dim(0) != o.dim) throw UnsupportedShapeError("attached vector does not fit leg");
      const auto v = out.add_node(label, vec);
      out.connect(o.node, o.leg, v, 0);
    } else {
      out.add_open_leg(o.node, o.leg, o.time_index, o.side);
    }
  }
  return out;
}

}  // namespace

TnGraph attach_inputs(const TnGraph& g, const TemplateEncoder& enc, const InputSequence& seq) {
  std::vector<std::optional<std::pair<std::string, DenseTensor>>> attached(g.open_legs().size());
  for (std::size_t i = 0; i < attached.size(); ++i) {
    const auto& o = g.open_legs()[i];
    if (o.side == LegSide::Output) continue;
    if (o.time_index >= seq.length()) throw InvalidInputError("sequence is shorter than the network");
    attached[i].emplace("x_t" + std::to_string(o.time_index), enc.encode(seq.symbols[o.time_index]));
  }
  return rebuild(g, attached);
}

TnGraph attach_vector(const TnGraph& g, std::size_t open_leg_index, const DenseTensor& vector, std::string label) {
  if (open_leg_index >= g.open_legs().size()) throw InvalidInputError("open leg index out of range");
  std::vector<std::optional<std::pair<std::string, DenseTensor>>> attached(g.open_legs().size());
  attached[open_leg_index].emplace(std::move(label), vector);
  return rebuild(g, attached);
}

namespace {

template <class S>
struct Cluster {
  std::vector<S> data;
  std::vector<std::size_t> dims;
  std::vector<long> labels;  // edge index, or -(open index + 1)
};

double entry_count(const std::vector<std::size_t>& dims) {
  double n = 1.0;
  for (auto d : dims) n *= static_cast<double>(d);
  return n;
}

void check_budget(double entries, const Budgets& budgets) {
  if (entries > static_cast<double>(budgets.contraction_entries))
    throw ResourceError("contraction needs an intermediate of " + std::to_string(entries) + " entries, budget is " +
                            std::to_string(budgets.contraction_entries),
                        entries);
}

template <class S>
Cluster<S> contract_pair(const Cluster<S>& a, const Cluster<S>& b) {
  std::vector<std::size_t> free_a, shared_a, shared_b, free_b;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    const auto it = std::find(b.labels.begin(), b.labels.end(), a.labels[i]);
    if (it == b.labels.end()) {
      free_a.push_back(i);
    } else {
      shared_a.push_back(i);
      shared_b.push_back(static_cast<std::size_t>(it - b.labels.begin()));
    }
  }
  for (std::size_t j = 0; j < b.labels.size(); ++j)
    if (std::find(shared_b.begin(), shared_b.end(), j) == shared_b.end()) free_b.push_back(j);

  std::vector<std::size_t> perm_a = free_a, perm_b = shared_b;
  perm_a.insert(perm_a.end(), shared_a.begin(), shared_a.end());
  perm_b.insert(perm_b.end(), free_b.begin(), free_b.end());
  std::size_t rows = 1, inner = 1, cols = 1;
  Cluster<S> out;
  for (auto i : free_a) {
    rows *= a.dims[i];
    out.dims.push_back(a.dims[i]);
    out.labels.push_back(a.labels[i]);
  }
  for (auto i : shared_a) inner *= a.dims[i];
  for (auto j : free_b) {
    cols *= b.dims[j];
    out.dims.push_back(b.dims[j]);
    out.labels.push_back(b.labels[j]);
  }
  out.data = detail::matmul(detail::permute(a.data, a.dims, perm_a), detail::permute(b.data, b.dims, perm_b), rows,
                            inner, cols);
  return out;
}

template <class S>
DenseTensor contract_typed(const TnGraph& g, const Budgets& budgets) {
  const auto n = g.nodes().size();
  std::vector<Cluster<S>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = g.nodes()[i].tensor;
    clusters[i] = {t.values<S>(), t.dims(), std::vector<long>(t.order(), 0)};
  }
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const auto& edge = g.edges()[e];
    clusters[edge.node_a].labels[edge.leg_a] = static_cast<long>(e);
    clusters[edge.node_b].labels[edge.leg_b] = static_cast<long>(e);
  }
  for (std::size_t k = 0; k < g.open_legs().size(); ++k) {
    const auto& o = g.open_legs()[k];
    clusters[o.node].labels[o.leg] = -static_cast<long>(k) - 1;
  }

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  for (std::size_t merges = 0; merges + 1 < n; ++merges) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = n, best_b = n;
    for (const auto& e : g.edges()) {
      auto ca = find(e.node_a), cb = find(e.node_b);
      if (ca == cb) continue;
      if (ca > cb) std::swap(ca, cb);
      double shared = 1.0;
      for (std::size_t i = 0; i < clusters[ca].labels.size(); ++i) {
        const auto lab = clusters[ca].labels[i];
        if (lab < 0) continue;
        const auto& le = g.edges()[static_cast<std::size_t>(lab)];
        const auto other = find(le.node_a) == ca ? find(le.node_b) : find(le.node_a);
        if (other == cb) shared *= static_cast<double>(clusters[ca].dims[i]);
      }
      const double cost = entry_count(clusters[ca].dims) * entry_count(clusters[cb].dims) / (shared * shared);
      if (cost < best || (cost == best && std::pair(ca, cb) < std::pair(best_a, best_b))) {
        best = cost;
        best_a = ca;
        best_b = cb;
      }
    }
    if (best_a == n) throw StructuralError("tensor network is not connected");
    check_budget(best, budgets);
    clusters[best_a] = contract_pair(clusters[best_a], clusters[best_b]);
    clusters[best_b] = {};
    parent[best_b] = best_a;
  }

  auto& last = clusters[find(0)];
  const auto k = g.open_legs().size();
  if (k == 0) return DenseTensor({1}, std::move(last.data));
  std::vector<std::size_t> perm(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto it = std::find(last.labels.begin(), last.labels.end(), -static_cast<long>(i) - 1);
    perm[i] = static_cast<std::size_t>(it - last.labels.begin());
  }
  DenseTensor::Dims dims(k);
  for (std::size_t i = 0; i < k; ++i) dims[i] = last.dims[perm[i]];
  return DenseTensor(std::move(dims), detail::permute(last.data, last.dims, perm));
}

}  // namespace

DenseTensor contract(const TnGraph& g, const Budgets& budgets) {
  if (g.empty()) throw StructuralError("cannot contract an empty tensor network");
  g.validate();
  double open_entries = 1.0;
  for (const auto& o : g.open_legs()) open_entries *= static_cast<double>(o.dim);
  check_budget(open_entries, budgets);
  if (g.nodes().front().tensor.field() == Field::Exact) return contract_typed<Rational>(g, budgets);
  return contract_typed<double>(g, budgets);
}

BasicUnitCount count_basic_units(std::size_t depth, std::size_t steps) {
  if (depth == 0) throw ParameterError("depth must be at least 1");
  if (steps == 0 || steps % 2 != 0) throw ParameterError("T must be a positive even integer");
  const auto half = steps / 2;
  const auto len = depth - 1;
  // Non-decreasing tuples over {T/2+1..T}, walked in lexicographic order.
  BigInt count = 0;
  std::vector<std::size_t> tuple(len, half + 1);
  while (true) {
    ++count;
    std::size_t i = len;
    while (i > 0 && tuple[i - 1] == steps) --i;
    if (i == 0) break;
    const auto v = tuple[i - 1] + 1;
    for (std::size_t j = i - 1; j < len; ++j) tuple[j] = v;
  }
  auto closed = multiset_coefficient(half, len);
  const bool match = count == closed;
  return {std::move(count), std::move(closed), match};
}

NoCloneReport no_clone_counterexample(std::size_t dim) {
  if (dim == 0) throw InvalidInputError("dimension must be positive");
  const auto delta = delta_tensor(dim, Field::Exact);
  auto clones = [&](const DenseTensor& v) {
    TnGraph g;
    const auto d = g.add_node("delta", delta);
    g.add_open_leg(d, 1, 0, LegSide::Output);
    g.add_open_leg(d, 2, 0, LegSide::Output);
    const auto x = g.add_node("v", v);
    g.connect(x, 0, d, 0);
    return contract(g) == tensor_product(v, v);
  };
  bool basis = true;
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<Rational> e(dim, Rational(0));
    e[i] = 1;
    basis = basis && clones(DenseTensor::vector(std::move(e)));
  }
  return {dim, basis, clones(ones(dim, Field::Exact))};
}

}  // namespace racsep
