#include <deque>

#include "racsep/tensor_network.hpp"

namespace racsep {

namespace {

// Max flow in the multiplicative group of positive rationals: capacities are
// bond dims, "no flow" is 1 and augmenting multiplies. The flow on an
// undirected edge is skew-symmetric, so residual(u->v) = cap / f and
// residual(v->u) = cap * f.
struct FlowEdge {
  std::size_t u, v;
  Rational cap, flow;  // flow in direction u -> v
  CutEdge origin;
};

struct Arc {
  std::size_t edge;
  bool forward;
};

Rational residual(const FlowEdge& e, bool forward) { return forward ? Rational(e.cap / e.flow) : Rational(e.cap * e.flow); }

std::size_t head(const FlowEdge& e, bool forward) { return forward ? e.v : e.u; }

}  // namespace

MinCutResult min_cut(const TnGraph& g) {
  const auto n = g.nodes().size();
  const auto source = n, sink = n + 1;
  std::vector<FlowEdge> edges;
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const auto& e = g.edges()[i];
    edges.push_back({e.node_a, e.node_b, Rational(e.bond_dim), Rational(1), {CutEdge::Kind::Bond, i, e.bond_dim}});
  }
  bool any_start = false, any_end = false;
  for (std::size_t i = 0; i < g.open_legs().size(); ++i) {
    const auto& o = g.open_legs()[i];
    const CutEdge origin{CutEdge::Kind::OpenLeg, i, o.dim};
    if (o.side == LegSide::Start) {
      any_start = true;
      edges.push_back({source, o.node, Rational(o.dim), Rational(1), origin});
    } else if (o.side == LegSide::End) {
      any_end = true;
      edges.push_back({o.node, sink, Rational(o.dim), Rational(1), origin});
    }
  }
  if (!any_start || !any_end) throw StructuralError("min cut needs both Start and End open legs");

  std::vector<std::vector<Arc>> adj(n + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    adj[edges[i].u].push_back({i, true});
    adj[edges[i].v].push_back({i, false});
  }

  // Shortest augmenting paths; `open` decides which arcs may be traversed.
  auto bfs = [&](auto open, std::vector<Arc>& via) {
    std::vector<char> seen(n + 2, 0);
    via.assign(n + 2, {edges.size(), true});
    std::deque<std::size_t> queue{source};
    seen[source] = 1;
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (const auto& a : adj[u]) {
        const auto w = head(edges[a.edge], a.forward);
        if (seen[w] || !open(a)) continue;
        seen[w] = 1;
        via[w] = a;
        queue.push_back(w);
      }
    }
    return seen;
  };

  std::vector<Arc> via;
  if (!bfs([](const Arc&) { return true; }, via)[sink])
    throw StructuralError("Start and End legs lie in disconnected components");

  const Rational unit(1);
  auto has_residual = [&](const Arc& a) { return residual(edges[a.edge], a.forward) > unit; };
  while (true) {
    const auto seen = bfs(has_residual, via);
    if (!seen[sink]) {
      MinCutResult result{BigInt(1), {}};
      for (const auto& e : edges)
        if (seen[e.u] != seen[e.v]) {
          result.value *= static_cast<unsigned long>(e.origin.dim);
          result.edges.push_back(e.origin);
        }
      return result;
    }
    Rational bottleneck;
    bool first = true;
    for (auto w = sink; w != source;) {
      const auto& a = via[w];
      const auto r = residual(edges[a.edge], a.forward);
      if (first || r < bottleneck) bottleneck = r;
      first = false;
      w = a.forward ? edges[a.edge].u : edges[a.edge].v;
    }
    for (auto w = sink; w != source;) {
      const auto& a = via[w];
      auto& e = edges[a.edge];
      if (a.forward) {
        e.flow *= bottleneck;
      } else {
        e.flow /= bottleneck;
      }
      w = a.forward ? e.u : e.v;
    }
  }
}

}  // namespace racsep
