#pragma once

// Tensor networks of product networks. Nodes hold dense tensors; every leg of
// every node is either bonded to exactly one other leg or exposed as an open
// leg. Open input legs carry the time step they read and whether that step
// belongs to the Start or End half of the sequence.

#include <cstdint>
#include <string>
#include <vector>

#include "racsep/builders.hpp"
#include "racsep/rac.hpp"
#include "racsep/tensor.hpp"

namespace racsep {

enum class LegSide { Start, End, Output };

[[nodiscard]] std::string_view to_string(LegSide side) noexcept;
[[nodiscard]] LegSide parse_leg_side(std::string_view text);

struct TnNode {
  std::string label;
  DenseTensor tensor;
};

struct TnEdge {
  std::size_t node_a, leg_a, node_b, leg_b, bond_dim;
};

struct OpenLeg {
  std::size_t node, leg, dim;
  std::size_t time_index;  // meaningful for Start/End legs only
  LegSide side;
};

class TnGraph {
 public:
  std::size_t add_node(std::string label, DenseTensor tensor);
  void connect(std::size_t node_a, std::size_t leg_a, std::size_t node_b, std::size_t leg_b);
  void add_open_leg(std::size_t node, std::size_t leg, std::size_t time_index, LegSide side);

  [[nodiscard]] const std::vector<TnNode>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const std::vector<TnEdge>& edges() const noexcept { return edges_; }
  [[nodiscard]] const std::vector<OpenLeg>& open_legs() const noexcept { return open_; }
  [[nodiscard]] bool empty() const noexcept { return nodes_.empty(); }

  /// Every leg used exactly once with matching dims, one scalar field, and a
  /// connected graph. Throws StructuralError otherwise.
  void validate() const;

  friend bool operator==(const TnGraph&, const TnGraph&);

 private:
  std::vector<TnNode> nodes_;
  std::vector<TnEdge> edges_;
  std::vector<OpenLeg> open_;
  std::vector<std::vector<char>> used_;

  void claim(std::size_t node, std::size_t leg);
};

/// Order-3 tensor equal to 1 on the super-diagonal.
[[nodiscard]] DenseTensor delta_tensor(std::size_t dim, Field field);

/// Matrix product state of the class-c weights tensor: T blocks
/// B[k_prev, d, k] = W_I[k, d] W_H[k, k_prev] between an h0 boundary vector and
/// the W_O row of class c. Open legs follow time order.
[[nodiscard]] TnGraph build_mps(const RacParams& p, std::size_t steps, std::size_t class_index = 0);

/// One time step: W_H and W_I joined by a delta node. Open legs, in order:
/// previous hidden state (R, Output, time 0), input (Start, time 0), next
/// hidden state (R, Output, time 1).
[[nodiscard]] TnGraph build_unit_cell(const RacParams& p, std::size_t layer = 0);

/// Network for the full depth-L computation, realizing every reuse of a hidden
/// state by re-inserting the inputs it was computed from. The single Output
/// leg (dim C) comes last among the open legs.
[[nodiscard]] TnGraph build_deep_tn(const RacParams& p, std::size_t steps, const Budgets& budgets = {});

/// Replaces every open input leg with a vector node holding f(x) of the symbol
/// at that leg's time step.
[[nodiscard]] TnGraph attach_inputs(const TnGraph& g, const TemplateEncoder& enc, const InputSequence& seq);

/// Attaches `vector` to one open leg, removing it from the open set.
[[nodiscard]] TnGraph attach_vector(const TnGraph& g, std::size_t open_leg_index, const DenseTensor& vector,
                                    std::string label = "vec");

/// Sums over all bonded indices. Result modes follow g.open_legs() order.
/// Pairs are contracted greedily, smallest intermediate first.
[[nodiscard]] DenseTensor contract(const TnGraph& g, const Budgets& budgets = {});

struct CutEdge {
  enum class Kind { Bond, OpenLeg } kind;
  std::size_t index;  // into edges() or open_legs()
  std::size_t dim;
};

struct MinCutResult {
  BigInt value;
  std::vector<CutEdge> edges;
};

/// Minimal product of bond dims over edge sets separating Start legs from End
/// legs; open legs act as edges to virtual terminals. Output legs are ignored.
[[nodiscard]] MinCutResult min_cut(const TnGraph& g);

struct BasicUnitCount {
  BigInt enumerated;
  BigInt closed_form;
  bool match;
};

/// Counts tuples t_2 <= ... <= t_L with every t_i in the End half {T/2+1..T}
/// by explicit enumeration, next to multiset(T/2, L-1).
[[nodiscard]] BasicUnitCount count_basic_units(std::size_t depth, std::size_t steps);

struct NoCloneReport {
  std::size_t dim;
  bool clones_basis;
  bool clones_ones;
};

/// Contracts a delta node with each standard basis vector and with the
/// all-ones vector and checks whether the result equals v (x) v.
[[nodiscard]] NoCloneReport no_clone_counterexample(std::size_t dim);

}  // namespace racsep
