#pragma once

#include <cstdint>

#include "racsep/rac.hpp"
#include "racsep/tensor.hpp"

namespace racsep {

/// Size caps for exponential constructions. Defaults can be overridden from
/// the CLI or environment.
struct Budgets {
  std::size_t grid_entries = 10'000'000;
  std::size_t contraction_entries = 1u << 24;
  std::size_t deep_tn_max_depth = 3;
  std::size_t deep_tn_max_steps = 8;
};

/// Coefficient tensor of the class-c score of a depth-1 product network after
/// T steps: score = sum_d A[d] prod_i f_{d_i}(x_i). It is a tensor train of rank R.
struct WeightsTensor {
  DenseTensor tensor;
  std::size_t class_index;
  std::size_t tt_rank;
};

struct GridProvenance {
  std::uint64_t params_hash;
  std::uint64_t encoder_hash;
  std::size_t depth;
  std::size_t class_index;
};

/// Network outputs on every sequence of template symbols: entry (d_1..d_T) is
/// the class score after feeding x^(d_1), ..., x^(d_T).
struct GridTensor {
  DenseTensor tensor;
  GridProvenance provenance;
};

/// Requires depth 1, T >= 2 and an invertible hidden matrix.
[[nodiscard]] WeightsTensor build_weights_tensor(const RacParams& p, std::size_t class_index, std::size_t steps);

[[nodiscard]] Scalar score_from_tensor(const WeightsTensor& w, const TemplateEncoder& enc, const InputSequence& seq);

/// Enumerates all M^T sequences depth-first, sharing hidden states between
/// sequences with a common prefix.
[[nodiscard]] GridTensor build_grid_tensor(const RacParams& p, Nonlinearity g, const TemplateEncoder& enc,
                                           std::size_t class_index, std::size_t steps, const Budgets& budgets = {});

/// FNV-1a over the canonical text serialization.
[[nodiscard]] std::uint64_t content_hash(const RacParams& p);
[[nodiscard]] std::uint64_t content_hash(const DenseTensor& t);

}  // namespace racsep
