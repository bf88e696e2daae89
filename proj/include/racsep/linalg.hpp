#pragma once

// Small dense matrix utilities on order-2 DenseTensors.

#include "racsep/tensor.hpp"

namespace racsep {

[[nodiscard]] DenseTensor identity_matrix(std::size_t n, Field field);
[[nodiscard]] DenseTensor transpose(const DenseTensor& m);
[[nodiscard]] DenseTensor matmul(const DenseTensor& a, const DenseTensor& b);
[[nodiscard]] DenseTensor matvec(const DenseTensor& m, const DenseTensor& v);
[[nodiscard]] DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b);
[[nodiscard]] DenseTensor add(const DenseTensor& a, const DenseTensor& b);
[[nodiscard]] DenseTensor scale(const DenseTensor& t, const Scalar& s);
[[nodiscard]] DenseTensor ones(std::size_t n, Field field);

/// Reorders modes: result mode i is source mode perm[i].
[[nodiscard]] DenseTensor permute_modes(const DenseTensor& t, std::span<const std::size_t> perm);

/// Solves m x = rhs for square non-singular m; throws ParameterError when singular.
[[nodiscard]] DenseTensor solve(const DenseTensor& m, const DenseTensor& rhs);
[[nodiscard]] DenseTensor inverse(const DenseTensor& m);
/// Exact test in the exact field, SVD rank test otherwise.
[[nodiscard]] bool is_invertible(const DenseTensor& m, double rel_tol = kDefaultRelTol);

}  // namespace racsep
