#pragma once

// Field-generic loops shared by the library translation units.

#include <cmath>
#include <cstddef>
#include <vector>

#include "racsep/tensor.hpp"

namespace racsep::detail {

template <class S>
inline bool is_zero(const S& x) {
  if constexpr (std::is_same_v<S, double>) {
    return x == 0.0;
  } else {
    return sgn(x) == 0;
  }
}

template <class S>
inline S zero() {
  return S(0);
}

template <class S>
inline S one() {
  return S(1);
}

/// Row-major (rows x inner) * (inner x cols).
template <class S>
std::vector<S> matmul(const std::vector<S>& a, const std::vector<S>& b, std::size_t rows, std::size_t inner,
                      std::size_t cols) {
  std::vector<S> out(rows * cols, zero<S>());
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < inner; ++k) {
      const S& aik = a[i * inner + k];
      if (is_zero(aik)) continue;
      for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] += aik * b[k * cols + j];
    }
  }
  return out;
}

template <class S>
std::vector<S> matvec(const std::vector<S>& m, const std::vector<S>& v, std::size_t rows, std::size_t cols) {
  std::vector<S> out(rows, zero<S>());
  for (std::size_t i = 0; i < rows; ++i) {
    S acc = zero<S>();
    for (std::size_t j = 0; j < cols; ++j) acc += m[i * cols + j] * v[j];
    out[i] = acc;
  }
  return out;
}

template <class S>
std::vector<S> outer(const std::vector<S>& a, const std::vector<S>& b) {
  std::vector<S> out;
  out.reserve(a.size() * b.size());
  for (const S& x : a)
    for (const S& y : b) out.push_back(x * y);
  return out;
}

template <class S>
void axpy(const S& alpha, const std::vector<S>& x, std::vector<S>& y) {
  if (is_zero(alpha)) return;
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

template <class S>
S power(const S& base, unsigned exponent) {
  if constexpr (std::is_same_v<S, double>) {
    return std::pow(base, static_cast<double>(exponent));
  } else {
    Rational result;
    mpz_pow_ui(result.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
    mpz_pow_ui(result.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
    return result;
  }
}

/// Reorders a row-major array: result mode i is source mode perm[i].
template <class S>
std::vector<S> permute(const std::vector<S>& v, const std::vector<std::size_t>& dims,
                       const std::vector<std::size_t>& perm) {
  const auto order = dims.size();
  if (order == 0) return v;
  std::vector<std::size_t> stride(order, 1), src_stride(order), out_dims(order);
  for (std::size_t m = order; m-- > 1;) stride[m - 1] = stride[m] * dims[m];
  for (std::size_t i = 0; i < order; ++i) {
    src_stride[i] = stride[perm[i]];
    out_dims[i] = dims[perm[i]];
  }
  std::vector<S> out(v.size());
  std::vector<std::size_t> idx(order, 0);
  std::size_t src = 0;
  for (std::size_t off = 0; off < out.size(); ++off) {
    out[off] = v[src];
    for (std::size_t m = order; m-- > 0;) {
      src += src_stride[m];
      if (++idx[m] < out_dims[m]) break;
      src -= src_stride[m] * out_dims[m];
      idx[m] = 0;
    }
  }
  return out;
}

}  // namespace racsep::detail
