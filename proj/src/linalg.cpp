#include "racsep/linalg.hpp"

#include <cmath>

#include "racsep/detail/kernels.hpp"

namespace racsep {

namespace {

template <class S>
using Vec = std::vector<S>;

void require_same_field(const DenseTensor& a, const DenseTensor& b, const char* op) {
  if (a.field() != b.field()) throw FieldMismatchError(std::string(op) + ": operands over different fields");
}

template <class F>
DenseTensor dispatch(Field field, F&& f) {
  if (field == Field::Exact) return f(Rational{});
  return f(double{});
}

}  // namespace

DenseTensor identity_matrix(std::size_t n, Field field) {
  return dispatch(field, [&](auto tag) {
    using S = decltype(tag);
    Vec<S> out(n * n, detail::zero<S>());
    for (std::size_t i = 0; i < n; ++i) out[i * n + i] = detail::one<S>();
    return DenseTensor::matrix(n, n, std::move(out));
  });
}

DenseTensor ones(std::size_t n, Field field) {
  return dispatch(field, [&](auto tag) {
    using S = decltype(tag);
    return DenseTensor::vector(Vec<S>(n, detail::one<S>()));
  });
}

DenseTensor transpose(const DenseTensor& m) {
  const std::size_t perm[] = {1, 0};
  return permute_modes(m, perm);
}

DenseTensor matmul(const DenseTensor& a, const DenseTensor& b) {
  require_same_field(a, b, "matmul");
  if (a.cols() != b.rows()) throw UnsupportedShapeError("matmul: inner dimensions differ");
  return a.visit([&](const auto& av) {
    using S = typename std::decay_t<decltype(av)>::value_type;
    return DenseTensor::matrix(a.rows(), b.cols(), detail::matmul(av, b.values<S>(), a.rows(), a.cols(), b.cols()));
  });
}

DenseTensor matvec(const DenseTensor& m, const DenseTensor& v) {
  require_same_field(m, v, "matvec");
  if (v.order() != 1 || m.cols() != v.dim(0)) throw UnsupportedShapeError("matvec: shape mismatch");
  return m.visit([&](const auto& mv) {
    using S = typename std::decay_t<decltype(mv)>::value_type;
    return DenseTensor::vector(detail::matvec(mv, v.values<S>(), m.rows(), m.cols()));
  });
}

DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b) {
  require_same_field(a, b, "hadamard");
  if (a.dims() != b.dims()) throw UnsupportedShapeError("hadamard: shape mismatch");
  return a.visit([&](const auto& av) {
    using S = typename std::decay_t<decltype(av)>::value_type;
    const auto& bv = b.values<S>();
    Vec<S> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i];
    return DenseTensor(a.dims(), std::move(out));
  });
}

DenseTensor add(const DenseTensor& a, const DenseTensor& b) {
  require_same_field(a, b, "add");
  if (a.dims() != b.dims()) throw UnsupportedShapeError("add: shape mismatch");
  return a.visit([&](const auto& av) {
    using S = typename std::decay_t<decltype(av)>::value_type;
    const auto& bv = b.values<S>();
    Vec<S> out(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i];
    return DenseTensor(a.dims(), std::move(out));
  });
}

DenseTensor scale(const DenseTensor& t, const Scalar& s) {
  return t.visit([&](const auto& tv) {
    using S = typename std::decay_t<decltype(tv)>::value_type;
    const auto* alpha = std::get_if<S>(&s);
    if (!alpha) throw FieldMismatchError("scale: scalar field differs from tensor field");
    Vec<S> out(tv.size());
    for (std::size_t i = 0; i < tv.size(); ++i) out[i] = *alpha * tv[i];
    return DenseTensor(t.dims(), std::move(out));
  });
}

DenseTensor permute_modes(const DenseTensor& t, std::span<const std::size_t> perm) {
  const auto order = t.order();
  if (perm.size() != order) throw InvalidInputError("permute_modes: permutation arity mismatch");
  std::vector<int> seen(order, 0);
  for (auto p : perm)
    if (p >= order || seen[p]++) throw InvalidInputError("permute_modes: not a permutation");

  DenseTensor::Dims dims(order);
  for (std::size_t i = 0; i < order; ++i) dims[i] = t.dim(perm[i]);
  const std::vector<std::size_t> p(perm.begin(), perm.end());
  return t.visit([&](const auto& v) { return DenseTensor(std::move(dims), detail::permute(v, t.dims(), p)); });
}

namespace {

// Gauss-Jordan on [m | rhs]; partial pivoting by magnitude for doubles.
template <class S>
Vec<S> gauss_solve(Vec<S> a, Vec<S> b, std::size_t n, std::size_t nrhs) {
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = n;
    if constexpr (std::is_same_v<S, double>) {
      double best = 0.0;
      for (std::size_t i = k; i < n; ++i)
        if (std::abs(a[i * n + k]) > best) {
          best = std::abs(a[i * n + k]);
          piv = i;
        }
    } else {
      for (std::size_t i = k; i < n && piv == n; ++i)
        if (!detail::is_zero(a[i * n + k])) piv = i;
    }
    if (piv == n) throw ParameterError("solve: matrix is singular");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[piv * n + j], a[k * n + j]);
      for (std::size_t j = 0; j < nrhs; ++j) std::swap(b[piv * nrhs + j], b[k * nrhs + j]);
    }
    const S inv = detail::one<S>() / a[k * n + k];
    for (std::size_t j = 0; j < n; ++j) a[k * n + j] *= inv;
    for (std::size_t j = 0; j < nrhs; ++j) b[k * nrhs + j] *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const S f = a[i * n + k];
      if (detail::is_zero(f)) continue;
      for (std::size_t j = 0; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      for (std::size_t j = 0; j < nrhs; ++j) b[i * nrhs + j] -= f * b[k * nrhs + j];
    }
  }
  return b;
}

}  // namespace

DenseTensor solve(const DenseTensor& m, const DenseTensor& rhs) {
  require_same_field(m, rhs, "solve");
  const auto n = m.rows();
  if (m.cols() != n) throw UnsupportedShapeError("solve: matrix must be square");
  if (rhs.dim(0) != n || rhs.order() > 2) throw UnsupportedShapeError("solve: rhs shape mismatch");
  const auto nrhs = rhs.order() == 2 ? rhs.cols() : 1;
  if (m.field() == Field::Float64 && !is_invertible(m)) throw ParameterError("solve: matrix is singular");
  return m.visit([&](const auto& mv) {
    using S = typename std::decay_t<decltype(mv)>::value_type;
    return DenseTensor(rhs.dims(), gauss_solve<S>(mv, rhs.values<S>(), n, nrhs));
  });
}

DenseTensor inverse(const DenseTensor& m) { return solve(m, identity_matrix(m.rows(), m.field())); }

bool is_invertible(const DenseTensor& m, double rel_tol) {
  if (m.order() != 2 || m.rows() != m.cols()) return false;
  return rank_of(m, rel_tol).rank == m.rows();
}

}  // namespace racsep
