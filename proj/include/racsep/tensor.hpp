#pragma once

// Dense tensors over a switchable scalar field, Start-End matricization and
// rank oracles. Matrices are order-2 tensors; entries are row-major (last
// index fastest) and all indices are 0-based.

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "racsep/errors.hpp"

namespace racsep {

using Rational = mpq_class;
using BigInt = mpz_class;

enum class Field { Float64, Exact };

[[nodiscard]] std::string_view to_string(Field field) noexcept;
[[nodiscard]] Field parse_field(std::string_view text);

using Scalar = std::variant<double, Rational>;

template <class S>
inline constexpr Field field_of = std::is_same_v<S, double> ? Field::Float64 : Field::Exact;

class DenseTensor {
 public:
  using Dims = std::vector<std::size_t>;

  DenseTensor(Dims dims, std::vector<double> entries);
  DenseTensor(Dims dims, std::vector<Rational> entries);

  static DenseTensor zeros(Dims dims, Field field);
  static DenseTensor vector(std::vector<double> entries);
  static DenseTensor vector(std::vector<Rational> entries);
  static DenseTensor matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  static DenseTensor matrix(std::size_t rows, std::size_t cols, std::vector<Rational> entries);

  [[nodiscard]] Field field() const noexcept;
  [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
  [[nodiscard]] std::size_t order() const noexcept { return dims_.size(); }
  [[nodiscard]] std::size_t dim(std::size_t mode) const { return dims_.at(mode); }
  [[nodiscard]] std::size_t size() const noexcept;

  // Order-2 only.
  [[nodiscard]] std::size_t rows() const;
  [[nodiscard]] std::size_t cols() const;

  /// Typed view of the entries; throws FieldMismatchError on the wrong field.
  template <class S>
  [[nodiscard]] const std::vector<S>& values() const {
    if (const auto* v = std::get_if<std::vector<S>>(&data_)) return *v;
    throw FieldMismatchError("tensor holds " + std::string(to_string(field())) + " entries, requested " +
                             std::string(to_string(field_of<S>)));
  }

  [[nodiscard]] std::size_t offset(std::span<const std::size_t> index) const;
  [[nodiscard]] Scalar at(std::span<const std::size_t> index) const;
  [[nodiscard]] Scalar flat(std::size_t i) const;

  [[nodiscard]] DenseTensor to_float() const;
  [[nodiscard]] DenseTensor reshaped(Dims dims) const;

  template <class F>
  decltype(auto) visit(F&& f) const {
    return std::visit(std::forward<F>(f), data_);
  }

  friend bool operator==(const DenseTensor& a, const DenseTensor& b);

 private:
  Dims dims_;
  std::variant<std::vector<double>, std::vector<Rational>> data_;
};

/// Split of tensor modes into row modes `start` and column modes `end`.
struct IndexPartition {
  std::vector<std::size_t> start;
  std::vector<std::size_t> end;

  /// Modes {0..T/2-1} against {T/2..T-1}; T must be even.
  static IndexPartition start_end(std::size_t order);
  void validate(std::size_t order) const;
};

enum class RankMethod { Exact, Svd };

struct RankReport {
  std::size_t rank = 0;
  RankMethod method = RankMethod::Exact;
  std::optional<std::vector<double>> singular_values;
  double tolerance = 0.0;
};

inline constexpr double kDefaultRelTol = 1e-12;

[[nodiscard]] DenseTensor tensor_product(const DenseTensor& a, const DenseTensor& b);

/// Rows enumerate the modes of p.start (first listed mode slowest), columns
/// those of p.end. Every mode must have the same dimension.
[[nodiscard]] DenseTensor matricize(const DenseTensor& t, const IndexPartition& p);
[[nodiscard]] DenseTensor dematricize(const DenseTensor& m, const DenseTensor::Dims& dims, const IndexPartition& p);

[[nodiscard]] DenseTensor hadamard_power(const DenseTensor& m, unsigned power);

/// Fraction-free elimination with full pivoting.
[[nodiscard]] RankReport rank_exact(const DenseTensor& m);
/// Counts singular values above rel_tol * max(rows, cols) * sigma_max.
[[nodiscard]] RankReport rank_numeric(const DenseTensor& m, double rel_tol = kDefaultRelTol);
/// rank_exact for exact matrices, rank_numeric otherwise.
[[nodiscard]] RankReport rank_of(const DenseTensor& m, double rel_tol = kDefaultRelTol);

/// C(n + k - 1, k): number of size-k multisets over n symbols.
[[nodiscard]] BigInt multiset_coefficient(unsigned long n, unsigned long k);

[[nodiscard]] std::string format_rational(const Rational& q);
[[nodiscard]] Rational parse_rational(std::string_view text);
[[nodiscard]] std::string format_scalar(const Scalar& s);

}  // namespace racsep
