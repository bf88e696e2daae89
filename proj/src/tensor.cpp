#include "racsep/tensor.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numeric>

#include "racsep/detail/kernels.hpp"

namespace racsep {

namespace {

std::size_t product(const DenseTensor::Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void check_dims(const DenseTensor::Dims& dims, std::size_t entries) {
  if (dims.empty()) throw UnsupportedShapeError("tensor order must be at least 1");
  for (auto d : dims)
    if (d == 0) throw UnsupportedShapeError("tensor dimensions must be positive");
  if (product(dims) != entries)
    throw UnsupportedShapeError("entry count " + std::to_string(entries) + " does not match dims product " +
                                std::to_string(product(dims)));
}

std::size_t common_mode_dim(const DenseTensor& t) {
  const auto m = t.dim(0);
  for (auto d : t.dims())
    if (d != m) throw UnsupportedShapeError("matricization requires equal mode dimensions");
  return m;
}

}  // namespace

std::string_view to_string(Field field) noexcept { return field == Field::Exact ? "exact" : "float"; }

Field parse_field(std::string_view text) {
  if (text == "exact") return Field::Exact;
  if (text == "float") return Field::Float64;
  throw InvalidInputError("unknown field '" + std::string(text) + "' (expected exact|float)");
}

DenseTensor::DenseTensor(Dims dims, std::vector<double> entries) : dims_(std::move(dims)), data_(std::move(entries)) {
  check_dims(dims_, size());
}

DenseTensor::DenseTensor(Dims dims, std::vector<Rational> entries) : dims_(std::move(dims)), data_(std::move(entries)) {
  check_dims(dims_, size());
}

DenseTensor DenseTensor::zeros(Dims dims, Field field) {
  const auto n = product(dims);
  if (field == Field::Exact) return {std::move(dims), std::vector<Rational>(n)};
  return {std::move(dims), std::vector<double>(n, 0.0)};
}

DenseTensor DenseTensor::vector(std::vector<double> entries) {
  Dims dims{entries.size()};
  return {std::move(dims), std::move(entries)};
}

DenseTensor DenseTensor::vector(std::vector<Rational> entries) {
  Dims dims{entries.size()};
  return {std::move(dims), std::move(entries)};
}

DenseTensor DenseTensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> entries) {
  return {{rows, cols}, std::move(entries)};
}

DenseTensor DenseTensor::matrix(std::size_t rows, std::size_t cols, std::vector<Rational> entries) {
  return {{rows, cols}, std::move(entries)};
}

Field DenseTensor::field() const noexcept {
  return std::holds_alternative<std::vector<Rational>>(data_) ? Field::Exact : Field::Float64;
}

std::size_t DenseTensor::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, data_);
}

std::size_t DenseTensor::rows() const {
  if (order() != 2) throw UnsupportedShapeError("rows() requires an order-2 tensor");
  return dims_[0];
}

std::size_t DenseTensor::cols() const {
  if (order() != 2) throw UnsupportedShapeError("cols() requires an order-2 tensor");
  return dims_[1];
}

std::size_t DenseTensor::offset(std::span<const std::size_t> index) const {
  if (index.size() != order()) throw InvalidInputError("index arity does not match tensor order");
  std::size_t off = 0;
  for (std::size_t m = 0; m < order(); ++m) {
    if (index[m] >= dims_[m]) throw InvalidInputError("index out of range");
    off = off * dims_[m] + index[m];
  }
  return off;
}

Scalar DenseTensor::at(std::span<const std::size_t> index) const { return flat(offset(index)); }

Scalar DenseTensor::flat(std::size_t i) const {
  return std::visit([i](const auto& v) -> Scalar { return v.at(i); }, data_);
}

DenseTensor DenseTensor::to_float() const {
  if (field() == Field::Float64) return *this;
  const auto& q = values<Rational>();
  std::vector<double> out;
  out.reserve(q.size());
  for (const auto& x : q) out.push_back(x.get_d());
  return {dims_, std::move(out)};
}

DenseTensor DenseTensor::reshaped(Dims dims) const {
  return std::visit([&](const auto& v) { return DenseTensor(std::move(dims), v); }, data_);
}

bool operator==(const DenseTensor& a, const DenseTensor& b) { return a.dims_ == b.dims_ && a.data_ == b.data_; }

IndexPartition IndexPartition::start_end(std::size_t order) {
  if (order == 0 || order % 2 != 0) throw InvalidInputError("Start-End partition requires an even order");
  IndexPartition p;
  for (std::size_t m = 0; m < order; ++m) (m < order / 2 ? p.start : p.end).push_back(m);
  return p;
}

void IndexPartition::validate(std::size_t order) const {
  std::vector<int> seen(order, 0);
  auto mark = [&](const std::vector<std::size_t>& modes) {
    if (!std::is_sorted(modes.begin(), modes.end())) throw InvalidInputError("partition modes must be sorted");
    for (auto m : modes) {
      if (m >= order) throw InvalidInputError("partition mode out of range");
      if (seen[m]++) throw InvalidInputError("partition modes overlap");
    }
  };
  mark(start);
  mark(end);
  if (std::count(seen.begin(), seen.end(), 1) != static_cast<std::ptrdiff_t>(order))
    throw InvalidInputError("partition does not cover every mode");
}

DenseTensor tensor_product(const DenseTensor& a, const DenseTensor& b) {
  if (a.field() != b.field()) throw FieldMismatchError("tensor_product of tensors over different fields");
  auto dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return a.visit([&](const auto& av) {
    using S = typename std::decay_t<decltype(av)>::value_type;
    return DenseTensor(std::move(dims), detail::outer(av, b.values<S>()));
  });
}

namespace {

// Matricized coordinates of flat entry `off` in a tensor whose T modes all have dim m.
std::pair<std::size_t, std::size_t> mat_coords(std::size_t off, std::size_t order, std::size_t m,
                                               const IndexPartition& p, std::vector<std::size_t>& idx) {
  for (std::size_t k = order; k-- > 0;) {
    idx[k] = off % m;
    off /= m;
  }
  std::size_t row = 0, col = 0;
  for (auto mode : p.start) row = row * m + idx[mode];
  for (auto mode : p.end) col = col * m + idx[mode];
  return {row, col};
}

std::size_t ipow(std::size_t base, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= base;
  return r;
}

}  // namespace

DenseTensor matricize(const DenseTensor& t, const IndexPartition& p) {
  p.validate(t.order());
  const auto m = common_mode_dim(t);
  const auto rows = ipow(m, p.start.size());
  const auto cols = ipow(m, p.end.size());
  std::vector<std::size_t> idx(t.order());
  return t.visit([&](const auto& v) {
    using S = typename std::decay_t<decltype(v)>::value_type;
    std::vector<S> out(v.size());
    for (std::size_t off = 0; off < v.size(); ++off) {
      auto [r, c] = mat_coords(off, t.order(), m, p, idx);
      out[r * cols + c] = v[off];
    }
    return DenseTensor::matrix(rows, cols, std::move(out));
  });
}

DenseTensor dematricize(const DenseTensor& mat, const DenseTensor::Dims& dims, const IndexPartition& p) {
  p.validate(dims.size());
  const auto shape = DenseTensor::zeros(dims, mat.field());
  const auto m = common_mode_dim(shape);
  const auto cols = ipow(m, p.end.size());
  if (mat.rows() != ipow(m, p.start.size()) || mat.cols() != cols)
    throw UnsupportedShapeError("matrix shape does not match the partition");
  std::vector<std::size_t> idx(dims.size());
  return mat.visit([&](const auto& v) {
    using S = typename std::decay_t<decltype(v)>::value_type;
    std::vector<S> out(v.size());
    for (std::size_t off = 0; off < out.size(); ++off) {
      auto [r, c] = mat_coords(off, dims.size(), m, p, idx);
      out[off] = v[r * cols + c];
    }
    return DenseTensor(dims, std::move(out));
  });
}

DenseTensor hadamard_power(const DenseTensor& m, unsigned power) {
  return m.visit([&](const auto& v) {
    using S = typename std::decay_t<decltype(v)>::value_type;
    std::vector<S> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(detail::power(x, power));
    return DenseTensor(m.dims(), std::move(out));
  });
}

RankReport rank_exact(const DenseTensor& m) {
  if (m.field() != Field::Exact) throw FieldMismatchError("rank_exact requires an exact matrix");
  const auto rows = m.rows();
  const auto cols = m.cols();
  const auto& q = m.values<Rational>();

  // Clear denominators row by row; row scaling preserves rank.
  std::vector<BigInt> a(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    BigInt lcm = 1;
    for (std::size_t j = 0; j < cols; ++j) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q[i * cols + j].get_den_mpz_t());
    for (std::size_t j = 0; j < cols; ++j) {
      const auto& x = q[i * cols + j];
      a[i * cols + j] = x.get_num() * (lcm / x.get_den());
    }
  }

  // Bareiss elimination; the pivot is the smallest nonzero entry of the
  // remaining block, which keeps intermediate sizes down.
  std::vector<std::size_t> col_of(cols);
  std::iota(col_of.begin(), col_of.end(), 0);
  BigInt prev = 1;
  std::size_t rank = 0;
  auto at = [&](std::size_t i, std::size_t j) -> BigInt& { return a[i * cols + col_of[j]]; };
  for (std::size_t k = 0; k < std::min(rows, cols); ++k) {
    std::size_t pi = rows, pj = cols, best = 0;
    for (std::size_t i = k; i < rows; ++i)
      for (std::size_t j = k; j < cols; ++j) {
        const auto& x = at(i, j);
        if (sgn(x) == 0) continue;
        const auto bits = mpz_sizeinbase(x.get_mpz_t(), 2);
        if (pi == rows || bits < best) {
          pi = i;
          pj = j;
          best = bits;
        }
      }
    if (pi == rows) break;
    if (pi != k)
      for (std::size_t j = 0; j < cols; ++j) std::swap(a[pi * cols + j], a[k * cols + j]);
    std::swap(col_of[pj], col_of[k]);
    ++rank;
    const BigInt pivot = at(k, k);
    for (std::size_t i = k + 1; i < rows; ++i) {
      const BigInt lead = at(i, k);
      for (std::size_t j = k + 1; j < cols; ++j) {
        BigInt& x = at(i, j);
        x = pivot * x - lead * at(k, j);
        mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), prev.get_mpz_t());
      }
      at(i, k) = 0;
    }
    prev = pivot;
  }
  return {rank, RankMethod::Exact, std::nullopt, 0.0};
}

RankReport rank_numeric(const DenseTensor& m, double rel_tol) {
  if (m.field() != Field::Float64) throw FieldMismatchError("rank_numeric requires a float matrix");
  const auto rows = m.rows();
  const auto cols = m.cols();
  const auto& v = m.values<double>();
  for (double x : v)
    if (!std::isfinite(x)) throw InvalidInputError("rank_numeric: matrix has non-finite entries");
  Eigen::MatrixXd a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a(i, j) = v[i * cols + j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  std::vector<double> sv(s.data(), s.data() + s.size());
  std::sort(sv.begin(), sv.end(), std::greater<>());
  const double sigma_max = sv.empty() ? 0.0 : sv.front();
  const double threshold = rel_tol * static_cast<double>(std::max(rows, cols)) * sigma_max;
  const auto rank = static_cast<std::size_t>(std::count_if(sv.begin(), sv.end(), [&](double x) { return x > threshold; }));
  return {rank, RankMethod::Svd, std::move(sv), rel_tol};
}

RankReport rank_of(const DenseTensor& m, double rel_tol) {
  return m.field() == Field::Exact ? rank_exact(m) : rank_numeric(m, rel_tol);
}

BigInt multiset_coefficient(unsigned long n, unsigned long k) {
  if (k == 0) return 1;
  if (n == 0) return 0;
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), n + k - 1, k);
  return out;
}

std::string format_rational(const Rational& q) { return q.get_num().get_str() + "/" + q.get_den().get_str(); }

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  BigInt num, den = 1;
  auto parse_int = [&](std::string_view part, BigInt& out) {
    if (part.empty() || out.set_str(std::string(part), 10) != 0)
      throw InvalidInputError("malformed rational '" + std::string(text) + "'");
  };
  parse_int(text.substr(0, slash), num);
  if (slash != std::string_view::npos) parse_int(text.substr(slash + 1), den);
  if (sgn(den) == 0) throw InvalidInputError("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string format_scalar(const Scalar& s) {
  if (const auto* q = std::get_if<Rational>(&s)) return format_rational(*q);
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, std::get<double>(s));
  return std::string(buf, end);
}

}  // namespace racsep
