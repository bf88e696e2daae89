#include "racsep/random.hpp"

namespace racsep {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(base) ^ (index * 0xd1b54a32d192ed03ULL));
}

long Rng::uniform_int(long lo, long hi) {
  // Rejection sampling keeps the draw unbiased and independent of the
  // standard library's distribution implementation.
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<long>(x % span);
}

double Rng::uniform_real(double lo, double hi) {
  const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

DenseTensor random_matrix(std::size_t rows, std::size_t cols, Field field, Rng& rng) {
  if (field == Field::Exact) {
    std::vector<Rational> v(rows * cols);
    for (auto& x : v) x = rng.uniform_int(-kExactDrawBound, kExactDrawBound);
    return DenseTensor::matrix(rows, cols, std::move(v));
  }
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = rng.uniform_real(-1.0, 1.0);
  return DenseTensor::matrix(rows, cols, std::move(v));
}

}  // namespace racsep
