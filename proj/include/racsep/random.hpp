#pragma once

#include <cstdint>
#include <random>

#include "racsep/tensor.hpp"

namespace racsep {

/// Derives the seed of trial `index` from a run seed (splitmix64 mixing), so
/// trials can be drawn in any order and still reproduce.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the closed range [lo, hi].
  [[nodiscard]] long uniform_int(long lo, long hi);
  /// Uniform on [lo, hi) with 53 random bits.
  [[nodiscard]] double uniform_real(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

inline constexpr long kExactDrawBound = 9;

/// Exact field: iid integers in [-9, 9]. Float field: iid uniform on [-1, 1].
[[nodiscard]] DenseTensor random_matrix(std::size_t rows, std::size_t cols, Field field, Rng& rng);

}  // namespace racsep
