#pragma once

// Executable checks of the separation-rank results. Every randomized check
// draws trial i from Rng(trial_seed(opts.seed, i)) and records that derived
// seed in its report rows, so any single row can be replayed.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "racsep/builders.hpp"
#include "racsep/rac.hpp"
#include "racsep/report.hpp"
#include "racsep/tensor.hpp"
#include "racsep/tensor_network.hpp"

namespace racsep {

struct RunOptions {
  std::uint64_t seed = 0;
  double rel_tol = kDefaultRelTol;
  Budgets budgets{};
};

/// Fraction of draws a generic law must hold on.
inline constexpr double kPrevalenceThreshold = 0.95;
/// Relative error allowed between float contraction and forward evaluation.
inline constexpr double kEquivalenceRelTol = 1e-10;

struct CheckSummary {
  std::string check;
  bool ok = true;
  std::size_t trials = 0;
  std::size_t hits = 0;
  std::vector<ReportRow> rows;
};

/// min{R, M^(T/2)}.
[[nodiscard]] BigInt shallow_rank_law(std::size_t M, std::size_t R, std::size_t T);
/// multiset(min{M, R}, T/2).
[[nodiscard]] BigInt deep_rank_bound(std::size_t M, std::size_t R, std::size_t T);
/// min{multiset(min{M, R}, multiset(T/2, L-1)), M^(T/2)}.
[[nodiscard]] BigInt conjecture_bound(std::size_t M, std::size_t R, std::size_t T, std::size_t L);

/// Rank of the Start-End matricization.
[[nodiscard]] RankReport start_end_rank(const DenseTensor& t, double rel_tol = kDefaultRelTol);

/// Depth-2 parameters whose grid tensor has Start-End rank exactly
/// multiset(min{M, R}, T/2). Z has Z(i, j) = z^(Omega^(i+1)) for i == j,
/// 1 for i != j while i < M, and 0 on rows i >= M.
struct WitnessAssignment {
  Rational z;
  unsigned long omega;
  std::size_t M, R, T;
  DenseTensor z_matrix;
  TemplateEncoder encoder;
  RacParams params;
};

[[nodiscard]] unsigned long default_omega(std::size_t T);

/// omega == 0 selects default_omega(T). Requires Omega > (T/2)^2 and z != 0.
[[nodiscard]] WitnessAssignment make_witness(std::size_t M, std::size_t R, std::size_t T, const Rational& z = 2,
                                             unsigned long omega = 0);
[[nodiscard]] WitnessAssignment make_witness(std::size_t M, std::size_t R, std::size_t T, const Rational& z,
                                             unsigned long omega, const TemplateEncoder& encoder);

/// Numbers of balls of each color; colors are 0-based.
using BucketState = std::vector<std::size_t>;

/// All states holding `balls` balls of `colors` colors, lexicographic order.
[[nodiscard]] std::vector<BucketState> bucket_states(std::size_t colors, std::size_t balls);

/// Every way to empty the bucket one ball at a time. Each trajectory lists
/// the intermediate states p(K-1), ..., p(1).
[[nodiscard]] std::vector<std::vector<BucketState>> bucket_trajectories(const BucketState& start);

/// max over trajectories of sum_j Omega^(d_j + 1) * (balls of color d_j held
/// before the j-th removal). d is a color sequence of length K = sum(start).
[[nodiscard]] BigInt bucket_reward(const std::vector<std::size_t>& d, const BucketState& start, unsigned long omega);

struct DecompositionResult {
  std::size_t entries = 0;
  std::size_t mismatches = 0;
  std::size_t nonzero_terms = 0;
};

/// Compares prod_{t>T/2} sum_r prod_{j<=t} Z(r, d_j) with its expansion over
/// bucket states and trajectories at every index (d_1..d_T).
[[nodiscard]] DecompositionResult decomposition_identity(const DenseTensor& z_matrix, std::size_t T);

/// True when sum_i <v_i, v_sigma(i)> < sum_i |v_i|^2 for every sigma != id.
[[nodiscard]] bool rearrangement_strict(const std::vector<std::vector<long>>& vectors);

[[nodiscard]] CheckSummary verify_shallow_rank_law(std::size_t M, std::size_t R, std::size_t T, std::size_t trials,
                                                   Field field, const RunOptions& opts = {});
[[nodiscard]] CheckSummary verify_deep_lower_bound(std::size_t M, std::size_t R, std::size_t T, std::size_t trials,
                                                   const RunOptions& opts = {});
[[nodiscard]] CheckSummary check_claim1_equality(std::size_t M, std::size_t R, std::size_t T, std::size_t trials,
                                                 const RunOptions& opts = {});
[[nodiscard]] CheckSummary verify_min_cut_certificate(std::size_t M, std::size_t R, std::size_t T,
                                                      std::size_t trials, const RunOptions& opts = {});
[[nodiscard]] CheckSummary check_mps_equivalence(std::size_t M, std::size_t R, std::size_t T, std::size_t trials,
                                                 const RunOptions& opts = {});
[[nodiscard]] CheckSummary check_deep_tn_equivalence(std::size_t M, std::size_t R, std::size_t T, std::size_t L,
                                                     std::size_t trials, Field field, const RunOptions& opts = {});
[[nodiscard]] CheckSummary check_basic_units(std::size_t L, std::size_t T);
/// Random exact Z of shape Rbar x M, plus the witness Z when Rbar >= 1.
[[nodiscard]] CheckSummary check_decomposition_identity(std::size_t M, std::size_t Rbar, std::size_t T,
                                                        const RunOptions& opts = {});
[[nodiscard]] CheckSummary check_rearrangement_lemma(std::size_t N, std::size_t Rbar, std::size_t trials,
                                                     const RunOptions& opts = {});
/// omega == 0 selects default_omega(T).
[[nodiscard]] CheckSummary check_bucket_lemma(std::size_t Rbar, std::size_t T, unsigned long omega = 0);
[[nodiscard]] CheckSummary check_hadamard_rank_bound(std::size_t trials, const RunOptions& opts = {});
[[nodiscard]] CheckSummary check_no_clone(std::size_t P);

enum class RankFamily { Shallow, Deep, Constant };
[[nodiscard]] std::string_view to_string(RankFamily f) noexcept;
[[nodiscard]] RankFamily parse_rank_family(std::string_view text);

/// Share of draws reaching the largest observed rank must be at least 95%.
[[nodiscard]] CheckSummary check_polynomial_rank_prevalence(RankFamily family, std::size_t M, std::size_t R,
                                                            std::size_t T, std::size_t trials,
                                                            const RunOptions& opts = {});

/// Observed ranks are reported against the conjectured bound, never asserted.
/// Only the dimension cap rank <= M^(T/2) decides `ok`.
[[nodiscard]] CheckSummary check_conjecture_bound(std::size_t M, std::size_t R, std::size_t T, std::size_t L,
                                                  std::size_t trials, Field field, const RunOptions& opts = {});

/// Extra columns of scan rows.
[[nodiscard]] std::vector<std::string> scan_columns();

/// One random draw for a sweep cell. L = 1 rows assert the exact law and carry
/// the MPS min cut; L = 2 rows assert the lower bound; deeper rows are reported.
[[nodiscard]] ReportRow scan_cell(std::size_t M, std::size_t R, std::size_t T, std::size_t L, Field field,
                                  std::uint64_t cell_seed, const RunOptions& opts = {});

}  // namespace racsep
