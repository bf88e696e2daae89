#include <gtest/gtest.h>

#include "oracles.hpp"
#include "racsep/builders.hpp"
#include "racsep/linalg.hpp"
#include "racsep/verification.hpp"

using namespace racsep;

namespace {

// Direct sum over every chain of hidden indices k_0..k_T.
Rational tt_chain_entry(const RacParams& p, std::size_t c, const std::vector<std::size_t>& d) {
  const auto R = p.hidden(), M = p.input_dim(), T = d.size();
  const auto& wi = p.w_in(0).values<Rational>();
  const auto& wh = p.w_hidden(0).values<Rational>();
  const auto& wo = p.w_out().values<Rational>();
  const auto& h0 = p.h0(0).values<Rational>();
  Rational total = 0;
  oracle::for_each_index(DenseTensor::Dims(T + 1, R), [&](const std::vector<std::size_t>& k) {
    Rational term = h0[k[0]] * wo[c * R + k[T]];
    for (std::size_t t = 1; t <= T; ++t) term *= wh[k[t] * R + k[t - 1]] * wi[k[t] * M + d[t - 1]];
    total += term;
  });
  return total;
}

Rational entry(const DenseTensor& t, const std::vector<std::size_t>& idx) { return std::get<Rational>(t.at(idx)); }

}  // namespace

TEST(WeightsTensor, SingleChannelOnesGivesOnes) {
  const auto one = DenseTensor::matrix(1, 1, std::vector<Rational>{1});
  const RacParams p({DenseTensor::matrix(1, 2, std::vector<Rational>{1, 1})}, {one}, one, {ones(1, Field::Exact)});
  const auto w = build_weights_tensor(p, 0, 2);
  EXPECT_EQ(w.tensor, DenseTensor({2, 2}, std::vector<Rational>(4, Rational(1))));
  EXPECT_EQ(w.tt_rank, 1u);
}

TEST(WeightsTensor, MatchesChainSumOracle) {
  Rng rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    const auto base = random_rac_params(1, 2, 2, 2, Field::Exact, rng);
    // A non-default h0 exercises the general initial state.
    const RacParams p({base.w_in(0)}, {base.w_hidden(0)}, base.w_out(),
                      {random_matrix(2, 1, Field::Exact, rng).reshaped({2})});
    for (std::size_t c = 0; c < 2; ++c) {
      const auto w = build_weights_tensor(p, c, 4);
      oracle::for_each_index(w.tensor.dims(), [&](const std::vector<std::size_t>& d) {
        EXPECT_EQ(entry(w.tensor, d), tt_chain_entry(p, c, d));
      });
    }
  }
}

TEST(WeightsTensor, ShallowRankOnFixedDraw) {
  Rng rng(trial_seed(7, 0));
  const auto p = random_rac_params(1, 2, 2, 1, Field::Exact, rng);
  EXPECT_EQ(start_end_rank(build_weights_tensor(p, 0, 4).tensor).rank, 2u);
}

TEST(WeightsTensor, Preconditions) {
  Rng rng(5);
  const auto p = random_rac_params(1, 2, 2, 1, Field::Exact, rng);
  EXPECT_THROW((void)build_weights_tensor(p, 0, 1), ParameterError);
  EXPECT_THROW((void)build_weights_tensor(p, 1, 4), ParameterError);
  const RacParams singular({p.w_in(0)}, {DenseTensor::matrix(2, 2, std::vector<Rational>{1, 2, 2, 4})}, p.w_out(),
                           {p.h0(0)});
  EXPECT_THROW((void)build_weights_tensor(singular, 0, 4), ParameterError);
  EXPECT_THROW((void)build_weights_tensor(random_rac_params(2, 2, 2, 1, Field::Exact, rng), 0, 4), ParameterError);
}

TEST(ScoreFromTensor, IndicatorEncodingIsLookup) {
  Rng rng(12);
  const auto p = random_rac_params(1, 3, 3, 1, Field::Exact, rng);
  const auto w = build_weights_tensor(p, 0, 4);
  const auto enc = TemplateEncoder::identity(3, Field::Exact);
  oracle::for_each_index(w.tensor.dims(), [&](const std::vector<std::size_t>& d) {
    EXPECT_EQ(std::get<Rational>(score_from_tensor(w, enc, {d})), entry(w.tensor, d));
  });
}

TEST(ScoreFromTensor, EqualsForwardOnRandomPairs) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_rac_params(1, 2, 3, 1, Field::Exact, rng);
    auto f = random_matrix(3, 3, Field::Exact, rng);
    while (!is_invertible(f)) f = random_matrix(3, 3, Field::Exact, rng);
    const TemplateEncoder enc(f);
    InputSequence seq;
    for (int t = 0; t < 4; ++t) seq.symbols.push_back(static_cast<std::size_t>(rng.uniform_int(0, 2)));
    const auto w = build_weights_tensor(p, 0, 4);
    EXPECT_EQ(std::get<Rational>(score_from_tensor(w, enc, seq)),
              std::get<Rational>(forward_shallow(p, Nonlinearity::rac(), enc, seq).flat(0)));
  }
}

TEST(ScoreFromTensor, ZeroTensorScoresZero) {
  const WeightsTensor w{DenseTensor::zeros({2, 2, 2}, Field::Exact), 0, 1};
  EXPECT_EQ(std::get<Rational>(score_from_tensor(w, TemplateEncoder::identity(2, Field::Exact), {{0, 1, 1}})), 0);
}

TEST(GridTensor, EntriesAreForwardEvaluations) {
  Rng rng(31);
  const auto p = random_rac_params(2, 2, 3, 2, Field::Exact, rng);
  const auto enc = TemplateEncoder::identity(3, Field::Exact);
  for (std::size_t c = 0; c < 2; ++c) {
    const auto g = build_grid_tensor(p, Nonlinearity::rac(), enc, c, 3);
    EXPECT_EQ(g.provenance.depth, 2u);
    EXPECT_EQ(g.provenance.class_index, c);
    oracle::for_each_index(g.tensor.dims(), [&](const std::vector<std::size_t>& d) {
      EXPECT_EQ(entry(g.tensor, d), std::get<Rational>(forward_deep(p, Nonlinearity::rac(), enc, {d}).flat(c)));
    });
  }
}

TEST(GridTensor, ShallowGridRankEqualsWeightsRank) {
  Rng rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const auto M = trial % 2 ? 2u : 3u;
    const auto p = random_rac_params(1, 2, M, 1, Field::Exact, rng);
    const auto g = build_grid_tensor(p, Nonlinearity::rac(), TemplateEncoder::identity(M, Field::Exact), 0, 4);
    EXPECT_EQ(g.tensor, build_weights_tensor(p, 0, 4).tensor);
    EXPECT_EQ(start_end_rank(g.tensor).rank, start_end_rank(build_weights_tensor(p, 0, 4).tensor).rank);
  }
}

TEST(GridTensor, ConstantAdditiveNetwork) {
  Rng rng(33);
  const auto p = random_rac_params(1, 3, 2, 1, Field::Exact, rng);
  const RacParams q({DenseTensor::zeros({3, 2}, Field::Exact)}, {p.w_hidden(0)}, p.w_out(), {p.h0(0)});
  const auto g = build_grid_tensor(q, Nonlinearity::rnn(Nonlinearity::Activation::Identity),
                                   TemplateEncoder::identity(2, Field::Exact), 0, 4);
  const auto& v = g.tensor.values<Rational>();
  for (const auto& x : v) EXPECT_EQ(x, v.front());
}

TEST(GridTensor, WitnessRankTwoTwoFour) {
  const auto w = make_witness(2, 2, 4);
  const auto g = build_grid_tensor(w.params, Nonlinearity::rac(), w.encoder, 0, 4);
  EXPECT_EQ(start_end_rank(g.tensor).rank, 3u);
}

TEST(GridTensor, BudgetExceeded) {
  Rng rng(34);
  const auto p = random_rac_params(1, 2, 3, 1, Field::Float64, rng);
  Budgets tight;
  tight.grid_entries = 80;
  try {
    (void)build_grid_tensor(p, Nonlinearity::rac(), TemplateEncoder::identity(3, Field::Float64), 0, 4, tight);
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_EQ(e.required(), 81.0);
  }
}

TEST(GridTensor, ShallowGridIsMultilinearInEncoder) {
  // G_F = G_I x_1 F x_2 F ... x_T F for any encoder F.
  Rng rng(35);
  const auto p = random_rac_params(1, 2, 2, 1, Field::Exact, rng);
  auto f = random_matrix(2, 2, Field::Exact, rng);
  while (!is_invertible(f)) f = random_matrix(2, 2, Field::Exact, rng);
  const auto gi = build_grid_tensor(p, Nonlinearity::rac(), TemplateEncoder::identity(2, Field::Exact), 0, 3).tensor;
  const auto gf = build_grid_tensor(p, Nonlinearity::rac(), TemplateEncoder(f), 0, 3).tensor;
  oracle::for_each_index(gf.dims(), [&](const std::vector<std::size_t>& d) {
    Rational sum = 0;
    oracle::for_each_index(gi.dims(), [&](const std::vector<std::size_t>& e) {
      Rational term = entry(gi, e);
      for (std::size_t t = 0; t < 3; ++t) term *= entry(f, {d[t], e[t]});
      sum += term;
    });
    EXPECT_EQ(entry(gf, d), sum);
  });
}

TEST(ContentHash, StableAndSensitive) {
  Rng a(40), b(40), c(41);
  const auto pa = random_rac_params(1, 2, 2, 1, Field::Exact, a);
  const auto pb = random_rac_params(1, 2, 2, 1, Field::Exact, b);
  const auto pc = random_rac_params(1, 2, 2, 1, Field::Exact, c);
  EXPECT_EQ(content_hash(pa), content_hash(pb));
  EXPECT_NE(content_hash(pa), content_hash(pc));
}
