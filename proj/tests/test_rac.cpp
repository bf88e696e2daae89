#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "racsep/builders.hpp"
#include "racsep/linalg.hpp"
#include "racsep/rac.hpp"

using namespace racsep;

namespace {

DenseTensor q1(long v) { return DenseTensor::matrix(1, 1, std::vector<Rational>{v}); }

InputSequence random_sequence(Rng& rng, std::size_t M, std::size_t T) {
  InputSequence s;
  for (std::size_t t = 0; t < T; ++t) s.symbols.push_back(static_cast<std::size_t>(rng.uniform_int(0, long(M) - 1)));
  return s;
}

TemplateEncoder random_encoder(Rng& rng, std::size_t M, Field field) {
  while (true) {
    auto f = random_matrix(M, M, field, rng);
    if (is_invertible(f)) return TemplateEncoder(std::move(f));
  }
}

}  // namespace

TEST(ForwardShallow, ScalarProductChain) {
  const RacParams p({q1(1)}, {q1(1)}, q1(1), {DenseTensor::vector(std::vector<Rational>{1})});
  const TemplateEncoder enc(q1(5));
  const auto y = forward_shallow(p, Nonlinearity::rac(), enc, {{0, 0, 0}});
  EXPECT_EQ(y, DenseTensor::vector(std::vector<Rational>{125}));
}

TEST(ForwardShallow, ZeroInputWeightsAnnihilate) {
  Rng rng(1);
  auto p = random_rac_params(1, 3, 2, 2, Field::Exact, rng);
  const RacParams z({DenseTensor::zeros({3, 2}, Field::Exact)}, {p.w_hidden(0)}, p.w_out(), {p.h0(0)});
  const auto enc = TemplateEncoder::identity(2, Field::Exact);
  for (std::size_t T = 1; T <= 4; ++T)
    EXPECT_EQ(forward_shallow(z, Nonlinearity::rac(), enc, random_sequence(rng, 2, T)),
              DenseTensor::zeros({2}, Field::Exact));
}

TEST(ForwardShallow, MatchesClosedFormScore) {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_rac_params(1, 2, 2, 1, Field::Exact, rng);
    const auto enc = random_encoder(rng, 2, Field::Exact);
    const auto w = build_weights_tensor(p, 0, 4);
    const auto seq = random_sequence(rng, 2, 4);
    const auto y = forward_shallow(p, Nonlinearity::rac(), enc, seq);
    EXPECT_EQ(std::get<Rational>(y.flat(0)), std::get<Rational>(score_from_tensor(w, enc, seq)));
  }
}

TEST(ForwardShallow, RejectsDeepNetworksAndBadSymbols) {
  Rng rng(2);
  const auto deep = random_rac_params(2, 2, 2, 1, Field::Exact, rng);
  const auto enc = TemplateEncoder::identity(2, Field::Exact);
  EXPECT_THROW((void)forward_shallow(deep, Nonlinearity::rac(), enc, {{0}}), ParameterError);
  const auto p = random_rac_params(1, 2, 2, 1, Field::Exact, rng);
  EXPECT_THROW((void)forward_shallow(p, Nonlinearity::rac(), enc, {{2}}), InvalidInputError);
  EXPECT_THROW((void)forward_shallow(p, Nonlinearity::rac(), TemplateEncoder::identity(3, Field::Exact), {{0}}),
               ParameterError);
  EXPECT_THROW((void)forward_shallow(p, Nonlinearity::rnn(Nonlinearity::Activation::Tanh), enc, {{0}}),
               ParameterError);
}

TEST(RacParams, ShapeAndFieldValidation) {
  const auto wi = DenseTensor::zeros({2, 3}, Field::Exact);
  const auto wh = identity_matrix(2, Field::Exact);
  const auto wo = DenseTensor::zeros({1, 2}, Field::Exact);
  const auto h0 = ones(2, Field::Exact);
  EXPECT_NO_THROW(RacParams({wi}, {wh}, wo, {h0}));
  EXPECT_THROW(RacParams({wi}, {wh, wh}, wo, {h0}), ParameterError);
  EXPECT_THROW(RacParams({wi}, {identity_matrix(3, Field::Exact)}, wo, {h0}), ParameterError);
  EXPECT_THROW(RacParams({wi, wi}, {wh, wh}, wo, {h0, h0}), ParameterError);
  EXPECT_THROW(RacParams({wi}, {wh}, wo, {ones(3, Field::Exact)}), ParameterError);
  EXPECT_THROW(RacParams({wi}, {identity_matrix(2, Field::Float64)}, wo, {h0}), FieldMismatchError);
  EXPECT_THROW((void)RacParams::with_default_h0({wi}, {DenseTensor::zeros({2, 2}, Field::Exact)}, wo),
               ParameterError);
}

TEST(RacParams, DefaultInitialStateGivesOnes) {
  Rng rng(9);
  const auto p = random_rac_params(2, 3, 2, 1, Field::Exact, rng);
  for (std::size_t l = 0; l < 2; ++l) EXPECT_EQ(matvec(p.w_hidden(l), p.h0(l)), ones(3, Field::Exact));
}

TEST(TemplateEncoder, RejectsSingular) {
  EXPECT_THROW(TemplateEncoder(DenseTensor::matrix(2, 2, std::vector<Rational>{1, 2, 2, 4})), ParameterError);
  EXPECT_THROW(TemplateEncoder(DenseTensor::zeros({2, 3}, Field::Exact)), ParameterError);
}

TEST(ForwardDeep, TwoStepDuplicationFormula) {
  Rng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_rac_params(2, 3, 2, 2, Field::Exact, rng);
    const auto enc = random_encoder(rng, 2, Field::Exact);
    const auto seq = random_sequence(rng, 2, 2);
    const auto f1 = enc.encode(seq.symbols[0]), f2 = enc.encode(seq.symbols[1]);
    const auto h11 = matvec(p.w_in(0), f1);
    const auto h21 = hadamard(matvec(p.w_hidden(0), h11), matvec(p.w_in(0), f2));
    const auto h22 = hadamard(matvec(p.w_hidden(1), matvec(p.w_in(1), h11)), matvec(p.w_in(1), h21));
    EXPECT_EQ(forward_deep(p, Nonlinearity::rac(), enc, seq), matvec(p.w_out(), h22));
  }
}

TEST(ForwardDeep, ZeroLayerAnnihilates) {
  Rng rng(3);
  const auto p = random_rac_params(3, 2, 2, 1, Field::Exact, rng);
  const RacParams z({p.w_in(0), DenseTensor::zeros({2, 2}, Field::Exact), p.w_in(2)},
                    {p.w_hidden(0), p.w_hidden(1), p.w_hidden(2)}, p.w_out(), {p.h0(0), p.h0(1), p.h0(2)});
  EXPECT_EQ(forward_deep(z, Nonlinearity::rac(), TemplateEncoder::identity(2, Field::Exact), {{1, 0, 1}}),
            DenseTensor::zeros({1}, Field::Exact));
}

TEST(ForwardDeep, DepthOneEqualsShallow) {
  Rng rng(20);
  for (int trial = 0; trial < 20; ++trial) {
    const auto field = trial % 2 ? Field::Exact : Field::Float64;
    const auto p = random_rac_params(1, 3, 3, 2, field, rng);
    const auto enc = random_encoder(rng, 3, field);
    const auto seq = random_sequence(rng, 3, 5);
    EXPECT_EQ(forward_deep(p, Nonlinearity::rac(), enc, seq), forward_shallow(p, Nonlinearity::rac(), enc, seq));
  }
}

TEST(ForwardAllTimesteps, LastAndPrefix) {
  Rng rng(8);
  const auto p = random_rac_params(2, 2, 3, 2, Field::Exact, rng);
  const auto enc = TemplateEncoder::identity(3, Field::Exact);
  const auto seq = random_sequence(rng, 3, 6);
  const auto all = forward_all_timesteps(p, Nonlinearity::rac(), enc, seq);
  ASSERT_EQ(all.size(), 6u);
  EXPECT_EQ(all.back(), forward_deep(p, Nonlinearity::rac(), enc, seq));
  for (std::size_t k = 1; k <= 6; ++k) {
    InputSequence prefix{std::vector<std::size_t>(seq.symbols.begin(), seq.symbols.begin() + k)};
    EXPECT_EQ(forward_deep(p, Nonlinearity::rac(), enc, prefix), all[k - 1]);
  }
  EXPECT_EQ(forward_all_timesteps(p, Nonlinearity::rac(), enc, {{2}}).size(), 1u);
}

TEST(ForwardShallow, MultilinearInOneStep) {
  Rng rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_rac_params(1, 3, 3, 1, Field::Float64, rng);
    const auto f = random_encoder(rng, 3, Field::Float64);
    const double alpha = rng.uniform_real(-3.0, 3.0);
    // Scale the encoding of symbol 2 only; it appears once in the sequence.
    auto scaled = f.matrix().values<double>();
    for (std::size_t j = 0; j < 3; ++j) scaled[2 * 3 + j] *= alpha;
    const TemplateEncoder g(DenseTensor::matrix(3, 3, scaled));
    const InputSequence seq{{0, 1, 2, 0, 1}};
    const double y = std::get<double>(forward_shallow(p, Nonlinearity::rac(), f, seq).flat(0));
    const double ys = std::get<double>(forward_shallow(p, Nonlinearity::rac(), g, seq).flat(0));
    EXPECT_NEAR(ys, alpha * y, 1e-12 * (1.0 + std::abs(alpha * y)));
  }
}

TEST(ForwardShallow, HiddenChannelPermutationInvariant) {
  Rng rng(66);
  const std::size_t R = 4;
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_rac_params(1, R, 2, 2, Field::Exact, rng);
    std::vector<std::size_t> sigma{2, 0, 3, 1};
    std::vector<Rational> pm(R * R, Rational(0));
    for (std::size_t i = 0; i < R; ++i) pm[i * R + sigma[i]] = 1;
    const auto P = DenseTensor::matrix(R, R, pm);
    const auto Pt = transpose(P);
    const RacParams q({matmul(P, p.w_in(0))}, {matmul(matmul(P, p.w_hidden(0)), Pt)}, matmul(p.w_out(), Pt),
                      {matvec(P, p.h0(0))});
    const auto enc = TemplateEncoder::identity(2, Field::Exact);
    const auto seq = random_sequence(rng, 2, 5);
    EXPECT_EQ(forward_shallow(p, Nonlinearity::rac(), enc, seq), forward_shallow(q, Nonlinearity::rac(), enc, seq));
  }
}

TEST(Nonlinearity, AdditiveVariant) {
  const RacParams p({q1(2)}, {q1(3)}, q1(1), {DenseTensor::vector(std::vector<Rational>{1})});
  const TemplateEncoder enc(q1(1));
  // h1 = 3*1 + 2*1 = 5, h2 = 3*5 + 2 = 17.
  const auto y = forward_shallow(p, Nonlinearity::rnn(Nonlinearity::Activation::Identity), enc, {{0, 0}});
  EXPECT_EQ(y, DenseTensor::vector(std::vector<Rational>{17}));
  const auto yf = forward_shallow(p.to_float(), Nonlinearity::rnn(Nonlinearity::Activation::Tanh),
                                  TemplateEncoder(q1(1).to_float()), {{0}});
  EXPECT_DOUBLE_EQ(std::get<double>(yf.flat(0)), std::tanh(5.0));
}
