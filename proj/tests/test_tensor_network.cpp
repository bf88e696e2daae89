#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "racsep/linalg.hpp"
#include "racsep/serialization.hpp"
#include "racsep/tensor_network.hpp"

using namespace racsep;

namespace {

Rational entry(const DenseTensor& t, const std::vector<std::size_t>& idx) { return std::get<Rational>(t.at(idx)); }

InputSequence random_sequence(Rng& rng, std::size_t m, std::size_t steps) {
  InputSequence seq;
  for (std::size_t t = 0; t < steps; ++t) seq.symbols.push_back(static_cast<std::size_t>(rng.uniform_int(0, int(m) - 1)));
  return seq;
}

// Contracts the open input legs of an already-contracted network by brute force.
std::vector<Rational> score_open_result(const TnGraph& g, const DenseTensor& open, const TemplateEncoder& enc,
                                        const InputSequence& seq, std::size_t classes) {
  std::vector<Rational> scores(classes, 0);
  oracle::for_each_index(open.dims(), [&](const std::vector<std::size_t>& idx) {
    Rational term = entry(open, idx);
    std::size_t cls = 0;
    for (std::size_t i = 0; i < idx.size() && term != 0; ++i) {
      const auto& leg = g.open_legs()[i];
      if (leg.side == LegSide::Output) {
        cls = idx[i];
      } else {
        term *= entry(enc.matrix(), {seq.symbols[leg.time_index], idx[i]});
      }
    }
    scores[cls] += term;
  });
  return scores;
}

std::vector<Rational> as_rationals(const DenseTensor& t) { return t.values<Rational>(); }

TnGraph two_node_graph(std::size_t start_dim, std::size_t bond, std::size_t end_dim) {
  Rng rng(3);
  TnGraph g;
  const auto a = g.add_node("a", oracle::random_exact(rng, {start_dim, bond}));
  const auto b = g.add_node("b", oracle::random_exact(rng, {bond, end_dim}));
  g.connect(a, 1, b, 0);
  g.add_open_leg(a, 0, 0, LegSide::Start);
  g.add_open_leg(b, 1, 1, LegSide::End);
  return g;
}

}  // namespace

TEST(Delta, SuperDiagonal) {
  const auto d = delta_tensor(3, Field::Exact);
  oracle::for_each_index(d.dims(), [&](const std::vector<std::size_t>& i) {
    EXPECT_EQ(entry(d, i), (i[0] == i[1] && i[1] == i[2]) ? 1 : 0);
  });
}

TEST(Mps, ContractsToWeightsTensor) {
  Rng rng(1);
  for (std::size_t steps : {2u, 3u, 4u, 6u}) {
    const auto p = random_rac_params(1, 2, 3, 2, Field::Exact, rng);
    for (std::size_t c = 0; c < 2; ++c) {
      const auto g = build_mps(p, steps, c);
      g.validate();
      ASSERT_EQ(g.open_legs().size(), steps);
      for (std::size_t t = 0; t < steps; ++t) {
        EXPECT_EQ(g.open_legs()[t].time_index, t);
        EXPECT_EQ(g.open_legs()[t].side, t < steps / 2 ? LegSide::Start : LegSide::End);
      }
      EXPECT_EQ(contract(g), build_weights_tensor(p, c, steps).tensor);
    }
  }
}

TEST(Mps, MinCutLaw) {
  for (std::size_t R = 1; R <= 4; ++R)
    for (std::size_t M = 1; M <= 4; ++M)
      for (std::size_t T = 2; T <= 8; T += 2) {
        Rng rng(R * 100 + M * 10 + T);
        const auto g = build_mps(random_rac_params(1, R, M, 1, Field::Float64, rng), T);
        BigInt power = 1;
        for (std::size_t i = 0; i < T / 2; ++i) power *= static_cast<unsigned long>(M);
        const BigInt expected = power < R ? power : BigInt(static_cast<unsigned long>(R));
        EXPECT_EQ(min_cut(g).value, expected) << "R=" << R << " M=" << M << " T=" << T;
      }
}

TEST(Mps, MinCutExample) {
  Rng rng(2);
  const auto cut = min_cut(build_mps(random_rac_params(1, 2, 3, 1, Field::Exact, rng), 4));
  EXPECT_EQ(cut.value, 2);
  BigInt product = 1;
  for (const auto& e : cut.edges) product *= static_cast<unsigned long>(e.dim);
  EXPECT_EQ(product, cut.value);
}

TEST(MinCut, TwoNodes) {
  EXPECT_EQ(min_cut(two_node_graph(3, 2, 5)).value, 2);
  EXPECT_EQ(min_cut(two_node_graph(3, 4, 5)).value, 3);
  const auto cut = min_cut(two_node_graph(6, 4, 3));
  EXPECT_EQ(cut.value, 3);
  ASSERT_EQ(cut.edges.size(), 1u);
  EXPECT_EQ(cut.edges[0].kind, CutEdge::Kind::OpenLeg);
  EXPECT_EQ(cut.edges[0].index, 1u);
}

TEST(MinCut, ProductOverParallelBonds) {
  Rng rng(4);
  TnGraph g;
  const auto a = g.add_node("a", oracle::random_exact(rng, {7, 2, 3}));
  const auto b = g.add_node("b", oracle::random_exact(rng, {2, 3, 7}));
  g.connect(a, 1, b, 0);
  g.connect(a, 2, b, 1);
  g.add_open_leg(a, 0, 0, LegSide::Start);
  g.add_open_leg(b, 2, 1, LegSide::End);
  EXPECT_EQ(min_cut(g).value, 6);
}

TEST(UnitCell, HadamardOfHiddenAndInput) {
  Rng rng(5);
  const auto p = random_rac_params(1, 3, 2, 1, Field::Exact, rng);
  const auto g = build_unit_cell(p);
  g.validate();
  ASSERT_EQ(g.open_legs().size(), 3u);
  EXPECT_EQ(g.open_legs()[0].side, LegSide::Output);
  EXPECT_EQ(g.open_legs()[1].side, LegSide::Start);
  EXPECT_EQ(g.open_legs()[2].side, LegSide::Output);
  const auto h = oracle::random_exact(rng, {3});
  const auto f = oracle::random_exact(rng, {2});
  const auto out = contract(attach_vector(attach_vector(g, 0, h), 0, f));
  EXPECT_EQ(out, hadamard(matvec(p.w_hidden(0), h), matvec(p.w_in(0), f)));
}

TEST(Contract, MatrixVector) {
  Rng rng(6);
  const auto m = oracle::random_exact(rng, {2, 3});
  const auto v = oracle::random_exact(rng, {3});
  TnGraph g;
  const auto a = g.add_node("m", m);
  const auto b = g.add_node("v", v);
  g.connect(a, 1, b, 0);
  g.add_open_leg(a, 0, 0, LegSide::Output);
  EXPECT_EQ(contract(g), matvec(m, v));
}

TEST(Contract, SingleNodeIsItself) {
  Rng rng(7);
  const auto t = oracle::random_exact(rng, {2, 3, 2});
  TnGraph g;
  const auto a = g.add_node("t", t);
  for (std::size_t i = 0; i < 3; ++i) g.add_open_leg(a, i, i, LegSide::Start);
  EXPECT_EQ(contract(g), t);
}

TEST(Contract, OpenLegOrderDecidesModes) {
  Rng rng(8);
  const auto t = oracle::random_exact(rng, {2, 3});
  TnGraph g;
  const auto a = g.add_node("t", t);
  g.add_open_leg(a, 1, 0, LegSide::Start);
  g.add_open_leg(a, 0, 1, LegSide::End);
  EXPECT_EQ(contract(g), transpose(t));
}

TEST(Contract, ThreeNodeChainMatchesLoops) {
  Rng rng(9);
  const auto a = oracle::random_exact(rng, {2, 3});
  const auto b = oracle::random_exact(rng, {3, 2, 4});
  const auto c = oracle::random_exact(rng, {4, 3});
  TnGraph g;
  const auto na = g.add_node("a", a), nb = g.add_node("b", b), nc = g.add_node("c", c);
  g.connect(na, 1, nb, 0);
  g.connect(nb, 2, nc, 0);
  g.add_open_leg(na, 0, 0, LegSide::Start);
  g.add_open_leg(nb, 1, 1, LegSide::Start);
  g.add_open_leg(nc, 1, 2, LegSide::End);
  const auto out = contract(g);
  ASSERT_EQ(out.dims(), (DenseTensor::Dims{2, 2, 3}));
  oracle::for_each_index(out.dims(), [&](const std::vector<std::size_t>& i) {
    Rational sum = 0;
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 4; ++k) sum += entry(a, {i[0], j}) * entry(b, {j, i[1], k}) * entry(c, {k, i[2]});
    EXPECT_EQ(entry(out, i), sum);
  });
}

TEST(Contract, ClosedNetworkIsScalar) {
  Rng rng(10);
  const auto u = oracle::random_exact(rng, {3});
  const auto v = oracle::random_exact(rng, {3});
  TnGraph g;
  g.connect(g.add_node("u", u), 0, g.add_node("v", v), 0);
  const auto out = contract(g);
  Rational dot = 0;
  for (std::size_t i = 0; i < 3; ++i) dot += entry(u, {i}) * entry(v, {i});
  EXPECT_EQ(out.dims(), DenseTensor::Dims{1});
  EXPECT_EQ(entry(out, {0}), dot);
}

TEST(Contract, BudgetExceeded) {
  Rng rng(11);
  const auto g = build_mps(random_rac_params(1, 2, 3, 1, Field::Float64, rng), 6);
  Budgets tight;
  tight.contraction_entries = 100;
  EXPECT_THROW((void)contract(g, tight), ResourceError);
}

TEST(Graph, ValidateRejectsBadStructure) {
  Rng rng(12);
  TnGraph dangling;
  dangling.add_node("a", oracle::random_exact(rng, {2, 2}));
  dangling.add_open_leg(0, 0, 0, LegSide::Start);
  EXPECT_THROW(dangling.validate(), StructuralError);

  TnGraph mismatch;
  const auto a = mismatch.add_node("a", oracle::random_exact(rng, {2}));
  const auto b = mismatch.add_node("b", oracle::random_exact(rng, {3}));
  EXPECT_THROW(mismatch.connect(a, 0, b, 0), StructuralError);

  TnGraph twice;
  const auto c = twice.add_node("c", oracle::random_exact(rng, {2, 2}));
  twice.add_open_leg(c, 0, 0, LegSide::Start);
  EXPECT_THROW(twice.add_open_leg(c, 0, 1, LegSide::End), StructuralError);

  TnGraph split;
  split.add_open_leg(split.add_node("x", oracle::random_exact(rng, {2})), 0, 0, LegSide::Start);
  split.add_open_leg(split.add_node("y", oracle::random_exact(rng, {2})), 0, 1, LegSide::End);
  EXPECT_THROW(split.validate(), StructuralError);
}

TEST(DeepTn, MatchesForwardWithInputsAttached) {
  struct Case {
    std::size_t L, T, R, M;
  };
  for (const auto& c : {Case{2, 2, 2, 2}, Case{2, 4, 2, 2}, Case{2, 4, 3, 2}, Case{3, 2, 2, 2}, Case{3, 4, 2, 2}}) {
    Rng rng(c.L * 1000 + c.T * 100 + c.R * 10 + c.M);
    const auto p = random_rac_params(c.L, c.R, c.M, 2, Field::Exact, rng);
    const auto g = build_deep_tn(p, c.T);
    g.validate();
    EXPECT_EQ(g.open_legs().back().side, LegSide::Output);
    EXPECT_EQ(g.open_legs().back().dim, 2u);
    auto f = random_matrix(c.M, c.M, Field::Exact, rng);
    while (!is_invertible(f)) f = random_matrix(c.M, c.M, Field::Exact, rng);
    const TemplateEncoder enc(f);
    for (int trial = 0; trial < 4; ++trial) {
      const auto seq = random_sequence(rng, c.M, c.T);
      EXPECT_EQ(contract(attach_inputs(g, enc, seq)), forward_deep(p, Nonlinearity::rac(), enc, seq))
          << "L=" << c.L << " T=" << c.T;
    }
  }
}

TEST(DeepTn, InputLegsCarryTimeAndSide) {
  Rng rng(13);
  const std::size_t T = 4;
  const auto p = random_rac_params(2, 2, 2, 2, Field::Exact, rng);
  const auto g = build_deep_tn(p, T);
  const auto open = contract(g);
  const auto enc = TemplateEncoder::identity(2, Field::Exact);
  for (const auto& leg : g.open_legs()) {
    if (leg.side == LegSide::Output) continue;
    EXPECT_LT(leg.time_index, T);
    EXPECT_EQ(leg.side, leg.time_index < T / 2 ? LegSide::Start : LegSide::End);
  }
  for (int trial = 0; trial < 5; ++trial) {
    const auto seq = random_sequence(rng, 2, T);
    EXPECT_EQ(score_open_result(g, open, enc, seq, 2), as_rationals(forward_deep(p, Nonlinearity::rac(), enc, seq)));
  }
}

TEST(DeepTn, SizeCaps) {
  Rng rng(14);
  EXPECT_THROW((void)build_deep_tn(random_rac_params(4, 2, 2, 1, Field::Float64, rng), 2), ResourceError);
  EXPECT_THROW((void)build_deep_tn(random_rac_params(2, 2, 2, 1, Field::Float64, rng), 10), ResourceError);
  Budgets wide;
  wide.deep_tn_max_depth = 4;
  EXPECT_NO_THROW((void)build_deep_tn(random_rac_params(4, 2, 2, 1, Field::Float64, rng), 2, wide));
}

TEST(BasicUnits, Example) {
  const auto c = count_basic_units(3, 6);
  EXPECT_EQ(c.enumerated, 6);
  EXPECT_TRUE(c.match);
}

TEST(BasicUnits, EnumerationMatchesClosedForm) {
  for (std::size_t L = 1; L <= 4; ++L)
    for (std::size_t T = 2; T <= 8; T += 2) {
      const auto c = count_basic_units(L, T);
      EXPECT_TRUE(c.match) << "L=" << L << " T=" << T;
      EXPECT_EQ(c.closed_form, oracle::count_multisets(T / 2, L - 1));
    }
}

TEST(NoClone, OnlyBasisVectorsCloneBeyondDimensionOne) {
  for (std::size_t P = 1; P <= 4; ++P) {
    const auto r = no_clone_counterexample(P);
    EXPECT_EQ(r.dim, P);
    EXPECT_TRUE(r.clones_basis);
    EXPECT_EQ(r.clones_ones, P == 1);
  }
}

TEST(Serialization, GraphRoundTrip) {
  Rng rng(15);
  for (auto field : {Field::Exact, Field::Float64}) {
    const auto g = build_deep_tn(random_rac_params(2, 2, 2, 2, field, rng), 4);
    std::ostringstream first;
    write_graph(first, g);
    std::istringstream in(first.str());
    const auto back = read_graph(in);
    EXPECT_TRUE(back == g);
    std::ostringstream second;
    write_graph(second, back);
    EXPECT_EQ(first.str(), second.str());
  }
}

TEST(Serialization, ParamsAndTensorRoundTrip) {
  Rng rng(16);
  for (auto field : {Field::Exact, Field::Float64}) {
    const auto p = random_rac_params(2, 3, 2, 2, field, rng);
    std::ostringstream os;
    write_params(os, p);
    std::istringstream is(os.str());
    const auto back = read_params(is);
    std::ostringstream again;
    write_params(again, back);
    EXPECT_EQ(os.str(), again.str());
    EXPECT_EQ(content_hash(back), content_hash(p));

    const auto t = random_matrix(3, 4, field, rng);
    std::ostringstream ts;
    write_tensor(ts, t);
    std::istringstream tin(ts.str());
    EXPECT_EQ(read_tensor(tin), t);
  }
}

TEST(Serialization, RejectsEmptyGraphAndGarbage) {
  std::ostringstream os;
  EXPECT_THROW(write_graph(os, TnGraph{}), InvalidInputError);
  std::istringstream bad("racsep-graph 2\n");
  EXPECT_THROW((void)read_graph(bad), InvalidInputError);
  EXPECT_THROW((void)load_text("/nonexistent/racsep/file"), IoError);
}
