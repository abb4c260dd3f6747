#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stagelab/error.hpp"
#include "stagelab/model.hpp"
#include "stagelab/targets.hpp"
#include "support/oracles.hpp"

using namespace stagelab;

namespace {

NetworkState permuted(const NetworkState& s, const std::vector<int>& perm) {
  NetworkState out = s;
  for (int k = 0; k < s.width(); ++k) {
    out.a[k] = s.a[perm[static_cast<std::size_t>(k)]];
    out.W.row(k) = s.W.row(perm[static_cast<std::size_t>(k)]);
  }
  return out;
}

}  // namespace

TEST(Forward, ZeroOuterWeights) {
  NetworkState s(Vector::Zero(3), RowMatrix::Ones(3, 2));
  EXPECT_EQ(forward(s, Vector::Ones(2), Activation::tanh()), 0.0);
}

TEST(Forward, DirectEvaluation) {
  NetworkState s(Vector::Constant(1, 1.0), RowMatrix::Constant(1, 1, 1.0));
  EXPECT_NEAR(forward(s, Vector::Constant(1, 0.5), Activation::tanh()), 0.462117, 1e-6);
}

TEST(Forward, OddSymmetry) {
  oracle::Random rng(3);
  const NetworkState s = oracle::random_state(rng, 6, 2);
  NetworkState flipped = s;
  flipped.a = -s.a;
  flipped.W = -s.W;
  const Vector x = Vector::Constant(2, 0.3);
  EXPECT_DOUBLE_EQ(forward(s, x, Activation::tanh()), forward(flipped, x, Activation::tanh()));
}

TEST(Forward, DimensionMismatch) {
  NetworkState s(Vector::Ones(2), RowMatrix::Ones(2, 3));
  EXPECT_THROW((void)forward(s, Vector::Ones(2), Activation::tanh()), DimensionError);
}

TEST(Risk, ZeroParametersGiveHalfTargetEnergy) {
  oracle::Random rng(5);
  const Dataset data = oracle::random_dataset(rng, 9, 2);
  const NetworkState s(Vector::Zero(4), RowMatrix::Zero(4, 2));
  const double expect = 0.5 * (data.weights().array() * data.targets().array().square()).sum();
  EXPECT_NEAR(risk(s, data, Activation::tanh()), expect, 1e-15);
}

TEST(Risk, InterpolationIsZero) {
  oracle::Random rng(6);
  const NetworkState s = oracle::random_state(rng, 5, 2);
  const Dataset base = oracle::random_dataset(rng, 7, 2);
  const Dataset data(base.points(), base.weights(), outputs(s, base, Activation::tanh()));
  EXPECT_EQ(risk(s, data, Activation::tanh()), 0.0);
}

TEST(Risk, MatchesBruteForceOnHandDataset) {
  Eigen::MatrixXd x(3, 1);
  x << -1.0, 0.25, 2.0;
  Vector w(3);
  w << 0.2, 0.5, 0.3;
  Vector y(3);
  y << 0.1, -0.4, 0.9;
  const Dataset data(x, w, y);
  Vector a(2);
  a << 0.7, -1.1;
  RowMatrix W(2, 1);
  W << 0.3, -0.8;
  const NetworkState s(a, W);
  EXPECT_NEAR(risk(s, data, Activation::tanh()), oracle::risk(s, data, Activation::tanh()), 1e-15);
}

TEST(Risk, NonNegativeAndZeroOnlyAtInterpolation) {
  oracle::Random rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const NetworkState s = oracle::random_state(rng, 4, 2);
    const Dataset data = oracle::random_dataset(rng, 6, 2);
    const double r = risk(s, data, Activation::tanh());
    EXPECT_GT(r, 0.0);
  }
}

TEST(Gradient, VanishesAtOrigin) {
  oracle::Random rng(9);
  const Dataset data = oracle::random_dataset(rng, 7, 2);
  const Gradient g = gradient(NetworkState(Vector::Zero(5), RowMatrix::Zero(5, 2)), data,
                              Activation::tanh());
  EXPECT_EQ(g.a.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(g.W.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Gradient, MatchesFiniteDifferencesSmallInstance) {
  oracle::Random rng(10);
  const NetworkState s = oracle::random_state(rng, 5, 2);
  const Dataset data = oracle::random_dataset(rng, 7, 2);
  const Gradient g = gradient(s, data, Activation::tanh());
  const Gradient ref = oracle::fd_gradient(s, data, Activation::tanh());
  EXPECT_LE(oracle::relative_error(g, ref), 1e-6);
}

TEST(Gradient, FiniteDifferencePropertyRandomShapes) {
  oracle::Random rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = rng.integer(1, 10);
    const int d = rng.integer(1, 3);
    const int n = rng.integer(1, 10);
    const NetworkState s = oracle::random_state(rng, m, d);
    const Dataset data = oracle::random_dataset(rng, n, d);
    for (const Activation& act : {Activation::tanh(), Activation::identity()}) {
      const Gradient g = gradient(s, data, act);
      EXPECT_LE(oracle::relative_error(g, oracle::fd_gradient(s, data, act)), 1e-6)
          << "m=" << m << " d=" << d << " n=" << n << " act=" << act.name();
    }
  }
}

TEST(Gradient, IdentityActivationLeadingForm) {
  // With sigma(z) = z: f = K x, so dR/da_k = w_k (c2 K - b1) and
  // dR/dw_k = a_k (c2 K - b1) with c2 = sum rho x^2, b1 = sum rho f x.
  oracle::Random rng(12);
  const NetworkState s = oracle::random_state(rng, 6, 1, 0.3);
  const Dataset data = oracle::random_dataset(rng, 8, 1);
  const double c2 = (data.weights().array() * data.points().col(0).array().square()).sum();
  const double b1 =
      (data.weights().array() * data.targets().array() * data.points().col(0).array()).sum();
  const double K = s.a.dot(s.W.col(0));
  const Gradient g = gradient(s, data, Activation::identity());
  for (int k = 0; k < 6; ++k) {
    EXPECT_NEAR(g.a[k], s.W(k, 0) * (c2 * K - b1), 1e-14);
    EXPECT_NEAR(g.W(k, 0), s.a[k] * (c2 * K - b1), 1e-14);
  }
}

TEST(Gradient, PermutationEquivariant) {
  oracle::Random rng(13);
  const NetworkState s = oracle::random_state(rng, 7, 2);
  const Dataset data = oracle::random_dataset(rng, 9, 2);
  std::vector<int> perm(7);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.gen);
  const NetworkState p = permuted(s, perm);
  const Activation act = Activation::tanh();
  EXPECT_NEAR(risk(p, data, act), risk(s, data, act), 1e-14);
  const Gradient g = gradient(s, data, act);
  const Gradient gp = gradient(p, data, act);
  for (int k = 0; k < 7; ++k) {
    const int src = perm[static_cast<std::size_t>(k)];
    EXPECT_NEAR(gp.a[k], g.a[src], 1e-14);
    EXPECT_NEAR((gp.W.row(k) - g.W.row(src)).cwiseAbs().maxCoeff(), 0.0, 1e-14);
  }
}

TEST(Risk, SignFlipInvariant) {
  oracle::Random rng(14);
  const NetworkState s = oracle::random_state(rng, 5, 3);
  const Dataset data = oracle::random_dataset(rng, 10, 3);
  NetworkState f = s;
  f.a = -s.a;
  f.W = -s.W;
  EXPECT_DOUBLE_EQ(risk(s, data, Activation::tanh()), risk(f, data, Activation::tanh()));
}

TEST(Evaluator, FoldsSymmetricGrid) {
  const Dataset data = make_dataset(TargetId::f1, {}, false);
  Evaluator eval(data, Activation::tanh());
  EXPECT_TRUE(eval.folded());
  EXPECT_EQ(eval.samples(), 500);

  RunConfig c;
  c.m = 30;
  c.alpha = 0.75;
  const NetworkState s = init_params(c);
  EXPECT_NEAR(eval.risk(s), oracle::risk(s, data, Activation::tanh()), 1e-13);
}

TEST(Evaluator, FoldedMatchesUnfolded) {
  const Dataset sym = make_dataset(TargetId::f3, {200, -3.0, 3.0}, true);
  Eigen::MatrixXd x = sym.points();
  x(0, 0) *= 1.0 + 1e-15;  // break the exact pairing
  const Dataset broken(x, sym.weights(), sym.targets());
  Evaluator folded(sym, Activation::tanh());
  Evaluator plain(broken, Activation::tanh());
  ASSERT_TRUE(folded.folded());
  ASSERT_FALSE(plain.folded());
  oracle::Random rng(15);
  const NetworkState s = oracle::random_state(rng, 12, 1, 0.5);
  Gradient g1;
  Gradient g2;
  EXPECT_NEAR(folded.evaluate(s, g1), plain.evaluate(s, g2), 1e-13);
  EXPECT_LE(oracle::relative_error(g1, g2), 1e-12);
}

TEST(Evaluator, NoFoldForEvenTargets) {
  Eigen::MatrixXd x(4, 1);
  x << -1, -0.5, 0.5, 1;
  const Dataset data(x, Vector::Constant(4, 0.25), Vector::Constant(4, 1.0));
  EXPECT_FALSE(Evaluator(data, Activation::tanh()).folded());
}

TEST(Evaluator, ZeroPointWithZeroTargetFolds) {
  Eigen::MatrixXd x(3, 1);
  x << -1, 0, 1;
  Vector y(3);
  y << -0.5, 0.0, 0.5;
  const Dataset data(x, Vector::Constant(3, 1.0 / 3), y);
  Evaluator eval(data, Activation::tanh());
  EXPECT_TRUE(eval.folded());
  const NetworkState s(Vector::Constant(2, 0.4), RowMatrix::Constant(2, 1, 0.7));
  EXPECT_NEAR(eval.risk(s), oracle::risk(s, data, Activation::tanh()), 1e-15);
}
