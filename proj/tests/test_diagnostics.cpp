#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "stagelab/diagnostics.hpp"
#include "stagelab/dynamics.hpp"
#include "stagelab/error.hpp"
#include "stagelab/milestones.hpp"
#include "stagelab/targets.hpp"
#include "stagelab/trajectory.hpp"
#include "support/oracles.hpp"

using namespace stagelab;

namespace {

Vector sorted_sample(oracle::Random& rng, int m) {
  Vector v(m);
  for (int k = 0; k < m; ++k) v[k] = std::abs(rng.normal());
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<double> to_std(const Vector& v) { return {v.begin(), v.end()}; }

// Diagnostics that must not see neuron order or a joint sign flip.
std::vector<double> state_summary(const NetworkState& s, const Dataset& data) {
  const MacroQuantities q = macro_quantities(s);
  std::vector<double> out{q.K, q.K_prime, q.q_max, q.norm_a, q.norm_W};
  out.insert(out.end(), q.direction_sums.begin(), q.direction_sums.end());
  out.push_back(relative_w2(s));
  out.push_back(condensation_ratio(s));
  out.push_back(critical_point_ratio(s, data, Activation::tanh()));
  out.push_back(theta_inf_norm(s));
  return out;
}

}  // namespace

TEST(Macro, ZeroOuterWeights) {
  Vector w(3);
  w << 0.5, -1.0, 2.0;
  RowMatrix W(3, 1);
  W.col(0) = w;
  const MacroQuantities q = macro_quantities(NetworkState(Vector::Zero(3), W));
  EXPECT_EQ(q.K, 0.0);
  EXPECT_DOUBLE_EQ(q.K_prime, 5.25);
  EXPECT_EQ(q.q_max, 2.0);
}

TEST(Macro, TwoNeuronExample) {
  Vector a(2);
  a << 0.3, -0.2;
  RowMatrix W(2, 2);
  W << 0.5, 0.7, 0.1, -0.4;
  const MacroQuantities q = macro_quantities(NetworkState(a, W));
  EXPECT_NEAR(q.K, 0.13, 1e-15);
  EXPECT_NEAR(q.K_prime, 0.39, 1e-15);
  EXPECT_EQ(q.q_max, 0.7);
  EXPECT_NEAR(q.norm_a, std::sqrt(0.13), 1e-15);
  EXPECT_NEAR(q.direction_sums[0], 0.26, 1e-15);
  EXPECT_NEAR(q.direction_sums[1], 0.65, 1e-15);
  EXPECT_NEAR(q.norm_W, std::sqrt(0.91), 1e-15);
}

TEST(Macro, KPrimeDominatesTwiceK) {
  oracle::Random rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const NetworkState s = oracle::random_state(rng, rng.integer(1, 20), rng.integer(1, 3));
    const MacroQuantities q = macro_quantities(s);
    EXPECT_GE(q.K_prime, 2.0 * std::abs(q.K) * (1.0 - 1e-15));
  }
}

TEST(Wasserstein, IdenticalSamples) {
  Vector a(3);
  a << 0.1, 0.5, 2.0;
  EXPECT_EQ(wasserstein_1d(a, a), 0.0);
}

TEST(Wasserstein, TwoAtoms) {
  Vector a(2);
  a << 0.0, 2.0;
  Vector b(2);
  b << 1.0, 3.0;
  EXPECT_DOUBLE_EQ(wasserstein_1d(a, b), 1.0);
  EXPECT_DOUBLE_EQ(oracle::w2_brute_force({0.0, 2.0}, {1.0, 3.0}), 1.0);
}

TEST(Wasserstein, MatchesExhaustiveCouplings) {
  oracle::Random rng(2);
  for (int m = 1; m <= 7; ++m) {
    for (int trial = 0; trial < 10; ++trial) {
      const Vector a = sorted_sample(rng, m);
      const Vector b = sorted_sample(rng, m);
      EXPECT_NEAR(wasserstein_1d(a, b), oracle::w2_brute_force(to_std(a), to_std(b)), 1e-12);
    }
  }
}

TEST(Wasserstein, MetricProperties) {
  oracle::Random rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = rng.integer(1, 30);
    const Vector a = sorted_sample(rng, m);
    const Vector b = sorted_sample(rng, m);
    const Vector c = sorted_sample(rng, m);
    EXPECT_EQ(wasserstein_1d(a, b), wasserstein_1d(b, a));
    EXPECT_LE(wasserstein_1d(a, c), wasserstein_1d(a, b) + wasserstein_1d(b, c) + 1e-12);
  }
}

TEST(Wasserstein, Errors) {
  EXPECT_THROW((void)wasserstein_1d(Vector::Zero(2), Vector::Zero(3)), DimensionError);
  EXPECT_THROW((void)wasserstein_1d(Vector(0), Vector(0)), DimensionError);
}

TEST(AmplitudeDistributions, SortedNonnegative) {
  oracle::Random rng(4);
  const NetworkState s = oracle::random_state(rng, 12, 3);
  const AmplitudeDistributions d = amplitude_distributions(s);
  ASSERT_EQ(d.outer.size(), 12);
  ASSERT_EQ(d.inner.size(), 12);
  EXPECT_TRUE(std::is_sorted(d.outer.begin(), d.outer.end()));
  EXPECT_TRUE(std::is_sorted(d.inner.begin(), d.inner.end()));
  EXPECT_GE(d.outer.minCoeff(), 0.0);
}

TEST(RelativeW2, MatchedAmplitudesGiveZero) {
  Vector a(3);
  a << 0.3, -0.4, 1.0;
  RowMatrix W(3, 2);
  W << 0.3, 0.0, 0.0, 0.4, -0.6, 0.8;
  EXPECT_NEAR(relative_w2(NetworkState(a, W)), 0.0, 1e-15);
}

TEST(RelativeW2, BoundedByPairedDistance) {
  oracle::Random rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = rng.integer(1, 25);
    const NetworkState s = oracle::random_state(rng, m, rng.integer(1, 3));
    const double rms = std::sqrt(s.a.squaredNorm() / m);
    const Vector paired = s.a.cwiseAbs() - s.W.rowwise().norm();
    EXPECT_LE(relative_w2(s) * rms, std::sqrt(paired.squaredNorm() / m) + 1e-12);
  }
}

TEST(RelativeW2, ZeroOuterWeightsRejected) {
  EXPECT_THROW((void)relative_w2(NetworkState(Vector::Zero(2), RowMatrix::Ones(2, 1))), NumericError);
}

TEST(Condensation, FirstColumnOnly) {
  RowMatrix W = RowMatrix::Zero(3, 3);
  W.col(0) << 1.0, -2.0, 0.5;
  EXPECT_EQ(condensation_ratio(NetworkState(Vector::Ones(3), W)), 1.0);
}

TEST(Condensation, ScalarInputAtInitialization) {
  RunConfig c;
  c.m = 10000;
  EXPECT_EQ(condensation_ratio(init_params(c)), 1.0);
}

TEST(Condensation, AtLeastOneAndRejectsEmptyAxis) {
  oracle::Random rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    EXPECT_GE(condensation_ratio(oracle::random_state(rng, 5, 3)), 1.0);
  }
  RowMatrix W = RowMatrix::Zero(2, 2);
  W.col(1).setOnes();
  EXPECT_THROW((void)condensation_ratio(NetworkState(Vector::Ones(2), W)), NumericError);
}

TEST(CriticalPoint, ExactCriticalPoint) {
  oracle::Random rng(7);
  const Dataset base = oracle::random_dataset(rng, 6, 1);
  const Dataset data(base.points(), base.weights(), Vector::Zero(6));
  // a = 0 and f = 0: both gradient blocks vanish while W does not.
  const NetworkState s(Vector::Zero(3), RowMatrix::Constant(3, 1, 0.7));
  EXPECT_EQ(critical_point_ratio(s, data, Activation::tanh()), 0.0);
}

TEST(CriticalPoint, RatioOfInfinityNorms) {
  Vector a(2);
  a << 0.5, -2.0;
  const NetworkState s(a, RowMatrix::Constant(2, 1, 1.0));
  Gradient g{Vector::Constant(2, 0.1), RowMatrix::Constant(2, 1, -0.4)};
  EXPECT_DOUBLE_EQ(critical_point_ratio(s, g), 0.2);
  EXPECT_THROW((void)critical_point_ratio(NetworkState(Vector::Zero(1), RowMatrix::Zero(1, 1)), g),
               NumericError);
}

TEST(Invariance, PermutationAndSignFlip) {
  oracle::Random rng(8);
  const Dataset data = oracle::random_dataset(rng, 9, 2);
  const NetworkState s = oracle::random_state(rng, 8, 2);
  const auto base = state_summary(s, data);

  std::vector<int> perm(8);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.gen);
  NetworkState p = s;
  for (int k = 0; k < 8; ++k) {
    p.a[k] = s.a[perm[static_cast<std::size_t>(k)]];
    p.W.row(k) = s.W.row(perm[static_cast<std::size_t>(k)]);
  }
  const NetworkState flipped(-s.a, -s.W);
  const auto permuted = state_summary(p, data);
  const auto flip = state_summary(flipped, data);
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_NEAR(permuted[i], base[i], 1e-13 * std::max(1.0, std::abs(base[i]))) << i;
    EXPECT_EQ(flip[i], base[i]) << i;
  }
}

TEST(Conservation, ExactForLinearActivation) {
  const Dataset data = make_dataset(TargetId::f2, {}, true);
  RunConfig c;
  c.m = 50;
  c.alpha = 0.75;
  c.step_size = 1e-3;
  c.record_stride = 1;
  c.max_time = 5.0;
  c.integrator = Integrator::rk4;
  c.activation = "identity";
  const Trajectory traj = run(c, data, Activation::identity());
  const ConservationSeries series = conservation_residual(traj, 0.0, 5.0);
  ASSERT_FALSE(series.residual.empty());
  EXPECT_LE(*std::max_element(series.residual.begin(), series.residual.end()), 1e-6);
  EXPECT_EQ(series.t.size(), series.k_ratio.size());
}

TEST(Conservation, NeedsThreeRecords) {
  Trajectory traj;
  traj.records.resize(5);
  for (int j = 0; j < 5; ++j) {
    traj.records[static_cast<std::size_t>(j)].t = j;
    traj.records[static_cast<std::size_t>(j)].K_prime = 1.0;
  }
  EXPECT_THROW((void)conservation_residual(traj, 0.5, 2.5), ValidationError);
  EXPECT_EQ(conservation_residual(traj, 0.0, 4.0).residual.size(), 3u);
}

TEST(Departure, LinearActivationIsBalanced) {
  const Dataset data = make_dataset(TargetId::f3, {100, -3, 3});
  oracle::Random rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const NetworkState s = oracle::random_state(rng, 7, 1, 0.3);
    const DepartureDiagnostic d = departure_diagnostic(s, data, Activation::identity());
    EXPECT_FALSE(d.infinite_ratio);
    EXPECT_NEAR(d.layer_rate_ratio, 1.0, 1e-12);
  }
}

TEST(Departure, MomentsByDirectSum) {
  const Dataset data = make_dataset(TargetId::f1);
  double c4 = 0.0;
  double b3 = 0.0;
  for (int s = 0; s < data.size(); ++s) {
    const double x = data.points()(s, 0);
    c4 += data.weights()[s] * x * x * x * x;
    b3 += data.weights()[s] * data.targets()[s] * x * x * x;
  }
  const NetworkState st(Vector::Constant(2, 0.1), RowMatrix::Constant(2, 1, 0.2));
  const DepartureDiagnostic d = departure_diagnostic(st, data, Activation::tanh());
  EXPECT_NEAR(d.c4, c4, 1e-12 * c4);
  EXPECT_NEAR(d.b3, b3, 1e-12 * std::abs(b3));
}

TEST(Departure, ZeroInnerRateFlagged) {
  const Dataset data = make_dataset(TargetId::f2, {20, -1, 1});
  const NetworkState s(Vector::Constant(2, 0.3), RowMatrix::Zero(2, 1));
  const DepartureDiagnostic d = departure_diagnostic(s, data, Activation::tanh());
  EXPECT_TRUE(d.infinite_ratio);
  EXPECT_TRUE(std::isinf(d.layer_rate_ratio));
}

TEST(Departure, RequiresScalarInput) {
  const Dataset data = pad_dataset(make_dataset(TargetId::f2, {20, -1, 1}), 1);
  const NetworkState s(Vector::Ones(2), RowMatrix::Ones(2, 2));
  EXPECT_THROW((void)departure_diagnostic(s, data, Activation::tanh()), DimensionError);
}

TEST(Predict, TableRows) {
  const double m = std::exp(4.0);
  const MilestonePrediction p = predict_milestones(1.0, m, 0.05);
  EXPECT_NEAR(p.T_p, 1.0, 1e-12);
  EXPECT_NEAR(p.T_d, 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(p.alpha1, 0.75);
  EXPECT_DOUBLE_EQ(p.gamma1, 1.25);
  EXPECT_NEAR(p.T_sp - p.T_d, 2.0, 1e-12);

  const MilestonePrediction q = predict_milestones(2.0, m, 0.05);
  EXPECT_NEAR(q.T_p, 4.0, 1e-12);
  EXPECT_NEAR(q.T_d, 6.0, 1e-12);
  EXPECT_EQ(q.alpha1, 1.0);
  EXPECT_EQ(q.gamma1, 2.0);
}

TEST(Predict, ContinuousAtThreeHalves) {
  const double m = 1e4;
  const double below = predict_milestones(1.5, m, 0.05).T_p;
  const double above = predict_milestones(1.5 + 1e-12, m, 0.05).T_p;
  EXPECT_NEAR(below, 0.5 * std::log(m), 1e-12);
  EXPECT_NEAR(above, below, 1e-10);
}

TEST(Predict, Domain) {
  EXPECT_THROW((void)predict_milestones(0.5, 100, 0.05), ValidationError);
  EXPECT_THROW((void)predict_milestones(1.0, 1, 0.05), ValidationError);
  EXPECT_THROW((void)predict_milestones(1.0, 100, 1.0), ValidationError);
}

TEST(Detect, RampingK) {
  std::vector<double> t;
  std::vector<double> loss;
  std::vector<double> K;
  for (int j = 0; j <= 100; ++j) {
    t.push_back(0.1 * j);
    loss.push_back(0.5);
    K.push_back(0.01 * j);
  }
  const MilestoneReport r = detect_milestones(t, loss, K, 0.05, 0.05);
  ASSERT_TRUE(r.T_d_emp.has_value());
  EXPECT_NEAR(*r.T_d_emp, 9.5, 1e-12);
  EXPECT_EQ(*r.index_d, 95u);
  EXPECT_FALSE(r.T_sp_emp.has_value());
  EXPECT_FALSE(r.prediction.has_value());
}

TEST(Detect, ThreeSegments) {
  // plateau 0.5 -> 0.49 over [0, 4], fast drop to 0.1 by t = 5, slow tail
  std::vector<double> t;
  std::vector<double> loss;
  std::vector<double> K;
  for (int j = 0; j <= 300; ++j) {
    const double s = 0.05 * j;
    t.push_back(s);
    if (s <= 4.0) {
      loss.push_back(0.5 - 0.0025 * s);
    } else if (s <= 5.0) {
      loss.push_back(0.49 - 0.39 * (s - 4.0));
    } else {
      loss.push_back(0.1 - 0.001 * (s - 5.0));
    }
    K.push_back(s < 5.0 - 1e-9 ? 0.2 * s / 5.0 : 0.96);
  }
  const MilestoneReport r = detect_milestones(t, loss, K, 0.05, 0.05);
  ASSERT_TRUE(r.T_p_emp && r.T_d_emp && r.T_sp_emp);
  EXPECT_LT(*r.T_p_emp, *r.T_d_emp);
  EXPECT_LT(*r.T_d_emp, *r.T_sp_emp);
  EXPECT_NEAR(*r.T_d_emp, 5.0, 1e-9);
  // total drop 0.4; 5% of it is reached once 0.39 (s - 4) passes 0.01
  EXPECT_NEAR(*r.T_p_emp, 4.0, 1e-9);
  EXPECT_NEAR(*r.rate_plateau, 0.0025, 1e-12);
  EXPECT_NEAR(*r.rate_descent, 0.39, 1e-12);
  EXPECT_NEAR(*r.ratio_descent_plateau, 156.0, 1e-9);
  // exit below 0.095: first record past s = 10
  EXPECT_NEAR(*r.T_sp_emp, 10.0, 0.05 + 1e-9);
}

TEST(Detect, Errors) {
  std::vector<double> t(12);
  std::iota(t.begin(), t.end(), 0.0);
  const std::vector<double> flat(12, 0.1);
  EXPECT_NO_THROW((void)detect_milestones(t, flat, flat, 0.05, 0.05));
  t[5] = t[4];
  EXPECT_THROW((void)detect_milestones(t, flat, flat, 0.05, 0.05), ValidationError);
  const std::vector<double> short_t{0, 1, 2};
  const std::vector<double> short_v(3, 0.0);
  EXPECT_THROW((void)detect_milestones(short_t, short_v, short_v, 0.05, 0.05), ValidationError);
  EXPECT_THROW((void)detect_milestones(short_t, flat, flat, 0.05, 0.05), DimensionError);
}

TEST(Detect, StrideRefinement) {
  const Dataset data = make_dataset(TargetId::f2, {}, true);
  RunConfig c;
  c.m = 100;
  c.alpha = 0.75;
  c.max_time = 6.0;
  c.record_stride = 20;
  const Trajectory coarse = run(c, data, Activation::tanh());
  c.record_stride = 5;
  const Trajectory fine = run(c, data, Activation::tanh());
  const MilestoneReport rc = detect_milestones(coarse, c.beta, c.plateau_eps);
  const MilestoneReport rf = detect_milestones(fine, c.beta, c.plateau_eps);
  const double interval = 20 * c.step_size + 1e-9;
  ASSERT_TRUE(rc.T_d_emp && rf.T_d_emp && rc.T_p_emp && rf.T_p_emp);
  EXPECT_LE(std::abs(*rc.T_d_emp - *rf.T_d_emp), interval);
  EXPECT_LE(std::abs(*rc.T_p_emp - *rf.T_p_emp), interval);
  ASSERT_EQ(rc.T_sp_emp.has_value(), rf.T_sp_emp.has_value());
  if (rc.T_sp_emp) EXPECT_LE(std::abs(*rc.T_sp_emp - *rf.T_sp_emp), interval);
  ASSERT_TRUE(rc.prediction.has_value());
}

TEST(Detect, JsonFieldNames) {
  MilestoneReport r;
  r.T_d_emp = 1.0 / 3.0;
  r.prediction = predict_milestones(1.0, 1000, 0.05);
  const nlohmann::json j = r;
  for (const char* key : {"T_p_emp", "T_d_emp", "T_sp_emp", "index_p", "index_d", "index_sp", "beta",
                          "plateau_eps", "rate_plateau", "rate_descent", "rate_secondary",
                          "ratio_descent_plateau", "ratio_secondary_descent", "prediction"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_TRUE(j["T_p_emp"].is_null());
  EXPECT_EQ(j["T_d_emp"].get<double>(), 0.333333333333);
  EXPECT_TRUE(j["prediction"].contains("gamma1"));
}

TEST(InitBounds, Formulas) {
  const InitBounds b = init_bounds(100, 2, 1.0, 0.01);
  EXPECT_NEAR(b.max_abs, 0.01 * std::sqrt(2.0 * std::log(2.0 * 100 * 3 / 0.01)), 1e-15);
  EXPECT_NEAR(b.norm_a_lo, std::sqrt(0.5 / 100), 1e-15);
  EXPECT_NEAR(b.norm_a_hi, std::sqrt(1.5 / 100), 1e-15);
  EXPECT_NEAR(b.norm_W_hi, std::sqrt(3.0 / 100), 1e-15);
  EXPECT_NEAR(b.norm_theta_lo, std::sqrt(1.5 / 100), 1e-15);
  EXPECT_THROW((void)init_bounds(100, 1, 1.0, 0.0), ValidationError);
}

TEST(InitBounds, HoldForMostSeeds) {
  RunConfig c;
  c.m = 2000;
  c.d = 2;
  const InitBounds b = init_bounds(c.m, c.d, c.alpha, 0.05);
  int max_ok = 0;
  int norm_ok = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    c.seed = seed;
    const NetworkState s = init_params(c);
    if (theta_inf_norm(s) <= b.max_abs) ++max_ok;
    const double na = s.a.norm();
    const double nw = s.W.norm();
    if (na >= b.norm_a_lo && na <= b.norm_a_hi && nw >= b.norm_W_lo && nw <= b.norm_W_hi) ++norm_ok;
  }
  EXPECT_GE(max_ok, 38);
  EXPECT_EQ(norm_ok, 40);
}
