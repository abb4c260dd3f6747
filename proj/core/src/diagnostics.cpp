#include "stagelab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stagelab/error.hpp"
#include "stagelab/trajectory.hpp"

namespace stagelab {

MacroQuantities macro_quantities(const NetworkState& state) {
  MacroQuantities q;
  const auto w1 = state.W.col(0);
  q.K = state.a.dot(w1);
  q.K_prime = state.a.squaredNorm() + w1.squaredNorm();
  q.q_max = std::max(state.a.cwiseAbs().maxCoeff(), state.W.cwiseAbs().maxCoeff());
  q.norm_a = state.a.norm();
  q.norm_W = state.W.norm();
  q.direction_sums = state.W.colwise().squaredNorm().transpose();
  return q;
}

AmplitudeDistributions amplitude_distributions(const NetworkState& state) {
  AmplitudeDistributions dist{state.a.cwiseAbs(), state.W.rowwise().norm()};
  std::sort(dist.outer.begin(), dist.outer.end());
  std::sort(dist.inner.begin(), dist.inner.end());
  return dist;
}

double wasserstein_1d(const Vector& sorted_a, const Vector& sorted_b) {
  if (sorted_a.size() != sorted_b.size()) {
    throw DimensionError("wasserstein_1d: samples must have equal size");
  }
  if (sorted_a.size() == 0) throw DimensionError("wasserstein_1d: empty samples");
  return std::sqrt((sorted_a - sorted_b).squaredNorm() / static_cast<double>(sorted_a.size()));
}

double relative_w2(const NetworkState& state) {
  const double rms = std::sqrt(state.a.squaredNorm() / static_cast<double>(state.a.size()));
  if (!(rms > 0.0)) throw NumericError("relative_w2: outer weights are all zero");
  const auto dist = amplitude_distributions(state);
  return wasserstein_1d(dist.outer, dist.inner) / rms;
}

double condensation_ratio(const NetworkState& state) {
  const double first = state.W.col(0).squaredNorm();
  if (!(first > 0.0)) throw NumericError("condensation_ratio: first input direction is empty");
  double total = first;
  for (Eigen::Index i = 1; i < state.W.cols(); ++i) total += state.W.col(i).squaredNorm();
  return total / first;
}

double theta_inf_norm(const NetworkState& state) {
  return std::max(state.a.cwiseAbs().maxCoeff(), state.W.cwiseAbs().maxCoeff());
}

double gradient_inf_norm(const Gradient& grad) {
  return std::max(grad.a.cwiseAbs().maxCoeff(), grad.W.cwiseAbs().maxCoeff());
}

double critical_point_ratio(const NetworkState& state, const Gradient& grad) {
  const double theta = theta_inf_norm(state);
  if (!(theta > 0.0)) throw NumericError("critical_point_ratio: theta = 0");
  return gradient_inf_norm(grad) / theta;
}

double critical_point_ratio(const NetworkState& state, const Dataset& data,
                            const Activation& act) {
  return critical_point_ratio(state, gradient(state, data, act));
}

ConservationSeries conservation_residual(const Trajectory& trajectory, double t_begin,
                                         double t_end) {
  const auto& rec = trajectory.records;
  std::size_t lo = 0;
  while (lo < rec.size() && rec[lo].t < t_begin) ++lo;
  std::size_t hi = lo;
  while (hi < rec.size() && rec[hi].t <= t_end) ++hi;
  if (hi - lo < 3) {
    throw ValidationError("conservation_residual: need at least 3 records in [" +
                          std::to_string(t_begin) + ", " + std::to_string(t_end) + "]");
  }
  ConservationSeries series;
  for (std::size_t j = lo + 1; j + 1 < hi; ++j) {
    const double dt = rec[j + 1].t - rec[j - 1].t;
    const double dK = (rec[j + 1].K - rec[j - 1].K) / dt;
    const double dKp = (rec[j + 1].K_prime - rec[j - 1].K_prime) / dt;
    const double Kp = rec[j].K_prime;
    series.t.push_back(rec[j].t);
    series.residual.push_back(std::abs(4.0 * rec[j].K * dK - Kp * dKp) / (Kp * Kp));
    series.k_ratio.push_back(rec[j].K / Kp);
  }
  return series;
}

InitBounds init_bounds(int m, int d, double alpha, double delta) {
  if (m < 1 || d < 1) throw ValidationError("init_bounds: m and d must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("init_bounds: delta in (0, 1)");
  const double mm = static_cast<double>(m);
  const double dd = static_cast<double>(d);
  InitBounds b;
  b.max_abs = std::pow(mm, -alpha) * std::sqrt(2.0 * std::log(2.0 * mm * (dd + 1.0) / delta));
  const double scale = std::pow(mm, 1.0 - 2.0 * alpha);  // m^-(2 alpha - 1)
  b.norm_a_lo = std::sqrt(0.5 * scale);
  b.norm_a_hi = std::sqrt(1.5 * scale);
  b.norm_W_lo = std::sqrt(0.5 * dd * scale);
  b.norm_W_hi = std::sqrt(1.5 * dd * scale);
  b.norm_theta_lo = std::sqrt(0.5 * (dd + 1.0) * scale);
  b.norm_theta_hi = std::sqrt(1.5 * (dd + 1.0) * scale);
  return b;
}

DepartureDiagnostic departure_diagnostic(const NetworkState& state, const Dataset& data,
                                         const Activation& act) {
  if (data.dim() != 1 || state.input_dim() != 1) {
    throw DimensionError("departure_diagnostic requires d = 1");
  }
  DepartureDiagnostic out;
  const auto x = data.points().col(0).array();
  const auto rho = data.weights().array();
  out.c4 = (rho * x.square().square()).sum();
  out.b3 = (rho * data.targets().array() * x.cube()).sum();

  const Gradient grad = gradient(state, data, act);
  const double outer_rate = -2.0 * state.a.dot(grad.a);
  const double inner_rate = -2.0 * state.W.col(0).dot(grad.W.col(0));
  if (inner_rate == 0.0) {
    out.infinite_ratio = true;
    out.layer_rate_ratio = std::numeric_limits<double>::infinity();
  } else {
    out.layer_rate_ratio = outer_rate / inner_rate;
  }
  return out;
}

}  // namespace stagelab
