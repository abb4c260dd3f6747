#pragma once

#include <vector>

#include "stagelab/activation.hpp"
#include "stagelab/dataset.hpp"
#include "stagelab/model.hpp"
#include "stagelab/network.hpp"

namespace stagelab {

struct Trajectory;

struct MacroQuantities {
  double K = 0.0;        // sum_k a_k w_k^1
  double K_prime = 0.0;  // sum_k a_k^2 + (w_k^1)^2
  double q_max = 0.0;    // max over all |a_k|, |w_k^i|
  double norm_a = 0.0;
  double norm_W = 0.0;  // Frobenius
  Vector direction_sums;  // entry i: sum_k (w_k^i)^2
};

[[nodiscard]] MacroQuantities macro_quantities(const NetworkState& state);

/// Sorted |a_k| and sorted ||w_k||_2.
struct AmplitudeDistributions {
  Vector outer;
  Vector inner;
};

[[nodiscard]] AmplitudeDistributions amplitude_distributions(const NetworkState& state);

/// W2 between two equal-size empirical measures given as sorted atoms.
[[nodiscard]] double wasserstein_1d(const Vector& sorted_a, const Vector& sorted_b);

/// W2(rho_|a|, rho_||w||) / sqrt(mean a_k^2). Throws NumericError when a = 0.
[[nodiscard]] double relative_w2(const NetworkState& state);

/// sum_k ||w_k||^2 / sum_k (w_k^1)^2, always >= 1.
[[nodiscard]] double condensation_ratio(const NetworkState& state);

/// ||grad R||_inf / ||theta||_inf.
[[nodiscard]] double critical_point_ratio(const NetworkState& state, const Dataset& data,
                                          const Activation& act);
[[nodiscard]] double critical_point_ratio(const NetworkState& state, const Gradient& grad);

[[nodiscard]] double theta_inf_norm(const NetworkState& state);
[[nodiscard]] double gradient_inf_norm(const Gradient& grad);

struct ConservationSeries {
  std::vector<double> t;
  std::vector<double> residual;  // |4 K K' - K' K''| / K'^2 with dots as time derivatives
  std::vector<double> k_ratio;   // K / K'
};

/// Evaluates on the interior records whose time lies in [t_begin, t_end],
/// differentiating K and K' by centered differences on the recorded grid.
/// Throws ValidationError with fewer than 3 records in the window.
[[nodiscard]] ConservationSeries conservation_residual(const Trajectory& trajectory,
                                                       double t_begin, double t_end);

// High-probability bounds on a fresh initialization with scale m^-alpha.
struct InitBounds {
  double max_abs = 0.0;  // max over |a_k|, |w_k^i|, holds with probability >= 1 - delta
  double norm_a_lo = 0.0;
  double norm_a_hi = 0.0;
  double norm_W_lo = 0.0;
  double norm_W_hi = 0.0;
  double norm_theta_lo = 0.0;
  double norm_theta_hi = 0.0;
};

[[nodiscard]] InitBounds init_bounds(int m, int d, double alpha, double delta);

struct DepartureDiagnostic {
  double c4 = 0.0;  // sum rho x^4
  double b3 = 0.0;  // sum rho f x^3
  /// (d/dt sum a_k^2) / (d/dt sum w_k^2) under the exact flow.
  double layer_rate_ratio = 0.0;
  bool infinite_ratio = false;  // zero inner-layer rate
};

/// d = 1 only.
[[nodiscard]] DepartureDiagnostic departure_diagnostic(const NetworkState& state,
                                                       const Dataset& data, const Activation& act);

}  // namespace stagelab
