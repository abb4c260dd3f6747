#pragma once

#include <Eigen/Core>

#include "stagelab/activation.hpp"
#include "stagelab/dataset.hpp"
#include "stagelab/network.hpp"

namespace stagelab {

struct Gradient {
  Vector a;     // dR/da_k
  RowMatrix W;  // row k is dR/dw_k
};

/// f(x) = sum_k a_k sigma(w_k . x). Throws DimensionError.
[[nodiscard]] double forward(const NetworkState& state, const Vector& x, const Activation& act);

/// f_theta at every sample point.
[[nodiscard]] Vector outputs(const NetworkState& state, const Dataset& data, const Activation& act);

/// R = 1/2 sum_s rho_s (f_theta(x_s) - f(x_s))^2.
[[nodiscard]] double risk(const NetworkState& state, const Dataset& data, const Activation& act);

[[nodiscard]] Gradient gradient(const NetworkState& state, const Dataset& data,
                                const Activation& act);

/// Reusable risk/gradient kernel bound to one dataset.
///
/// When the activation is odd and the samples come in exact pairs
/// (x, -x) with equal weights and negated targets, both members of a pair
/// contribute identically, so only one of them is evaluated with doubled
/// weight. Holds scratch buffers; use one instance per thread.
class Evaluator {
 public:
  Evaluator(const Dataset& data, Activation act);

  /// Returns R(theta) and writes the gradient.
  double evaluate(const NetworkState& state, Gradient& grad);
  double risk(const NetworkState& state);

  [[nodiscard]] bool folded() const noexcept { return folded_; }
  [[nodiscard]] int samples() const noexcept { return static_cast<int>(weights_.size()); }
  [[nodiscard]] const Activation& activation() const noexcept { return act_; }

 private:
  void accumulate_outputs(const NetworkState& state);
  void row(const NetworkState& state, Eigen::Index k);

  Activation act_;
  Eigen::MatrixXd points_;  // n x d, column-major
  Eigen::ArrayXd weights_;
  Eigen::ArrayXd targets_;
  bool folded_ = false;

  Eigen::ArrayXd z_;
  Eigen::ArrayXd value_;
  Eigen::ArrayXd deriv_;
  Eigen::ArrayXd out_;
  Eigen::ArrayXd residual_;     // rho_s (f_theta - f)
  Eigen::ArrayXXd weighted_x_;  // residual_ * x^i per column
};

}  // namespace stagelab
