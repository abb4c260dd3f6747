#pragma once

#include <optional>

#include "stagelab/activation.hpp"
#include "stagelab/config.hpp"
#include "stagelab/dataset.hpp"
#include "stagelab/model.hpp"
#include "stagelab/network.hpp"
#include "stagelab/trajectory.hpp"

namespace stagelab {

/// One integrator step of d theta/dt = -grad R. Throws NumericError when the
/// new state is not finite.
[[nodiscard]] NetworkState step(const NetworkState& state, const Dataset& data,
                                const Activation& act, double step_size, Integrator integrator);

enum class MilestoneStop {
  none,
  descent,    // K >= 1 - beta has been recorded
  secondary,  // the plateau-exit loss drop after the descent has been recorded
};

struct StopCondition {
  std::optional<double> max_time;    // defaults to config.max_time
  std::optional<double> loss_below;
  MilestoneStop milestone = MilestoneStop::none;
};

struct RunGuards {
  double divergence_q_max = 1e3;
  /// Abort when a recorded loss exceeds its predecessor by more than this
  /// relative amount. Negative disables the check.
  double monotone_tolerance = 1e-9;
};

/// Integrates from init_params(config) and records every record_stride steps.
/// The last record is the terminal state. Throws NumericError on divergence,
/// non-finite state or a loss increase.
[[nodiscard]] Trajectory run(const RunConfig& config, const Dataset& data, const Activation& act,
                             const StopCondition& stop = {}, const RunGuards& guards = {});

/// Same, starting from a given state.
[[nodiscard]] Trajectory run_from(const NetworkState& initial, const RunConfig& config,
                                  const Dataset& data, const Activation& act,
                                  const StopCondition& stop = {}, const RunGuards& guards = {});

/// -grad R split into the linear flow plus the exact remainder.
struct UpdateDecomposition {
  Vector leading_a;
  RowMatrix leading_W;
  Vector residual_a;
  RowMatrix residual_W;
};

/// Requires dev1, dev2 <= tol (ValidationError otherwise). The leading part is
///   a_k:        w_k^1 - sum_i (sum_l a_l w_l^i) w_k^i
///   w_k^1:      a_k - (sum_l a_l w_l^1) a_k
///   w_k^i, i>1: -(sum_l a_l w_l^i) a_k
[[nodiscard]] UpdateDecomposition decompose_update(const NetworkState& state, const Dataset& data,
                                                   const Activation& act, double tol = 1e-8);

/// Closed-form solution of the linear flow da/dt = w^1, dw^1/dt = a,
/// dw^i/dt = 0 from state0, evaluated at time t >= state0.t.
[[nodiscard]] NetworkState linearized_solution(const NetworkState& state0, double t);

/// max_k |a_k - a~_k| + |w_k^1 - w~_k^1| against linearized_solution(state0, state.t).
[[nodiscard]] double r_max(const NetworkState& state, const NetworkState& state0);

/// Logistic solution of dK/dt = 2K(1 - K) through (t0, K0). Throws ValidationError for K0 = 1.
[[nodiscard]] double logistic_K(double K0, double t0, double t);

}  // namespace stagelab
