#include "stagelab/dynamics.hpp"

#include <cmath>
#include <utility>

#include "stagelab/diagnostics.hpp"
#include "stagelab/error.hpp"
#include "stagelab/format.hpp"

namespace stagelab {
namespace {

void advance(NetworkState& state, const Gradient& g, double h) {
  state.a.noalias() -= h * g.a;
  state.W.noalias() -= h * g.W;
}

// One step from `state`; `g` must already hold grad R(state).
void integrate(NetworkState& state, Evaluator& eval, Gradient& g, double h,
               Integrator integrator) {
  if (integrator == Integrator::euler) {
    advance(state, g, h);
    return;
  }
  const NetworkState base = state;
  Gradient acc{g.a, g.W};  // k1
  NetworkState stage = base;
  Gradient k;
  advance(stage, g, 0.5 * h);
  eval.evaluate(stage, k);  // k2
  acc.a += 2.0 * k.a;
  acc.W += 2.0 * k.W;
  stage = base;
  advance(stage, k, 0.5 * h);
  eval.evaluate(stage, k);  // k3
  acc.a += 2.0 * k.a;
  acc.W += 2.0 * k.W;
  stage = base;
  advance(stage, k, h);
  eval.evaluate(stage, k);  // k4
  acc.a += k.a;
  acc.W += k.W;
  advance(state, acc, h / 6.0);
}

Record make_record(const NetworkState& state, const NetworkState& initial, double loss,
                   const Gradient& g) {
  const MacroQuantities q = macro_quantities(state);
  Record r;
  r.t = state.t;
  r.loss = loss;
  r.K = q.K;
  r.K_prime = q.K_prime;
  r.q_max = q.q_max;
  r.norm_a = q.norm_a;
  r.norm_W = q.norm_W;
  r.direction_sums.assign(q.direction_sums.begin(), q.direction_sums.end());
  r.w2_rel = relative_w2(state);
  r.condensation_ratio = condensation_ratio(state);
  r.grad_inf = gradient_inf_norm(g);
  r.theta_inf = q.q_max;
  r.r_max = r_max(state, initial);
  return r;
}

}  // namespace

NetworkState step(const NetworkState& state, const Dataset& data, const Activation& act,
                  double step_size, Integrator integrator) {
  if (!(step_size > 0.0)) throw ValidationError("step: step_size must be positive");
  state.check();
  Evaluator eval(data, act);
  Gradient g;
  eval.evaluate(state, g);
  NetworkState next = state;
  integrate(next, eval, g, step_size, integrator);
  next.t = state.t + step_size;
  if (!next.all_finite()) {
    throw NumericError("non-finite state after step at t=" + format_number(next.t));
  }
  return next;
}

Trajectory run(const RunConfig& config, const Dataset& data, const Activation& act,
               const StopCondition& stop, const RunGuards& guards) {
  return run_from(init_params(config), config, data, act, stop, guards);
}

Trajectory run_from(const NetworkState& initial, const RunConfig& config, const Dataset& data,
                    const Activation& act, const StopCondition& stop, const RunGuards& guards) {
  config.validate();
  initial.check();
  if (initial.width() != config.m || initial.input_dim() != config.d) {
    throw DimensionError("run: initial state shape does not match config (m, d)");
  }
  if (data.dim() != config.d) {
    throw DimensionError("run: dataset dimension " + std::to_string(data.dim()) +
                         " does not match config d=" + std::to_string(config.d));
  }
  const double max_time = stop.max_time.value_or(config.max_time);
  const double h = config.step_size;
  const double t0 = initial.t;

  Trajectory traj;
  traj.config = config;
  traj.initial = initial;

  Evaluator eval(data, act);
  Gradient g;
  NetworkState state = initial;
  std::optional<double> descent_loss;

  for (long long j = 0;; ++j) {
    state.t = t0 + static_cast<double>(j) * h;
    const double loss = eval.evaluate(state, g);
    if (!std::isfinite(loss) || !g.a.allFinite() || !g.W.allFinite()) {
      throw NumericError("non-finite risk or gradient at t=" + format_number(state.t));
    }
    if (j % config.record_stride == 0) {
      Record rec = make_record(state, initial, loss, g);
      if (rec.q_max > guards.divergence_q_max) {
        throw NumericError("diverged at t=" + format_number(rec.t) +
                           ": q_max=" + format_number(rec.q_max));
      }
      if (guards.monotone_tolerance >= 0.0 && !traj.records.empty()) {
        const double prev = traj.records.back().loss;
        if (loss > prev * (1.0 + guards.monotone_tolerance) + 1e-300) {
          throw NumericError("risk increased at t=" + format_number(rec.t) + ": " +
                             format_number(prev) + " -> " + format_number(loss));
        }
      }
      traj.records.push_back(std::move(rec));

      bool done = state.t - t0 >= max_time - 1e-9 * h;
      if (stop.loss_below && loss < *stop.loss_below) done = true;
      if (!descent_loss && traj.records.back().K >= 1.0 - config.beta) descent_loss = loss;
      if (stop.milestone == MilestoneStop::descent && descent_loss) done = true;
      if (stop.milestone == MilestoneStop::secondary && descent_loss &&
          loss < *descent_loss * (1.0 - config.plateau_eps)) {
        done = true;
      }
      if (done) break;
    }
    integrate(state, eval, g, h, config.integrator);
    if (!state.all_finite()) {
      throw NumericError("non-finite state after step at t=" +
                         format_number(t0 + static_cast<double>(j + 1) * h));
    }
  }
  traj.terminal = std::move(state);
  return traj;
}

UpdateDecomposition decompose_update(const NetworkState& state, const Dataset& data,
                                     const Activation& act, double tol) {
  const AssumptionReport report = check_assumptions(data, tol);
  if (!report.symmetric_sampling || !report.leading_term) {
    throw ValidationError("decompose_update: dataset is not normalized (dev1=" +
                          format_number(report.dev1) + ", dev2=" + format_number(report.dev2) +
                          ", tol=" + format_number(tol) + ")");
  }
  if (state.input_dim() != data.dim()) throw DimensionError("decompose_update: dimension mismatch");

  const Gradient grad = gradient(state, data, act);
  const Vector s = state.W.transpose() * state.a;  // s_i = sum_l a_l w_l^i

  UpdateDecomposition u;
  u.leading_a = state.W.col(0) - state.W * s;
  u.leading_W = -state.a * s.transpose();
  u.leading_W.col(0) += state.a;
  u.residual_a = -grad.a - u.leading_a;
  u.residual_W = -grad.W - u.leading_W;
  return u;
}

NetworkState linearized_solution(const NetworkState& state0, double t) {
  const double delta = t - state0.t;
  if (delta < 0.0) throw ValidationError("linearized_solution: t precedes the initial time");
  const double c = std::cosh(delta);
  const double sh = std::sinh(delta);
  NetworkState out = state0;
  out.a = c * state0.a + sh * state0.W.col(0);
  out.W.col(0) = c * state0.W.col(0) + sh * state0.a;
  out.t = t;
  return out;
}

double r_max(const NetworkState& state, const NetworkState& state0) {
  if (state.a.size() != state0.a.size() || state.W.rows() != state0.W.rows() ||
      state.W.cols() != state0.W.cols()) {
    throw DimensionError("r_max: state shapes differ");
  }
  const NetworkState lin = linearized_solution(state0, state.t);
  return ((state.a - lin.a).cwiseAbs() + (state.W.col(0) - lin.W.col(0)).cwiseAbs()).maxCoeff();
}

double logistic_K(double K0, double t0, double t) {
  if (K0 == 1.0) throw ValidationError("logistic_K: K0 = 1 is degenerate");
  if (K0 == 0.0) return 0.0;
  const double c = K0 / (1.0 - K0);
  return 1.0 / (1.0 + std::exp(-2.0 * (t - t0)) / c);
}

}  // namespace stagelab
