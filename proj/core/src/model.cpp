#include "stagelab/model.hpp"

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "stagelab/error.hpp"

namespace stagelab {
namespace {

void require_dims(const NetworkState& state, const Dataset& data) {
  if (state.input_dim() != data.dim()) {
    throw DimensionError("network input dimension " + std::to_string(state.input_dim()) +
                         " does not match dataset dimension " + std::to_string(data.dim()));
  }
}

struct Fold {
  std::vector<Eigen::Index> keep;
  bool ok = false;
};

// Finds exact (x, -x) pairs with equal weights and negated targets.
Fold find_pairs(const Dataset& data) {
  Fold fold;
  const auto n = data.points().rows();
  const auto d = data.points().cols();
  std::map<std::vector<double>, Eigen::Index> index;
  auto key = [&](Eigen::Index s, double sign) {
    std::vector<double> v(static_cast<std::size_t>(d));
    // +0.0 turns -0.0 into 0.0 so zero coordinates match their negation.
    for (Eigen::Index i = 0; i < d; ++i) v[static_cast<std::size_t>(i)] = sign * data.points()(s, i) + 0.0;
    return v;
  };
  for (Eigen::Index s = 0; s < n; ++s) {
    if (!index.emplace(key(s, 1.0), s).second) return fold;  // duplicate point
  }
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (Eigen::Index s = 0; s < n; ++s) {
    if (used[static_cast<std::size_t>(s)]) continue;
    const auto it = index.find(key(s, -1.0));
    if (it == index.end()) return fold;
    const Eigen::Index p = it->second;
    if (p == s) {
      // x = 0 contributes nothing exactly when its target is 0.
      if (data.targets()[s] != 0.0) return fold;
      used[static_cast<std::size_t>(s)] = 1;
      continue;
    }
    if (data.weights()[s] != data.weights()[p] || data.targets()[s] != -data.targets()[p]) {
      return fold;
    }
    used[static_cast<std::size_t>(s)] = used[static_cast<std::size_t>(p)] = 1;
    fold.keep.push_back(s);
  }
  fold.ok = !fold.keep.empty();
  return fold;
}

}  // namespace

double forward(const NetworkState& state, const Vector& x, const Activation& act) {
  if (x.size() != state.W.cols()) {
    throw DimensionError("forward: input has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(state.W.cols()));
  }
  double sum = 0.0;
  for (Eigen::Index k = 0; k < state.a.size(); ++k) {
    sum += state.a[k] * act.value(state.W.row(k).dot(x.transpose()));
  }
  return sum;
}

Vector outputs(const NetworkState& state, const Dataset& data, const Activation& act) {
  require_dims(state, data);
  const Eigen::Index n = data.size();
  Eigen::ArrayXd z(n);
  Eigen::ArrayXd v(n);
  Vector out = Vector::Zero(n);
  for (Eigen::Index k = 0; k < state.a.size(); ++k) {
    z.matrix().noalias() = data.points() * state.W.row(k).transpose();
    act.eval(std::span<const double>(z.data(), n), std::span<double>(v.data(), n));
    out.array() += state.a[k] * v;
  }
  return out;
}

double risk(const NetworkState& state, const Dataset& data, const Activation& act) {
  require_dims(state, data);
  Evaluator eval(data, act);
  return eval.risk(state);
}

Gradient gradient(const NetworkState& state, const Dataset& data, const Activation& act) {
  require_dims(state, data);
  Evaluator eval(data, act);
  Gradient grad;
  eval.evaluate(state, grad);
  return grad;
}

Evaluator::Evaluator(const Dataset& data, Activation act) : act_(std::move(act)) {
  const Fold fold = act_.is_odd() ? find_pairs(data) : Fold{};
  if (fold.ok) {
    const auto n = static_cast<Eigen::Index>(fold.keep.size());
    points_.resize(n, data.dim());
    weights_.resize(n);
    targets_.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index s = fold.keep[static_cast<std::size_t>(j)];
      points_.row(j) = data.points().row(s);
      weights_[j] = 2.0 * data.weights()[s];
      targets_[j] = data.targets()[s];
    }
    folded_ = true;
  } else {
    points_ = data.points();
    weights_ = data.weights().array();
    targets_ = data.targets().array();
  }
  const auto n = points_.rows();
  z_.resize(n);
  value_.resize(n);
  deriv_.resize(n);
  out_.resize(n);
  residual_.resize(n);
  weighted_x_.resize(n, points_.cols());
}

void Evaluator::row(const NetworkState& state, Eigen::Index k) {
  z_ = state.W(k, 0) * points_.col(0).array();
  for (Eigen::Index i = 1; i < points_.cols(); ++i) z_ += state.W(k, i) * points_.col(i).array();
}

void Evaluator::accumulate_outputs(const NetworkState& state) {
  if (state.input_dim() != points_.cols()) {
    throw DimensionError("network input dimension does not match the evaluator's dataset");
  }
  const auto n = static_cast<std::size_t>(points_.rows());
  out_.setZero();
  for (Eigen::Index k = 0; k < state.a.size(); ++k) {
    row(state, k);
    act_.eval(std::span<const double>(z_.data(), n), std::span<double>(value_.data(), n));
    out_ += state.a[k] * value_;
  }
  residual_ = weights_ * (out_ - targets_);
}

double Evaluator::risk(const NetworkState& state) {
  accumulate_outputs(state);
  return 0.5 * (residual_ * (out_ - targets_)).sum();
}

double Evaluator::evaluate(const NetworkState& state, Gradient& grad) {
  const double r = risk(state);
  const auto n = static_cast<std::size_t>(points_.rows());
  const Eigen::Index d = points_.cols();
  for (Eigen::Index i = 0; i < d; ++i) weighted_x_.col(i) = residual_ * points_.col(i).array();
  grad.a.resize(state.a.size());
  grad.W.resize(state.W.rows(), d);
  for (Eigen::Index k = 0; k < state.a.size(); ++k) {
    row(state, k);
    act_.eval(std::span<const double>(z_.data(), n), std::span<double>(value_.data(), n),
              std::span<double>(deriv_.data(), n));
    grad.a[k] = residual_.matrix().dot(value_.matrix());
    for (Eigen::Index i = 0; i < d; ++i) {
      grad.W(k, i) = state.a[k] * weighted_x_.col(i).matrix().dot(deriv_.matrix());
    }
  }
  return r;
}

}  // namespace stagelab
