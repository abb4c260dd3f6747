#include "stagelab/network.hpp"

#include <cmath>
#include <utility>

#include "stagelab/error.hpp"
#include "stagelab/rng.hpp"

namespace stagelab {

NetworkState::NetworkState(Vector a_, RowMatrix W_, double t_)
    : a(std::move(a_)), W(std::move(W_)), t(t_) {
  check();
}

void NetworkState::check() const {
  if (a.size() < 1) throw DimensionError("network width must be at least 1");
  if (W.rows() != a.size()) throw DimensionError("rows(W) must equal length(a)");
  if (W.cols() < 1) throw DimensionError("input dimension must be at least 1");
  if (!all_finite()) throw NumericError("network state has non-finite entries");
}

bool NetworkState::all_finite() const noexcept {
  return a.allFinite() && W.allFinite() && std::isfinite(t);
}

NetworkState init_params(const RunConfig& config) {
  config.validate();
  const auto m = static_cast<Eigen::Index>(config.m);
  const auto d = static_cast<Eigen::Index>(config.d);
  const double scale = std::pow(static_cast<double>(config.m), -config.alpha);

  const NormalStream outer(config.seed, 0);
  const NormalStream inner(config.seed, 1);
  Vector a(m);
  RowMatrix W(m, d);
  for (Eigen::Index k = 0; k < m; ++k) {
    a[k] = scale * outer(static_cast<std::uint64_t>(k));
    for (Eigen::Index i = 0; i < d; ++i) {
      W(k, i) = scale * inner(static_cast<std::uint64_t>(k * d + i));
    }
  }
  return NetworkState(std::move(a), std::move(W), 0.0);
}

}  // namespace stagelab
