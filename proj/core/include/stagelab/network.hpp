#pragma once

#include <Eigen/Core>

#include "stagelab/config.hpp"

namespace stagelab {

using Vector = Eigen::VectorXd;
/// Row k holds w_k; rows are contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Parameters theta = (a, W) of f(x) = sum_k a_k sigma(w_k . x) at flow time t.
struct NetworkState {
  Vector a;
  RowMatrix W;
  double t = 0.0;

  NetworkState() = default;
  NetworkState(Vector a_, RowMatrix W_, double t_ = 0.0);

  [[nodiscard]] int width() const noexcept { return static_cast<int>(a.size()); }
  [[nodiscard]] int input_dim() const noexcept { return static_cast<int>(W.cols()); }

  /// Throws DimensionError or NumericError.
  void check() const;
  [[nodiscard]] bool all_finite() const noexcept;
};

/// a_k ~ N(0, m^{-2 alpha}), w_k^i ~ N(0, m^{-2 alpha}); t = 0.
/// a_k is normal #k of stream 0, W(k, i) is normal #(k d + i) of stream 1.
[[nodiscard]] NetworkState init_params(const RunConfig& config);

}  // namespace stagelab
