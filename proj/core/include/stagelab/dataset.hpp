#pragma once

#include <filesystem>
#include <optional>

#include <Eigen/Core>

#include "stagelab/network.hpp"

namespace stagelab {

/// Deviation of a dataset from the moment conditions the analysis assumes.
///   dev1 = max_ij |sum_s rho_s x_s^i x_s^j - delta_ij|   (unit, uncorrelated inputs)
///   dev2 = || sum_s rho_s f(x_s) x_s - e_1 ||_2           (leading direction e_1)
struct AssumptionReport {
  double dev1 = 0.0;
  double dev2 = 0.0;
  double tol = 0.0;
  bool symmetric_sampling = false;  // dev1 <= tol
  bool leading_term = false;        // dev2 <= tol
};

/// Input map x' = input * x and target map f' = target_scale * f.
struct AffineMap {
  Eigen::MatrixXd input;
  double target_scale = 1.0;
};

/// Weighted empirical measure rho = sum_s rho_s delta_{x_s} with targets f(x_s).
/// Immutable after construction.
class Dataset {
 public:
  /// points is n x d. Throws ValidationError unless n >= 1, weights are
  /// nonnegative and sum to 1 within 1e-12, and everything is finite.
  Dataset(Eigen::MatrixXd points, Vector weights, Vector targets,
          std::optional<AffineMap> transform = std::nullopt);

  [[nodiscard]] const Eigen::MatrixXd& points() const noexcept { return points_; }
  [[nodiscard]] const Vector& weights() const noexcept { return weights_; }
  [[nodiscard]] const Vector& targets() const noexcept { return targets_; }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(points_.rows()); }
  [[nodiscard]] int dim() const noexcept { return static_cast<int>(points_.cols()); }
  [[nodiscard]] const AssumptionReport& assumption_report() const noexcept { return report_; }
  /// Present when the dataset came out of normalize_dataset.
  [[nodiscard]] const std::optional<AffineMap>& transform() const noexcept { return transform_; }

  /// sum_s rho_s x_s x_s^T
  [[nodiscard]] Eigen::MatrixXd second_moment() const;
  /// sum_s rho_s f(x_s) x_s
  [[nodiscard]] Vector leading_vector() const;
  /// max_s ||x_s||_2
  [[nodiscard]] double max_input_norm() const;

 private:
  Eigen::MatrixXd points_;
  Vector weights_;
  Vector targets_;
  std::optional<AffineMap> transform_;
  AssumptionReport report_;
};

/// Moment deviations plus pass flags at `tol`. Never mutates `data`.
[[nodiscard]] AssumptionReport check_assumptions(const Dataset& data, double tol);

/// Whitens inputs so sum rho x x^T = I, reflects so sum rho f x lies along +e_1,
/// then rescales targets so sum rho f x = e_1. Throws NumericError for a
/// singular second moment and ValidationError for a vanishing leading term.
[[nodiscard]] Dataset normalize_dataset(const Dataset& data);

/// Appends `extra_dims` input directions with values +-1, replicating every
/// sample over all 2^extra_dims sign patterns with weight rho_s / 2^extra_dims.
/// New directions have unit variance and zero moments against x and f.
[[nodiscard]] Dataset pad_dataset(const Dataset& data, int extra_dims);

/// Reads a CSV with header x_1,...,x_d,weight,target. Lines starting with '#'
/// are skipped.
[[nodiscard]] Dataset load_dataset_csv(const std::filesystem::path& path);
void save_dataset_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace stagelab
