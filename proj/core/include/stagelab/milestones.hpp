#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "stagelab/trajectory.hpp"

namespace stagelab {

struct MilestonePrediction {
  double T_p = 0.0;
  double T_d = 0.0;
  double T_sp = 0.0;
  double alpha1 = 0.0;
  double gamma1 = 0.0;
};

/// Natural log throughout.
///   1/2 < alpha <= 3/2: alpha1 = alpha/2 + 1/4, gamma1 = 3 alpha/2 - 1/4, T_p = (2 alpha - 1)/4 log m
///   alpha > 3/2:        alpha1 = 1, gamma1 = 2, T_p = (alpha - 1) log m
///   T_d = (2 alpha - 1)/2 log m,  T_sp = T_d + log m / (40 beta)
[[nodiscard]] MilestonePrediction predict_milestones(double alpha, double m, double beta);

struct MilestoneReport {
  std::optional<double> T_p_emp;
  std::optional<double> T_d_emp;
  std::optional<double> T_sp_emp;
  std::optional<std::size_t> index_p;
  std::optional<std::size_t> index_d;
  std::optional<std::size_t> index_sp;
  std::optional<MilestonePrediction> prediction;
  double beta = 0.05;
  double plateau_eps = 0.05;

  // Mean loss-decay rates (R(start) - R(end)) / (t_end - t_start) over
  // [0, T_p], [T_p, T_d] and [T_d, T_sp].
  std::optional<double> rate_plateau;
  std::optional<double> rate_descent;
  std::optional<double> rate_secondary;
  std::optional<double> ratio_descent_plateau;
  std::optional<double> ratio_secondary_descent;
};

/// T_d: first record with K >= 1 - beta.
/// T_p: last record before T_d whose loss drop from t = 0 is at most
///      plateau_eps (R(0) - R(T_d)).
/// T_sp: first record after T_d with loss below R(T_d) (1 - plateau_eps).
/// Throws ValidationError unless t is strictly increasing and all three
/// series have the same length.
[[nodiscard]] MilestoneReport detect_milestones(const std::vector<double>& t,
                                                const std::vector<double>& loss,
                                                const std::vector<double>& K, double beta,
                                                double plateau_eps);

/// Detects on the records and attaches predictions from the trajectory's config.
[[nodiscard]] MilestoneReport detect_milestones(const Trajectory& trajectory, double beta,
                                                double plateau_eps);

void to_json(nlohmann::json& j, const MilestonePrediction& p);
void to_json(nlohmann::json& j, const MilestoneReport& report);

}  // namespace stagelab
