#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stagelab/sweep.hpp"

namespace stagelab {

enum class Covariate { log_m, alpha };
enum class FitMode { cell_mean, pooled };

[[nodiscard]] std::string_view to_string(Covariate c) noexcept;
/// Accepts "log m", "log_m", "logm" and "alpha".
[[nodiscard]] Covariate covariate_from_string(std::string_view name);
[[nodiscard]] std::string_view to_string(FitMode mode) noexcept;

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> residuals;
  Covariate covariate = Covariate::log_m;
  FitMode mode = FitMode::cell_mean;
  std::string group;  // the factors held fixed, e.g. "alpha=1,target=f1"
};

/// Ordinary least squares y = slope x + intercept. Throws ValidationError
/// unless x has at least 3 distinct values.
[[nodiscard]] FitResult fit_ols(const std::vector<double>& x, const std::vector<double>& y);

/// Fits T_d_emp against the covariate within each group of the other
/// factors. Rows without T_d_emp are dropped; groups with fewer than 3
/// distinct covariate values are skipped. Throws ValidationError when no
/// group can be fitted.
[[nodiscard]] std::vector<FitResult> fit_sweep(const std::vector<SweepRow>& rows,
                                               Covariate covariate, FitMode mode);

void to_json(nlohmann::json& j, const FitResult& fit);

}  // namespace stagelab
