#include "stagelab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "stagelab/error.hpp"
#include "stagelab/format.hpp"

namespace stagelab {

std::string_view to_string(Covariate c) noexcept { return c == Covariate::log_m ? "log m" : "alpha"; }

Covariate covariate_from_string(std::string_view name) {
  if (name == "log m" || name == "log_m" || name == "logm") return Covariate::log_m;
  if (name == "alpha") return Covariate::alpha;
  throw ValidationError("unknown covariate '" + std::string(name) + "' (expected 'log m' or alpha)");
}

std::string_view to_string(FitMode mode) noexcept {
  return mode == FitMode::cell_mean ? "cell_mean" : "pooled";
}

FitResult fit_ols(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("fit_ols: x and y lengths differ");
  if (std::set<double>(x.begin(), x.end()).size() < 3) {
    throw ValidationError("fit_ols: rank-deficient design, need at least 3 distinct covariate values");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.x = x;
  fit.y = y;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    fit.residuals.push_back(r);
    sse += r * r;
  }
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  if (!std::isfinite(fit.slope) || !std::isfinite(fit.intercept)) {
    throw NumericError("fit_ols: non-finite coefficients");
  }
  return fit;
}

std::vector<FitResult> fit_sweep(const std::vector<SweepRow>& rows, Covariate covariate,
                                 FitMode mode) {
  // group -> covariate value -> samples
  std::map<std::tuple<double, std::string>, std::map<double, std::vector<double>>> groups;
  for (const SweepRow& row : rows) {
    if (!row.T_d_emp) continue;
    const double fixed = covariate == Covariate::log_m ? row.alpha : static_cast<double>(row.m);
    const double x = covariate == Covariate::log_m ? std::log(static_cast<double>(row.m)) : row.alpha;
    groups[{fixed, row.target}][x].push_back(*row.T_d_emp);
  }
  std::vector<FitResult> fits;
  for (const auto& [key, cells] : groups) {
    if (cells.size() < 3) continue;
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& [xv, ys] : cells) {
      if (mode == FitMode::cell_mean) {
        double sum = 0.0;
        for (double v : ys) sum += v;
        x.push_back(xv);
        y.push_back(sum / static_cast<double>(ys.size()));
      } else {
        for (double v : ys) {
          x.push_back(xv);
          y.push_back(v);
        }
      }
    }
    FitResult fit = fit_ols(x, y);
    fit.covariate = covariate;
    fit.mode = mode;
    fit.group = (covariate == Covariate::log_m ? "alpha=" : "m=") +
                format_number(std::get<0>(key)) + ",target=" + std::get<1>(key);
    fits.push_back(std::move(fit));
  }
  if (fits.empty()) {
    throw ValidationError("fit: no group has 3 distinct covariate values with T_d_emp present");
  }
  return fits;
}

void to_json(nlohmann::json& j, const FitResult& fit) {
  auto numbers = [](const std::vector<double>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (double x : v) arr.push_back(json_number(x));
    return arr;
  };
  j = {{"group", fit.group},
       {"covariate", to_string(fit.covariate)},
       {"mode", to_string(fit.mode)},
       {"slope", json_number(fit.slope)},
       {"intercept", json_number(fit.intercept)},
       {"r2", json_number(fit.r2)},
       {"x", numbers(fit.x)},
       {"y", numbers(fit.y)},
       {"residuals", numbers(fit.residuals)}};
}

}  // namespace stagelab
