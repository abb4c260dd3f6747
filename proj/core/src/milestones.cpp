#include "stagelab/milestones.hpp"

#include <cmath>

#include "stagelab/error.hpp"
#include "stagelab/format.hpp"

namespace stagelab {
namespace {

std::optional<double> mean_rate(const std::vector<double>& t, const std::vector<double>& loss,
                                std::size_t from, std::size_t to) {
  if (to <= from) return std::nullopt;
  return (loss[from] - loss[to]) / (t[to] - t[from]);
}

std::optional<double> ratio(const std::optional<double>& num, const std::optional<double>& den) {
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

}  // namespace

MilestonePrediction predict_milestones(double alpha, double m, double beta) {
  if (!(alpha > 0.5)) throw ValidationError("predict_milestones: alpha must exceed 1/2");
  if (!(m >= 2.0)) throw ValidationError("predict_milestones: m must be at least 2");
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("predict_milestones: beta in (0, 1)");
  const double log_m = std::log(m);
  MilestonePrediction p;
  if (alpha <= 1.5) {
    p.alpha1 = alpha / 2.0 + 0.25;
    p.gamma1 = 1.5 * alpha - 0.25;
    p.T_p = (2.0 * alpha - 1.0) / 4.0 * log_m;
  } else {
    p.alpha1 = 1.0;
    p.gamma1 = 2.0;
    p.T_p = (alpha - 1.0) * log_m;
  }
  p.T_d = (2.0 * alpha - 1.0) / 2.0 * log_m;
  p.T_sp = p.T_d + log_m / (40.0 * beta);
  return p;
}

MilestoneReport detect_milestones(const std::vector<double>& t, const std::vector<double>& loss,
                                  const std::vector<double>& K, double beta, double plateau_eps) {
  if (t.size() != loss.size() || t.size() != K.size()) {
    throw DimensionError("detect_milestones: series lengths differ");
  }
  if (t.size() < 10) throw ValidationError("detect_milestones: need at least 10 records");
  for (std::size_t j = 1; j < t.size(); ++j) {
    if (!(t[j] > t[j - 1])) throw ValidationError("detect_milestones: time is not increasing");
  }
  MilestoneReport r;
  r.beta = beta;
  r.plateau_eps = plateau_eps;

  for (std::size_t j = 0; j < t.size(); ++j) {
    if (K[j] >= 1.0 - beta) {
      r.index_d = j;
      break;
    }
  }
  if (!r.index_d) return r;
  const std::size_t jd = *r.index_d;
  r.T_d_emp = t[jd];

  const double total_drop = loss[0] - loss[jd];
  for (std::size_t j = 0; j < jd; ++j) {
    if (loss[0] - loss[j] <= plateau_eps * total_drop) r.index_p = j;
  }
  if (r.index_p) r.T_p_emp = t[*r.index_p];

  const double exit_level = loss[jd] - plateau_eps * loss[jd];
  for (std::size_t j = jd + 1; j < t.size(); ++j) {
    if (loss[j] < exit_level) {
      r.index_sp = j;
      r.T_sp_emp = t[j];
      break;
    }
  }

  if (r.index_p) {
    r.rate_plateau = mean_rate(t, loss, 0, *r.index_p);
    r.rate_descent = mean_rate(t, loss, *r.index_p, jd);
  }
  if (r.index_sp) r.rate_secondary = mean_rate(t, loss, jd, *r.index_sp);
  r.ratio_descent_plateau = ratio(r.rate_descent, r.rate_plateau);
  r.ratio_secondary_descent = ratio(r.rate_secondary, r.rate_descent);
  return r;
}

MilestoneReport detect_milestones(const Trajectory& trajectory, double beta, double plateau_eps) {
  std::vector<double> t;
  std::vector<double> loss;
  std::vector<double> K;
  for (const Record& rec : trajectory.records) {
    t.push_back(rec.t);
    loss.push_back(rec.loss);
    K.push_back(rec.K);
  }
  MilestoneReport r = detect_milestones(t, loss, K, beta, plateau_eps);
  r.prediction = predict_milestones(trajectory.config.alpha, trajectory.config.m, beta);
  return r;
}

void to_json(nlohmann::json& j, const MilestonePrediction& p) {
  j = {{"T_p", json_number(p.T_p)},
       {"T_d", json_number(p.T_d)},
       {"T_sp", json_number(p.T_sp)},
       {"alpha1", json_number(p.alpha1)},
       {"gamma1", json_number(p.gamma1)}};
}

void to_json(nlohmann::json& j, const MilestoneReport& r) {
  auto index = [](const std::optional<std::size_t>& i) {
    return i ? nlohmann::json(*i) : nlohmann::json(nullptr);
  };
  j = {{"T_p_emp", json_number(r.T_p_emp)},
       {"T_d_emp", json_number(r.T_d_emp)},
       {"T_sp_emp", json_number(r.T_sp_emp)},
       {"index_p", index(r.index_p)},
       {"index_d", index(r.index_d)},
       {"index_sp", index(r.index_sp)},
       {"beta", json_number(r.beta)},
       {"plateau_eps", json_number(r.plateau_eps)},
       {"rate_plateau", json_number(r.rate_plateau)},
       {"rate_descent", json_number(r.rate_descent)},
       {"rate_secondary", json_number(r.rate_secondary)},
       {"ratio_descent_plateau", json_number(r.ratio_descent_plateau)},
       {"ratio_secondary_descent", json_number(r.ratio_secondary_descent)}};
  j["prediction"] = r.prediction ? nlohmann::json(*r.prediction) : nlohmann::json(nullptr);
}

}  // namespace stagelab
