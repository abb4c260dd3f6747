#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stagelab/config.hpp"
#include "stagelab/network.hpp"

namespace stagelab {

struct Record {
  double t = 0.0;
  double loss = 0.0;
  double K = 0.0;
  double K_prime = 0.0;
  double q_max = 0.0;
  double norm_a = 0.0;
  double norm_W = 0.0;
  std::vector<double> direction_sums;  // sum_k (w_k^i)^2, i = 1..d
  double w2_rel = 0.0;
  double condensation_ratio = 0.0;
  double grad_inf = 0.0;
  double theta_inf = 0.0;
  double r_max = 0.0;  // against the linearized flow from the initial state
};

struct Trajectory {
  RunConfig config;
  std::vector<Record> records;
  NetworkState initial;
  NetworkState terminal;
};

/// Column order:
///   t,loss,K,K_prime,q_max,norm_a,norm_W,dir_sum_1..dir_sum_d,
///   w2_rel,condensation_ratio,grad_inf,theta_inf,r_max
[[nodiscard]] std::vector<std::string> trajectory_columns(int d);

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);
void write_trajectory_csv(const Trajectory& trajectory, const std::filesystem::path& path);

/// Reads back a file produced by write_trajectory_csv. The config is left at
/// defaults apart from d.
[[nodiscard]] Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Terminal-state statistics and the config echo.
[[nodiscard]] nlohmann::json trajectory_summary(const Trajectory& trajectory);

}  // namespace stagelab
