#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace stagelab {

enum class Integrator { euler, rk4 };

[[nodiscard]] std::string_view to_string(Integrator integrator) noexcept;
[[nodiscard]] Integrator integrator_from_string(std::string_view name);

/// Everything that pins one simulation run.
struct RunConfig {
  int m = 1000;
  int d = 1;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  double step_size = 1e-3;
  double max_time = 10.0;
  int record_stride = 10;
  double beta = 0.05;
  double plateau_eps = 0.05;
  Integrator integrator = Integrator::euler;
  std::string activation = "tanh";

  /// Throws ValidationError naming the first violated field.
  void validate() const;
};

void to_json(nlohmann::json& j, const RunConfig& config);
/// Missing keys keep their current values, so a partial file overrides defaults.
void from_json(const nlohmann::json& j, RunConfig& config);

}  // namespace stagelab
