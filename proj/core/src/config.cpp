#include "stagelab/config.hpp"

#include <cmath>

#include "stagelab/error.hpp"

namespace stagelab {

std::string_view to_string(Integrator integrator) noexcept {
  return integrator == Integrator::rk4 ? "rk4" : "euler";
}

Integrator integrator_from_string(std::string_view name) {
  if (name == "euler") return Integrator::euler;
  if (name == "rk4") return Integrator::rk4;
  throw ValidationError("unknown integrator '" + std::string(name) + "' (expected euler|rk4)");
}

void RunConfig::validate() const {
  if (m < 1) throw ValidationError("m must be a positive integer");
  if (d < 1) throw ValidationError("d must be a positive integer");
  if (!(alpha > 0.5) || !std::isfinite(alpha)) {
    throw ValidationError("alpha must exceed 1/2 (small-initialization regime)");
  }
  if (!(step_size > 0.0) || step_size > 0.1) throw ValidationError("step_size must lie in (0, 0.1]");
  if (!(max_time >= 0.0) || !std::isfinite(max_time)) {
    throw ValidationError("max_time must be finite and nonnegative");
  }
  if (record_stride < 1) throw ValidationError("record_stride must be a positive integer");
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("beta must lie in (0, 1)");
  if (!(plateau_eps > 0.0 && plateau_eps < 1.0)) {
    throw ValidationError("plateau_eps must lie in (0, 1)");
  }
  if (activation != "tanh" && activation != "identity") {
    throw ValidationError("activation must be tanh or identity");
  }
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{{"m", c.m},
                     {"d", c.d},
                     {"alpha", c.alpha},
                     {"seed", c.seed},
                     {"step_size", c.step_size},
                     {"max_time", c.max_time},
                     {"record_stride", c.record_stride},
                     {"beta", c.beta},
                     {"plateau_eps", c.plateau_eps},
                     {"integrator", std::string(to_string(c.integrator))},
                     {"activation", c.activation}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  if (!j.is_object()) throw ValidationError("run config must be a JSON object");
  try {
    if (j.contains("m")) c.m = j.at("m").get<int>();
    if (j.contains("d")) c.d = j.at("d").get<int>();
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("step_size")) c.step_size = j.at("step_size").get<double>();
    if (j.contains("max_time")) c.max_time = j.at("max_time").get<double>();
    if (j.contains("record_stride")) c.record_stride = j.at("record_stride").get<int>();
    if (j.contains("beta")) c.beta = j.at("beta").get<double>();
    if (j.contains("plateau_eps")) c.plateau_eps = j.at("plateau_eps").get<double>();
    if (j.contains("integrator")) {
      c.integrator = integrator_from_string(j.at("integrator").get<std::string>());
    }
    if (j.contains("activation")) c.activation = j.at("activation").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("run config: ") + e.what());
  }
}

}  // namespace stagelab
