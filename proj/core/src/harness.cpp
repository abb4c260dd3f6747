#include "stagelab/harness.hpp"

#include <fstream>

#include "stagelab/activation.hpp"
#include "stagelab/error.hpp"
#include "stagelab/format.hpp"

namespace stagelab {
namespace {

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

Dataset prepare_dataset(const DataSource& source, int d) {
  Dataset data = source.csv ? load_dataset_csv(*source.csv) : make_dataset(source.target, source.grid);
  if (source.normalize) data = normalize_dataset(data);
  if (data.dim() > d) {
    throw DimensionError("dataset has " + std::to_string(data.dim()) + " inputs but d=" +
                         std::to_string(d));
  }
  if (data.dim() < d) data = pad_dataset(data, d - data.dim());
  return data;
}

TrainResult train(const RunConfig& config, const Dataset& data, const StopCondition& stop) {
  const Activation act = activation_by_name(config.activation);
  TrainResult result;
  result.trajectory = run(config, data, act, stop);
  if (result.trajectory.records.size() >= 10) {
    result.milestones = detect_milestones(result.trajectory, config.beta, config.plateau_eps);
  } else {
    result.milestones.beta = config.beta;
    result.milestones.plateau_eps = config.plateau_eps;
    result.milestones.prediction = predict_milestones(config.alpha, config.m, config.beta);
  }
  return result;
}

void write_train_outputs(const TrainResult& result, const Dataset& data,
                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_trajectory_csv(result.trajectory, dir / "trajectory.csv");
  write_json(nlohmann::json(result.milestones), dir / "milestones.json");

  nlohmann::json summary = trajectory_summary(result.trajectory);
  const AssumptionReport& rep = data.assumption_report();
  summary["data"] = {{"n", data.size()},
                     {"d", data.dim()},
                     {"dev1", json_number(rep.dev1)},
                     {"dev2", json_number(rep.dev2)},
                     {"normalized", data.transform().has_value()}};
  summary["milestones"] = result.milestones;
  write_json(summary, dir / "summary.json");
}

}  // namespace stagelab
