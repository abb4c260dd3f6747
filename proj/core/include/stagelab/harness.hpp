#pragma once

#include <filesystem>
#include <optional>

#include "stagelab/config.hpp"
#include "stagelab/dataset.hpp"
#include "stagelab/dynamics.hpp"
#include "stagelab/milestones.hpp"
#include "stagelab/targets.hpp"
#include "stagelab/trajectory.hpp"

namespace stagelab {

/// Where training data comes from: a built-in grid target or a CSV file.
struct DataSource {
  TargetId target = TargetId::f1;
  GridSpec grid;
  std::optional<std::filesystem::path> csv;
  bool normalize = false;
};

/// Loads or generates the data, normalizes it if asked, then pads with +-1
/// directions up to `d` inputs. Throws DimensionError when the data already
/// has more than `d` inputs.
[[nodiscard]] Dataset prepare_dataset(const DataSource& source, int d);

struct TrainResult {
  Trajectory trajectory;
  MilestoneReport milestones;
};

/// Runs one trajectory. Milestones are detected when there are at least 10
/// records; otherwise only the predictions are filled in.
[[nodiscard]] TrainResult train(const RunConfig& config, const Dataset& data,
                                const StopCondition& stop = {});

/// Writes trajectory.csv, milestones.json and summary.json into `dir`.
void write_train_outputs(const TrainResult& result, const Dataset& data,
                         const std::filesystem::path& dir);

}  // namespace stagelab
