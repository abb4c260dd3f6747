#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "stagelab/harness.hpp"

namespace stagelab {

struct SweepCell {
  int m = 0;
  double alpha = 0.0;
  TargetId target = TargetId::f1;
  std::uint64_t seed = 0;

  /// Directory name, e.g. "m1000_a1_f1_s0".
  [[nodiscard]] std::string key() const;
  friend bool operator<(const SweepCell& x, const SweepCell& y);
  friend bool operator==(const SweepCell& x, const SweepCell& y) = default;
};

struct SweepSpec {
  std::vector<int> m_values;
  std::vector<double> alphas;
  std::vector<TargetId> targets;
  int seeds = 3;  // replicate r uses seed base.seed + r
  RunConfig base;
  DataSource data;
  StopCondition stop;
  std::filesystem::path out_dir = "out";
  int workers = 0;  // 0: hardware concurrency

  /// Throws ValidationError for empty grids or a cell config that fails validation.
  void validate() const;
  [[nodiscard]] std::vector<SweepCell> cells() const;
  [[nodiscard]] RunConfig cell_config(const SweepCell& cell) const;
};

struct CellOutcome {
  SweepCell cell;
  bool ok = false;
  std::string error;
  MilestoneReport milestones;
};

/// Runs one cell; may throw, which marks the cell as failed.
using CellRunner = std::function<MilestoneReport(const SweepCell&)>;

/// Default runner: train and write into out_dir/cells/<key>/.
[[nodiscard]] CellRunner file_cell_runner(const SweepSpec& spec);

/// Executes `cells` on a bounded worker pool. The result is sorted by cell
/// key, whatever the execution order.
[[nodiscard]] std::vector<CellOutcome> run_cells(std::vector<SweepCell> cells,
                                                 const CellRunner& runner, int workers);

/// sweep.csv: successful cells only, with predictions.
void write_sweep_csv(const std::vector<CellOutcome>& outcomes, const std::filesystem::path& path);
/// sweep_summary.csv: mean/min/max of each milestone over seeds per (m, alpha, target).
void write_sweep_summary(const std::vector<CellOutcome>& outcomes,
                         const std::filesystem::path& path);
/// sweep_failures.csv: key and message per failed cell.
void write_sweep_failures(const std::vector<CellOutcome>& outcomes,
                          const std::filesystem::path& path);

struct SweepRow {
  int m = 0;
  double alpha = 0.0;
  std::string target;
  std::uint64_t seed = 0;
  std::optional<double> T_d_emp;
  std::optional<double> T_p_emp;
  std::optional<double> T_sp_emp;
};

[[nodiscard]] std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

}  // namespace stagelab
