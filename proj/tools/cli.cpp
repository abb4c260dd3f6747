#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stagelab/config.hpp"
#include "stagelab/dataset.hpp"
#include "stagelab/error.hpp"
#include "stagelab/fit.hpp"
#include "stagelab/format.hpp"
#include "stagelab/harness.hpp"
#include "stagelab/milestones.hpp"
#include "stagelab/sweep.hpp"
#include "stagelab/version.hpp"

namespace stagelab::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Flags left unset do not touch the file or default values.
struct RunFlags {
  std::optional<std::string> config_file;
  std::optional<int> m;
  std::optional<int> d;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  std::optional<double> step_size;
  std::optional<double> max_time;
  std::optional<int> record_stride;
  std::optional<double> beta;
  std::optional<double> plateau_eps;
  std::optional<std::string> integrator;
  std::optional<std::string> activation;

  std::optional<std::string> target;
  std::optional<int> n;
  std::optional<double> lo;
  std::optional<double> hi;
  bool normalize = false;
  std::optional<std::string> data_csv;
  std::optional<std::string> stop;
  std::optional<double> loss_below;
  std::optional<std::string> out;
};

void add_data_flags(CLI::App& cmd, RunFlags& f) {
  cmd.add_option("--target", f.target, "Built-in target: f1, f2 or f3 (default f1)");
  cmd.add_option("--n", f.n, "Grid points (default 1000)");
  cmd.add_option("--lo", f.lo, "Grid lower end (default -15)");
  cmd.add_option("--hi", f.hi, "Grid upper end (default 15)");
  cmd.add_flag("--normalize", f.normalize, "Whiten inputs and align the leading term with e1");
  cmd.add_option("--data", f.data_csv, "CSV dataset (x_1..x_d,weight,target) instead of a grid");
}

void add_run_flags(CLI::App& cmd, RunFlags& f) {
  cmd.add_option("--config", f.config_file, "JSON config file; flags override its values");
  cmd.add_option("--m", f.m, "Width");
  cmd.add_option("--d", f.d, "Input dimension; extra directions are padded with +-1");
  cmd.add_option("--alpha", f.alpha, "Initialization exponent, > 1/2");
  cmd.add_option("--seed", f.seed, "Generator seed");
  cmd.add_option("--step-size", f.step_size, "Integrator step (learning rate)");
  cmd.add_option("--max-time", f.max_time, "Flow time to stop at");
  cmd.add_option("--record-stride", f.record_stride, "Steps between records");
  cmd.add_option("--beta", f.beta, "Descent threshold: K >= 1 - beta");
  cmd.add_option("--plateau-eps", f.plateau_eps, "Relative loss drop for plateau detection");
  cmd.add_option("--integrator", f.integrator, "euler or rk4");
  cmd.add_option("--activation", f.activation, "tanh or identity");
  cmd.add_option("--stop", f.stop, "Also stop at a milestone: none, descent, secondary");
  cmd.add_option("--loss-below", f.loss_below, "Stop once the loss drops below this value");
  cmd.add_option("--out", f.out, "Output directory");
  add_data_flags(cmd, f);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config file " + path + ": " + e.what());
  }
}

template <class T>
void take(const json& j, const char* key, std::optional<T>& slot) {
  if (slot || !j.contains(key)) return;
  try {
    slot = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config key '") + key + "': " + e.what());
  }
}

struct Resolved {
  RunConfig config;
  DataSource data;
  StopCondition stop;
  fs::path out;
  json file;  // raw config file, empty object when absent
};

MilestoneStop parse_stop(const std::string& s) {
  if (s == "none") return MilestoneStop::none;
  if (s == "descent") return MilestoneStop::descent;
  if (s == "secondary") return MilestoneStop::secondary;
  throw ValidationError("--stop must be none, descent or secondary");
}

// Precedence: flag > config file > built-in default. The output directory
// additionally falls back to the environment before the file.
Resolved resolve(RunFlags f, const std::string& default_out) {
  Resolved r;
  r.file = f.config_file ? read_json_file(*f.config_file) : json::object();
  if (!r.file.is_object()) throw ValidationError("config file must hold a JSON object");
  from_json(r.file, r.config);

  RunConfig& c = r.config;
  if (f.m) c.m = *f.m;
  if (f.d) c.d = *f.d;
  if (f.alpha) c.alpha = *f.alpha;
  if (f.seed) c.seed = *f.seed;
  if (f.step_size) c.step_size = *f.step_size;
  if (f.max_time) c.max_time = *f.max_time;
  if (f.record_stride) c.record_stride = *f.record_stride;
  if (f.beta) c.beta = *f.beta;
  if (f.plateau_eps) c.plateau_eps = *f.plateau_eps;
  if (f.integrator) c.integrator = integrator_from_string(*f.integrator);
  if (f.activation) c.activation = *f.activation;
  c.validate();

  take(r.file, "target", f.target);
  take(r.file, "n", f.n);
  take(r.file, "lo", f.lo);
  take(r.file, "hi", f.hi);
  take(r.file, "data", f.data_csv);
  take(r.file, "stop", f.stop);
  take(r.file, "loss_below", f.loss_below);
  if (!f.normalize && r.file.contains("normalize")) f.normalize = r.file.at("normalize").get<bool>();

  r.data.target = target_from_string(f.target.value_or("f1"));
  r.data.grid.n = f.n.value_or(1000);
  r.data.grid.lo = f.lo.value_or(-15.0);
  r.data.grid.hi = f.hi.value_or(15.0);
  if (f.data_csv) r.data.csv = fs::path(*f.data_csv);
  r.data.normalize = f.normalize;

  r.stop.milestone = parse_stop(f.stop.value_or("none"));
  r.stop.loss_below = f.loss_below;

  if (f.out) {
    r.out = *f.out;
  } else if (const char* env = std::getenv(kOutputDirEnv); env && *env) {
    r.out = env;
  } else if (r.file.contains("out")) {
    r.out = r.file.at("out").get<std::string>();
  } else {
    r.out = default_out;
  }
  return r;
}

void write_json(const json& j, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

int cmd_train(const RunFlags& flags, std::ostream& out) {
  const Resolved r = resolve(flags, "out");
  const Dataset data = prepare_dataset(r.data, r.config.d);
  const TrainResult result = train(r.config, data, r.stop);
  write_train_outputs(result, data, r.out);
  out << "wrote " << (r.out / "trajectory.csv").string() << " ("
      << result.trajectory.records.size() << " records)\n";
  out << json(result.milestones).dump(2) << '\n';
  return kOk;
}

struct SweepFlags {
  std::vector<int> m_values{1000, 5000, 10000, 20000};
  std::vector<double> alphas{1.0};
  std::vector<std::string> targets{"f1"};
  int seeds = 3;
  int workers = 0;
  bool large = false;
};

int cmd_sweep(const RunFlags& flags, const SweepFlags& sf, std::ostream& out, std::ostream& err) {
  const Resolved r = resolve(flags, "out");
  SweepSpec spec;
  spec.m_values = sf.m_values;
  if (sf.large) {
    spec.m_values.push_back(50000);
    spec.m_values.push_back(100000);
  }
  spec.alphas = sf.alphas;
  for (const auto& t : sf.targets) spec.targets.push_back(target_from_string(t));
  spec.seeds = sf.seeds;
  spec.base = r.config;
  spec.data = r.data;
  spec.stop = r.stop;
  spec.out_dir = r.out;
  spec.workers = sf.workers;
  spec.validate();

  const auto outcomes = run_cells(spec.cells(), file_cell_runner(spec), spec.workers);
  write_sweep_csv(outcomes, spec.out_dir / "sweep.csv");
  write_sweep_summary(outcomes, spec.out_dir / "sweep_summary.csv");
  int failed = 0;
  for (const auto& o : outcomes) {
    if (o.ok) continue;
    ++failed;
    err << "cell " << o.cell.key() << " failed: " << o.error << '\n';
  }
  if (failed > 0) write_sweep_failures(outcomes, spec.out_dir / "sweep_failures.csv");
  out << "wrote " << (spec.out_dir / "sweep.csv").string() << " (" << outcomes.size() - failed
      << " of " << outcomes.size() << " cells)\n";
  return failed > 0 ? kPartialSweep : kOk;
}

int cmd_fit(const std::string& sweep_csv, const std::string& covariate, const std::string& mode,
            const std::optional<std::string>& out_dir, std::ostream& out) {
  const auto rows = read_sweep_csv(sweep_csv);
  const Covariate cov = covariate_from_string(covariate);
  std::vector<FitMode> modes;
  if (mode == "cell-mean" || mode == "both") modes.push_back(FitMode::cell_mean);
  if (mode == "pooled" || mode == "both") modes.push_back(FitMode::pooled);
  if (modes.empty()) throw ValidationError("--mode must be cell-mean, pooled or both");
  json fits = json::array();
  for (FitMode m : modes) {
    for (const FitResult& fit : fit_sweep(rows, cov, m)) fits.push_back(fit);
  }
  const json doc = {{"covariate", to_string(cov)}, {"fits", fits}};
  std::optional<fs::path> dir;
  if (out_dir) {
    dir = *out_dir;
  } else if (const char* env = std::getenv(kOutputDirEnv); env && *env) {
    dir = fs::path(env);
  }
  if (dir) write_json(doc, *dir / (cov == Covariate::log_m ? "fit_log_m.json" : "fit_alpha.json"));
  out << doc.dump(2) << '\n';
  return kOk;
}

int cmd_check_data(RunFlags flags, double tol, std::ostream& out) {
  const Resolved r = resolve(flags, "out");
  const Dataset data = prepare_dataset(r.data, r.config.d);
  const AssumptionReport rep = check_assumptions(data, tol);
  const json doc = {{"n", data.size()},
                    {"d", data.dim()},
                    {"normalized", data.transform().has_value()},
                    {"dev1", json_number(rep.dev1)},
                    {"dev2", json_number(rep.dev2)},
                    {"tol", json_number(rep.tol)},
                    {"symmetric_sampling", rep.symmetric_sampling},
                    {"leading_term", rep.leading_term}};
  out << doc.dump(2) << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient-flow laboratory for small-initialization two-layer networks", "stagelab"};
  app.require_subcommand(1);

  RunFlags train_flags;
  auto* train = app.add_subcommand("train", "Run one trajectory and write CSV/JSON artifacts");
  add_run_flags(*train, train_flags);

  RunFlags sweep_flags;
  SweepFlags sweep_grid;
  auto* sweep = app.add_subcommand("sweep", "Run a grid of (m, alpha, target, seed) cells");
  add_run_flags(*sweep, sweep_flags);
  sweep->add_option("--m-values", sweep_grid.m_values, "Widths")->delimiter(',');
  sweep->add_option("--alphas", sweep_grid.alphas, "Initialization exponents")->delimiter(',');
  sweep->add_option("--targets", sweep_grid.targets, "Target ids")->delimiter(',');
  sweep->add_option("--seeds", sweep_grid.seeds, "Replicates per cell (default 3)");
  sweep->add_option("--workers", sweep_grid.workers, "Parallel workers (0: all cores)");
  sweep->add_flag("--large", sweep_grid.large, "Add m = 50000 and 100000");

  std::string fit_csv;
  std::string fit_cov = "log m";
  std::string fit_mode = "both";
  std::optional<std::string> fit_out;
  auto* fit = app.add_subcommand("fit", "Least-squares fit of T_d against log m or alpha");
  fit->add_option("sweep_csv", fit_csv, "sweep.csv from the sweep command")->required();
  fit->add_option("--covariate", fit_cov, "'log m' or alpha");
  fit->add_option("--mode", fit_mode, "cell-mean, pooled or both");
  fit->add_option("--out", fit_out, "Directory for the fit JSON");

  double p_alpha = 1.0;
  double p_m = 1000.0;
  double p_beta = 0.05;
  auto* predict = app.add_subcommand("predict", "Theoretical milestones for (alpha, m, beta)");
  predict->add_option("--alpha", p_alpha, "Initialization exponent")->required();
  predict->add_option("--m", p_m, "Width")->required();
  predict->add_option("--beta", p_beta, "Descent threshold");

  RunFlags check_flags;
  double check_tol = 1e-8;
  auto* check = app.add_subcommand("check-data", "Report moment deviations of a dataset");
  add_data_flags(*check, check_flags);
  check->add_option("--d", check_flags.d, "Pad to this many inputs");
  check->add_option("--tol", check_tol, "Pass tolerance for dev1 and dev2");

  app.add_subcommand("version", "Print the version");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*train) return cmd_train(train_flags, out);
    if (*sweep) return cmd_sweep(sweep_flags, sweep_grid, out, err);
    if (*fit) return cmd_fit(fit_csv, fit_cov, fit_mode, fit_out, out);
    if (*predict) {
      out << json(predict_milestones(p_alpha, p_m, p_beta)).dump(2) << '\n';
      return kOk;
    }
    if (*check) return cmd_check_data(check_flags, check_tol, out);
    out << version_banner() << '\n';
    return kOk;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  }
}

}  // namespace stagelab::cli
