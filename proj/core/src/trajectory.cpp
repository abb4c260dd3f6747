#include "stagelab/trajectory.hpp"

#include <fstream>
#include <sstream>

#include "stagelab/diagnostics.hpp"
#include "stagelab/error.hpp"
#include "stagelab/format.hpp"

namespace stagelab {

std::vector<std::string> trajectory_columns(int d) {
  std::vector<std::string> cols{"t", "loss", "K", "K_prime", "q_max", "norm_a", "norm_W"};
  for (int i = 1; i <= d; ++i) cols.push_back("dir_sum_" + std::to_string(i));
  for (const char* c : {"w2_rel", "condensation_ratio", "grad_inf", "theta_inf", "r_max"}) {
    cols.emplace_back(c);
  }
  return cols;
}

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
  const int d = trajectory.config.d;
  out << "# schema=" << kCsvSchema << '\n';
  const auto cols = trajectory_columns(d);
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  for (const Record& r : trajectory.records) {
    out << format_number(r.t) << ',' << format_number(r.loss) << ',' << format_number(r.K) << ','
        << format_number(r.K_prime) << ',' << format_number(r.q_max) << ','
        << format_number(r.norm_a) << ',' << format_number(r.norm_W);
    for (double v : r.direction_sums) out << ',' << format_number(v);
    out << ',' << format_number(r.w2_rel) << ',' << format_number(r.condensation_ratio) << ','
        << format_number(r.grad_inf) << ',' << format_number(r.theta_inf) << ','
        << format_number(r.r_max) << '\n';
  }
}

void write_trajectory_csv(const Trajectory& trajectory, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_trajectory_csv(trajectory, out);
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "# schema=" + std::to_string(kCsvSchema)) {
    throw ValidationError(path.string() + ": missing '# schema=1' header");
  }
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": missing column header");
  const auto header = split_csv_line(line);
  if (header.size() < 13) throw ValidationError(path.string() + ": too few columns");
  const int d = static_cast<int>(header.size()) - 12;
  if (header != trajectory_columns(d)) throw ValidationError(path.string() + ": unexpected columns");

  Trajectory traj;
  traj.config.d = d;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) throw ValidationError(path.string() + ": ragged row");
    std::size_t c = 0;
    auto next = [&] { return parse_double(f[c++]); };
    Record r;
    r.t = next();
    r.loss = next();
    r.K = next();
    r.K_prime = next();
    r.q_max = next();
    r.norm_a = next();
    r.norm_W = next();
    for (int i = 0; i < d; ++i) r.direction_sums.push_back(next());
    r.w2_rel = next();
    r.condensation_ratio = next();
    r.grad_inf = next();
    r.theta_inf = next();
    r.r_max = next();
    traj.records.push_back(std::move(r));
  }
  return traj;
}

nlohmann::json trajectory_summary(const Trajectory& trajectory) {
  nlohmann::json j;
  j["schema"] = kCsvSchema;
  j["config"] = trajectory.config;
  j["records"] = trajectory.records.size();
  if (!trajectory.records.empty()) {
    const Record& first = trajectory.records.front();
    const Record& last = trajectory.records.back();
    j["initial_loss"] = json_number(first.loss);
    j["final_time"] = json_number(last.t);
    j["final_loss"] = json_number(last.loss);
  }
  const NetworkState& s = trajectory.terminal;
  if (s.a.size() > 0) {
    const MacroQuantities q = macro_quantities(s);
    j["terminal"] = {
        {"t", json_number(s.t)},
        {"K", json_number(q.K)},
        {"K_prime", json_number(q.K_prime)},
        {"q_max", json_number(q.q_max)},
        {"norm_a", json_number(q.norm_a)},
        {"norm_W", json_number(q.norm_W)},
        {"norm_ratio", json_number(q.norm_a / q.norm_W)},
    };
  }
  return j;
}

}  // namespace stagelab
