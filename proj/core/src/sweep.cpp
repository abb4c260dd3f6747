#include "stagelab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <thread>
#include <tuple>

#include "stagelab/error.hpp"
#include "stagelab/format.hpp"

namespace stagelab {
namespace {

std::string optional_field(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string("nan");
}

std::optional<double> parse_optional(const std::string& field) {
  if (field.empty()) return std::nullopt;
  const double v = parse_double(field);
  if (std::isnan(v)) return std::nullopt;
  return v;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "# schema=" << kCsvSchema << '\n';
  return out;
}

}  // namespace

std::string SweepCell::key() const {
  return "m" + std::to_string(m) + "_a" + format_number(alpha) + "_" +
         std::string(to_string(target)) + "_s" + std::to_string(seed);
}

bool operator<(const SweepCell& x, const SweepCell& y) {
  return std::tie(x.m, x.alpha, x.target, x.seed) < std::tie(y.m, y.alpha, y.target, y.seed);
}

void SweepSpec::validate() const {
  if (m_values.empty() || alphas.empty() || targets.empty()) {
    throw ValidationError("sweep: m, alpha and target grids must be nonempty");
  }
  if (seeds < 1) throw ValidationError("sweep: seeds must be at least 1");
  for (const SweepCell& cell : cells()) cell_config(cell).validate();
}

std::vector<SweepCell> SweepSpec::cells() const {
  std::vector<SweepCell> out;
  for (int m : m_values) {
    for (double alpha : alphas) {
      for (TargetId target : targets) {
        for (int r = 0; r < seeds; ++r) {
          out.push_back({m, alpha, target, base.seed + static_cast<std::uint64_t>(r)});
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RunConfig SweepSpec::cell_config(const SweepCell& cell) const {
  RunConfig config = base;
  config.m = cell.m;
  config.alpha = cell.alpha;
  config.seed = cell.seed;
  return config;
}

CellRunner file_cell_runner(const SweepSpec& spec) {
  return [spec](const SweepCell& cell) {
    const RunConfig config = spec.cell_config(cell);
    DataSource source = spec.data;
    source.target = cell.target;
    const Dataset data = prepare_dataset(source, config.d);
    const TrainResult result = train(config, data, spec.stop);
    write_train_outputs(result, data, spec.out_dir / "cells" / cell.key());
    return result.milestones;
  };
}

std::vector<CellOutcome> run_cells(std::vector<SweepCell> cells, const CellRunner& runner,
                                   int workers) {
  std::vector<CellOutcome> outcomes(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      CellOutcome& out = outcomes[i];
      out.cell = cells[i];
      try {
        out.milestones = runner(cells[i]);
        out.ok = true;
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min<int>(workers, static_cast<int>(std::max<std::size_t>(cells.size(), 1)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  std::sort(outcomes.begin(), outcomes.end(),
            [](const CellOutcome& x, const CellOutcome& y) { return x.cell < y.cell; });
  return outcomes;
}

void write_sweep_csv(const std::vector<CellOutcome>& outcomes, const std::filesystem::path& path) {
  std::ofstream out = open_csv(path);
  out << "m,alpha,target,seed,T_d_emp,T_p_emp,T_sp_emp,T_p_pred,T_d_pred,T_sp_pred\n";
  for (const CellOutcome& o : outcomes) {
    if (!o.ok) continue;
    const auto& r = o.milestones;
    out << o.cell.m << ',' << format_number(o.cell.alpha) << ',' << to_string(o.cell.target) << ','
        << o.cell.seed << ',' << optional_field(r.T_d_emp) << ',' << optional_field(r.T_p_emp)
        << ',' << optional_field(r.T_sp_emp);
    if (r.prediction) {
      out << ',' << format_number(r.prediction->T_p) << ',' << format_number(r.prediction->T_d)
          << ',' << format_number(r.prediction->T_sp);
    } else {
      out << ",nan,nan,nan";
    }
    out << '\n';
  }
}

void write_sweep_summary(const std::vector<CellOutcome>& outcomes,
                         const std::filesystem::path& path) {
  struct Stats {
    int count = 0;
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(const std::optional<double>& v) {
      if (!v) return;
      ++count;
      sum += *v;
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
    }
  };
  struct Group {
    int runs = 0;
    Stats d, p, sp;
  };
  std::map<std::tuple<int, double, TargetId>, Group> groups;
  for (const CellOutcome& o : outcomes) {
    if (!o.ok) continue;
    Group& g = groups[{o.cell.m, o.cell.alpha, o.cell.target}];
    ++g.runs;
    g.d.add(o.milestones.T_d_emp);
    g.p.add(o.milestones.T_p_emp);
    g.sp.add(o.milestones.T_sp_emp);
  }
  std::ofstream out = open_csv(path);
  out << "m,alpha,target,runs";
  for (const char* name : {"T_d", "T_p", "T_sp"}) {
    out << ',' << name << "_count," << name << "_mean," << name << "_min," << name << "_max";
  }
  out << '\n';
  for (const auto& [key, g] : groups) {
    out << std::get<0>(key) << ',' << format_number(std::get<1>(key)) << ','
        << to_string(std::get<2>(key)) << ',' << g.runs;
    for (const Stats* s : {&g.d, &g.p, &g.sp}) {
      out << ',' << s->count;
      if (s->count > 0) {
        out << ',' << format_number(s->sum / s->count) << ',' << format_number(s->lo) << ','
            << format_number(s->hi);
      } else {
        out << ",nan,nan,nan";
      }
    }
    out << '\n';
  }
}

void write_sweep_failures(const std::vector<CellOutcome>& outcomes,
                          const std::filesystem::path& path) {
  std::ofstream out = open_csv(path);
  out << "cell,error\n";
  for (const CellOutcome& o : outcomes) {
    if (o.ok) continue;
    std::string msg = o.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out << o.cell.key() << ',' << msg << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  std::vector<std::string> header;
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_csv_line(line);
    if (header.empty()) {
      header = f;
      continue;
    }
    if (f.size() != header.size()) throw ValidationError(path.string() + ": ragged row");
    std::map<std::string, std::string> cols;
    for (std::size_t c = 0; c < f.size(); ++c) cols[header[c]] = f[c];
    for (const char* need : {"m", "alpha", "target", "seed", "T_d_emp"}) {
      if (!cols.count(need)) throw ValidationError(path.string() + ": missing column " + need);
    }
    SweepRow row;
    row.m = std::stoi(cols["m"]);
    row.alpha = parse_double(cols["alpha"]);
    row.target = cols["target"];
    row.seed = std::stoull(cols["seed"]);
    row.T_d_emp = parse_optional(cols["T_d_emp"]);
    if (cols.count("T_p_emp")) row.T_p_emp = parse_optional(cols["T_p_emp"]);
    if (cols.count("T_sp_emp")) row.T_sp_emp = parse_optional(cols["T_sp_emp"]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace stagelab
