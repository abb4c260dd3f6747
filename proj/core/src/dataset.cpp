#include "stagelab/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "stagelab/error.hpp"
#include "stagelab/format.hpp"

namespace stagelab {
namespace {

AssumptionReport measure(const Dataset& data) {
  AssumptionReport report;
  const Eigen::MatrixXd moment = data.second_moment();
  const auto d = moment.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double target = (i == j) ? 1.0 : 0.0;
      report.dev1 = std::max(report.dev1, std::abs(moment(i, j) - target));
    }
  }
  Vector leading = data.leading_vector();
  leading[0] -= 1.0;
  report.dev2 = leading.norm();
  return report;
}

// Rotation in span{u, e1} taking unit vector u to e1; reflection when u is
// nearly antiparallel to e1 (always the case for d = 1 with u = -1).
Eigen::MatrixXd align_with_first_axis(const Vector& u) {
  const auto d = u.size();
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(d, d);
  Vector e1 = Vector::Zero(d);
  e1[0] = 1.0;
  const double c = u.dot(e1);
  if (c > -0.5) {
    const Eigen::MatrixXd k = e1 * u.transpose() - u * e1.transpose();
    result += k + (k * k) / (1.0 + c);
  } else {
    const Vector v = u - e1;
    result -= 2.0 * v * v.transpose() / v.squaredNorm();
  }
  return result;
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd points, Vector weights, Vector targets,
                 std::optional<AffineMap> transform)
    : points_(std::move(points)),
      weights_(std::move(weights)),
      targets_(std::move(targets)),
      transform_(std::move(transform)) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw ValidationError("dataset needs n >= 1 samples and d >= 1 inputs");
  }
  if (weights_.size() != points_.rows() || targets_.size() != points_.rows()) {
    throw DimensionError("dataset weights/targets length must equal the number of points");
  }
  if (!points_.allFinite() || !weights_.allFinite() || !targets_.allFinite()) {
    throw ValidationError("dataset has non-finite entries");
  }
  if ((weights_.array() < 0.0).any()) throw ValidationError("dataset weights must be nonnegative");
  if (std::abs(weights_.sum() - 1.0) > 1e-12) {
    throw ValidationError("dataset weights must sum to 1 (got " + format_number(weights_.sum()) +
                          ")");
  }
  report_ = measure(*this);
}

Eigen::MatrixXd Dataset::second_moment() const {
  return points_.transpose() * weights_.asDiagonal() * points_;
}

Vector Dataset::leading_vector() const {
  return points_.transpose() * (weights_.array() * targets_.array()).matrix();
}

double Dataset::max_input_norm() const { return points_.rowwise().norm().maxCoeff(); }

AssumptionReport check_assumptions(const Dataset& data, double tol) {
  AssumptionReport report = data.assumption_report();
  report.tol = tol;
  report.symmetric_sampling = report.dev1 <= tol;
  report.leading_term = report.dev2 <= tol;
  return report;
}

Dataset normalize_dataset(const Dataset& data) {
  const Eigen::MatrixXd moment = data.second_moment();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(moment);
  const Vector lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() > 1e-12 * std::max(1.0, lambda.maxCoeff()))) {
    throw NumericError("normalize_dataset: singular input second-moment matrix");
  }
  const Eigen::MatrixXd inv_sqrt = eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
                                   eig.eigenvectors().transpose();
  const Vector whitened_leading = inv_sqrt * data.leading_vector();
  const double rms_target =
      std::sqrt((data.weights().array() * data.targets().array().square()).sum());
  const double strength = whitened_leading.norm();
  if (!(strength > 1e-10 * std::max(rms_target, 1e-300))) {
    throw ValidationError("normalize_dataset: vanishing leading term sum rho f(x) x = 0");
  }
  const Eigen::MatrixXd input_map = align_with_first_axis(whitened_leading / strength) * inv_sqrt;
  const double target_scale = 1.0 / strength;

  Eigen::MatrixXd points = data.points() * input_map.transpose();
  Vector targets = data.targets() * target_scale;

  AffineMap map{input_map, target_scale};
  if (data.transform()) {
    map.input = input_map * data.transform()->input;
    map.target_scale = target_scale * data.transform()->target_scale;
  }
  return Dataset(std::move(points), data.weights(), std::move(targets), std::move(map));
}

Dataset pad_dataset(const Dataset& data, int extra_dims) {
  if (extra_dims < 0 || extra_dims > 16) throw ValidationError("pad_dataset: extra_dims in [0, 16]");
  if (extra_dims == 0) return data;
  const Eigen::Index n = data.size();
  const Eigen::Index d = data.dim();
  const Eigen::Index patterns = Eigen::Index{1} << extra_dims;
  Eigen::MatrixXd points(n * patterns, d + extra_dims);
  Vector weights(n * patterns);
  Vector targets(n * patterns);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index p = 0; p < patterns; ++p) {
      const Eigen::Index row = s * patterns + p;
      points.row(row).head(d) = data.points().row(s);
      for (int e = 0; e < extra_dims; ++e) points(row, d + e) = ((p >> e) & 1) ? -1.0 : 1.0;
      weights[row] = data.weights()[s] / static_cast<double>(patterns);
      targets[row] = data.targets()[s];
    }
  }
  return Dataset(std::move(points), std::move(weights), std::move(targets));
}

Dataset load_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset file " + path.string());
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (header.empty()) {
      header = std::move(fields);
      if (header.size() < 3) throw ValidationError("dataset header needs x_1..x_d,weight,target");
      const auto d = header.size() - 2;
      for (std::size_t i = 0; i < d; ++i) {
        if (header[i] != "x_" + std::to_string(i + 1)) {
          throw ValidationError("dataset header column " + std::to_string(i + 1) +
                                " must be x_" + std::to_string(i + 1));
        }
      }
      if (header[d] != "weight" || header[d + 1] != "target") {
        throw ValidationError("dataset header must end with weight,target");
      }
      continue;
    }
    if (fields.size() != header.size()) {
      throw ValidationError("dataset line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields");
    }
    std::vector<double> values;
    values.reserve(fields.size());
    for (const auto& f : fields) values.push_back(parse_double(f));
    rows.push_back(std::move(values));
  }
  if (header.empty() || rows.empty()) throw ValidationError("dataset file has no samples");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(header.size() - 2);
  Eigen::MatrixXd points(n, d);
  Vector weights(n);
  Vector targets(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index i = 0; i < d; ++i) points(s, i) = rows[s][i];
    weights[s] = rows[s][d];
    targets[s] = rows[s][d + 1];
  }
  return Dataset(std::move(points), std::move(weights), std::move(targets));
}

void save_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write dataset file " + path.string());
  out << "# schema=" << kCsvSchema << '\n';
  for (int i = 0; i < data.dim(); ++i) out << "x_" << (i + 1) << ',';
  out << "weight,target\n";
  for (int s = 0; s < data.size(); ++s) {
    for (int i = 0; i < data.dim(); ++i) out << format_number(data.points()(s, i)) << ',';
    out << format_number(data.weights()[s]) << ',' << format_number(data.targets()[s]) << '\n';
  }
}

}  // namespace stagelab
