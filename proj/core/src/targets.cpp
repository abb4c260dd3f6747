#include "stagelab/targets.hpp"

#include <cmath>
#include <string>

#include "stagelab/error.hpp"

namespace stagelab {

std::string_view to_string(TargetId id) noexcept {
  switch (id) {
    case TargetId::f1:
      return "f1";
    case TargetId::f2:
      return "f2";
    case TargetId::f3:
      return "f3";
  }
  return "f1";
}

TargetId target_from_string(std::string_view name) {
  if (name == "f1") return TargetId::f1;
  if (name == "f2") return TargetId::f2;
  if (name == "f3") return TargetId::f3;
  throw ValidationError("unknown target id '" + std::string(name) + "' (expected f1, f2, f3)");
}

double target_value(TargetId id, double x) {
  switch (id) {
    case TargetId::f1:
      // Outer pair summed first so that f1(-x) == -f1(x) bit for bit.
      return std::tanh(x) + (std::tanh(x + 7.5) + std::tanh(x - 7.5));
    case TargetId::f2:
      return std::tanh(x);
    case TargetId::f3:
      return std::sin(x);
  }
  return 0.0;
}

Dataset make_dataset(TargetId id, const GridSpec& grid, bool normalize) {
  if (grid.n < 2) throw ValidationError("make_dataset: n must be at least 2");
  if (!(grid.lo < grid.hi)) throw ValidationError("make_dataset: need lo < hi");
  const double mid = 0.5 * (grid.lo + grid.hi);
  const double half = 0.5 * (grid.hi - grid.lo);
  const double span = static_cast<double>(grid.n - 1);
  Eigen::MatrixXd points(grid.n, 1);
  Vector weights = Vector::Constant(grid.n, 1.0 / grid.n);
  Vector targets(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double x = mid + half * (static_cast<double>(2 * i) - span) / span;
    points(i, 0) = x;
    targets[i] = target_value(id, x);
  }
  Dataset data(std::move(points), std::move(weights), std::move(targets));
  return normalize ? normalize_dataset(data) : data;
}

}  // namespace stagelab
