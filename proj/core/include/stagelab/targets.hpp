#pragma once

#include <string_view>

#include "stagelab/dataset.hpp"

namespace stagelab {

/// f1(x) = tanh(x + 7.5) + tanh(x) + tanh(x - 7.5), f2(x) = tanh(x), f3(x) = sin(x).
enum class TargetId { f1, f2, f3 };

[[nodiscard]] std::string_view to_string(TargetId id) noexcept;
/// Throws ValidationError for anything but "f1", "f2", "f3".
[[nodiscard]] TargetId target_from_string(std::string_view name);

[[nodiscard]] double target_value(TargetId id, double x);

struct GridSpec {
  int n = 1000;
  double lo = -15.0;
  double hi = 15.0;
};

/// n equidistant points on [lo, hi] with weights 1/n. Points are placed
/// symmetrically about the midpoint, so a grid centred on 0 is exactly odd.
[[nodiscard]] Dataset make_dataset(TargetId id, const GridSpec& grid = {}, bool normalize = false);

}  // namespace stagelab
