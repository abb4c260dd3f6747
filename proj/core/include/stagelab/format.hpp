#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace stagelab {

/// Every numeric value written to CSV/JSON text uses 12 significant digits.
inline constexpr int kSignificantDigits = 12;

/// Current CSV schema version, emitted as the first line "# schema=1".
inline constexpr int kCsvSchema = 1;

[[nodiscard]] std::string format_number(double value);

/// JSON value rounded to 12 significant digits; null for nan/inf.
[[nodiscard]] nlohmann::json json_number(double value);
[[nodiscard]] nlohmann::json json_number(const std::optional<double>& value);

[[nodiscard]] std::vector<std::string> split_csv_line(std::string_view line);

/// Parses a full decimal field; throws ValidationError on junk.
[[nodiscard]] double parse_double(std::string_view field);

}  // namespace stagelab
