#pragma once

#include <string>

namespace stagelab {

/// "MAJOR.MINOR.PATCH" of the library.
[[nodiscard]] std::string version();

/// One line: version, generator and CSV schema.
[[nodiscard]] std::string version_banner();

}  // namespace stagelab
