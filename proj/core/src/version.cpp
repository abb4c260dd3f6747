#include "stagelab/version.hpp"

#include "stagelab/format.hpp"
#include "stagelab/rng.hpp"

namespace stagelab {

std::string version() { return STAGELAB_VERSION; }

std::string version_banner() {
  return "stagelab " + version() + " (rng philox4x32-10 v" + std::to_string(Philox4x32::kVersion) +
         ", csv schema " + std::to_string(kCsvSchema) + ")";
}

}  // namespace stagelab
