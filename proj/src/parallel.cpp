#include "thermobeam/parallel.hpp"

#include <cstdlib>
#include <string>

#include "thermobeam/error.hpp"

namespace thermobeam {

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("THERMOBEAM_WORKERS"); env != nullptr && *env != '\0') {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("THERMOBEAM_WORKERS must be a positive integer, got '") + env + "'");
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

}  // namespace thermobeam
