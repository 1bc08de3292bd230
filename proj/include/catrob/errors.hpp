#pragma once

#include <stdexcept>
#include <string>

namespace catrob {

// Raised for malformed configs, missing stage dependencies and bad file
// contents. The CLI maps this (and std::invalid_argument) to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace catrob
