#pragma once

#include <stdexcept>
#include <string>

namespace mode {

// Bad parameters, bad config values, violated operation preconditions.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable, malformed or inconsistent input data and files.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mode
