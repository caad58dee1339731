#ifndef RMSTBART_ERRORS_HPP
#define RMSTBART_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rmstbart {

// Thrown for unreadable/malformed input data (CSV problems, schema mismatches).
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown for invalid option combinations and out-of-range hyperparameters.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a fit or estimate cannot be computed from otherwise valid input.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rmstbart

#endif
