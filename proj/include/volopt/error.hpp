#pragma once

#include <stdexcept>

namespace volopt {

/// Raised when user-supplied parameters violate a documented precondition.
/// The CLI maps this to exit code 2; every other exception maps to 3.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace volopt
