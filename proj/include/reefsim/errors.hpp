#pragma once

#include <stdexcept>
#include <string>

namespace reefsim {

// Bad user input (map bundles, tables, flag values). The CLI maps this to
// exit code 3; anything else escaping to main is a runtime failure (4).
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace reefsim
