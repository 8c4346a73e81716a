#pragma once

#include <stdexcept>
#include <string>

namespace quadsim {

// Bad user input: malformed config, unknown labels, inconsistent dimensions.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime violation of a physical contract: non-positive state, trace drift,
// non-convergent eigensolve, norm collapse.
class PhysicsError : public std::runtime_error {
 public:
  explicit PhysicsError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace quadsim
