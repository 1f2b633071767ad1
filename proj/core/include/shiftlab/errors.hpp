#pragma once

#include <stdexcept>
#include <string>

namespace shiftlab {

// Exact routines refuse to continue past a configured budget (set sizes,
// enumeration leaves, search nodes) instead of silently approximating.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

// A parameter combination that has no implemented exact route.
class UnimplementedError : public std::runtime_error {
 public:
  explicit UnimplementedError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed experiment configuration (unknown key, missing field, bad type).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shiftlab
