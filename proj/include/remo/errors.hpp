#pragma once

#include <stdexcept>
#include <string>

namespace remo {

/// Invalid inputs, parameters out of range, schema violations.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem / stream failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace remo
