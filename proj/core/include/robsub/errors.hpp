#pragma once

#include <stdexcept>
#include <string>

namespace robsub {

/// Bad arguments, shapes, or configuration values.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation could not produce a usable result (divergence, depth blow-up).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Unreadable or malformed input files.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace robsub
