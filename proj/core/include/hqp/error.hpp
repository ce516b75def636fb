#pragma once

#include <stdexcept>
#include <string>

namespace hqp {

/// Raised when a computation would exceed a configured size guard
/// (state space, enumeration count, quadrature grid).
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an internal cross-check between two independent routes
/// disagrees beyond its tolerance. Signals a bug, never bad input.
class CrossCheckError : public std::logic_error {
 public:
  explicit CrossCheckError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace hqp
