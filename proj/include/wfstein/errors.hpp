#pragma once

#include <stdexcept>
#include <string>

namespace wfstein {

// Requested object exceeds a configured size cap.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// A lattice point was required to lie in the simplex S but does not.
class InvalidStateError : public std::invalid_argument {
 public:
  explicit InvalidStateError(const std::string& what) : std::invalid_argument(what) {}
};

// A linear system turned out numerically rank-deficient beyond tolerance.
class SingularityError : public std::runtime_error {
 public:
  explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the mathematical domain of the operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Fourth-order interpolant derivative requested on a cell face, where it
// exists only almost everywhere.
class FacePointError : public DomainError {
 public:
  explicit FacePointError(const std::string& what) : DomainError(what) {}
};

// A moment pattern requiring distinct indices was called with repeats.
class IndexCollisionError : public std::invalid_argument {
 public:
  explicit IndexCollisionError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wfstein
