#pragma once

#include <stdexcept>
#include <string>

namespace iwo {

/// Operand dimensions do not match (matrix/vector products, scalar products).
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input lies outside the domain of an operation (zero vector, non-nilpotent
/// matrix, subalgebra not contained in k0, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Caller asked for something the API does not offer (unknown suite,
/// predictor requested for an oracle-only group, P_j queried when p = q).
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// A constructed basis failed its own consistency checks. Never expected in a
/// correct build; raised so that a wrong basis cannot leak downstream.
class InvariantViolation : public std::logic_error {
 public:
  explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace iwo
