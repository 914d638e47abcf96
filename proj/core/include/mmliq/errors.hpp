#pragma once

#include <stdexcept>
#include <string>

namespace mmliq {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a type invariant or an operation precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NotDifferentiable : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class DegeneratePhase : public Error {
 public:
  using Error::Error;
};

// Raised by the direct block-tridiagonal elimination on a (numerically)
// singular pivot block.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class SingularKKT : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double last_update)
      : Error(what), last_update_(last_update) {}
  double last_update() const { return last_update_; }

 private:
  double last_update_;
};

}  // namespace mmliq
