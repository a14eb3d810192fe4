#ifndef WIENER_ERROR_HPP
#define WIENER_ERROR_HPP

#include <stdexcept>
#include <string>

namespace wiener {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Iterative method (root finder, ODE integrator, active-set solver) did not converge.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

/// Potential fails the integrability or sign checks of the admissible class.
class RejectedPotential : public Error {
public:
  using Error::Error;
};

/// Kernel matrix of a block is numerically singular after regularization.
class ConditioningError : public Error {
public:
  ConditioningError(int block, const std::string& what)
      : Error("block " + std::to_string(block) + ": " + what), block_(block) {}
  int block() const noexcept { return block_; }

private:
  int block_;
};

class UnsupportedConfiguration : public Error {
public:
  using Error::Error;
};

/// Precondition of an estimate (e.g. radial separation) does not hold.
class NotApplicable : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace wiener

#endif  // WIENER_ERROR_HPP
