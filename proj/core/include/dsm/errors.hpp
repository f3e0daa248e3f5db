#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "dsm/types.hpp"

namespace dsm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a precondition (bad dimension, out-of-range parameter).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A linear solve inside a vector field hit a (numerically) singular map.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double t, Vector u)
      : Error(what), t_(t), u_(std::move(u)) {}

  double t() const { return t_; }
  const Vector& u() const { return u_; }

 private:
  double t_;
  Vector u_;
};

/// An iterative or direct solver failed to meet its accuracy contract.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual = 0.0)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

/// Adaptive step size fell below the representable resolution of t.
class StiffnessError : public Error {
 public:
  StiffnessError(const std::string& what, double t) : Error(what), t_(t) {}
  double t() const { return t_; }

 private:
  double t_;
};

/// Right-hand side is not in the numerical range of the operator.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

/// A stopping equation has no root for the given schedule.
class NoRootError : public Error {
 public:
  using Error::Error;
};

/// The hypotheses of a bound certificate do not hold for the given data.
class CertificateInapplicable : public Error {
 public:
  using Error::Error;
};

}  // namespace dsm
