#pragma once

#include <optional>
#include <vector>

#include "dsm/operator_model.hpp"
#include "dsm/schedules.hpp"
#include "dsm/types.hpp"

namespace dsm {

struct SolveVOptions {
  /// Newton starting point; defaults to u_tilde0.
  std::optional<Vector> initial_guess;
  /// Right-hand side to use instead of p.rhs (noisy data).
  std::optional<Vector> rhs;
  int max_iterations = 200;
  int max_halvings = 30;
};

/// Solves F(V) + eps (V - u_tilde0) = 0 by damped Newton with Armijo
/// backtracking until the residual is <= 1e-10 (1 + ||f||). For monotone
/// problems with u_tilde0 = 0 and a known y, checks ||V|| <= ||y||.
/// Throws SolverError (carrying the residual) on non-convergence.
Vector solve_V(const OperatorProblem& p, double eps, const Vector& u_tilde0,
               const SolveVOptions& opt = {});

struct VPath {
  std::vector<double> times;
  std::vector<double> eps;
  std::vector<Vector> V;
  std::vector<double> error_norms;  // ||V(t) - y||, empty without y
};

/// V(t) along a grid of times, each solve warm-started from the previous one.
VPath v_path(const OperatorProblem& p, const EpsilonSchedule& s, const std::vector<double>& grid,
             const Vector& u_tilde0);

/// Closed-form solutions of the linear flows through the eigen-expansion of
/// B = A^T A, with q = A^T f:
///   plain:          u' = -(B u + eps u - q)
///   preconditioned: u' = -u + (B + eps)^{-1} q
/// Per-eigenvalue time integrals are evaluated in a form whose integrands
/// stay in (0, 1], so large t lambda cannot overflow.
class LinearSpectralOracle {
 public:
  LinearSpectralOracle(const Matrix& a, const Vector& f, Vector u0, EpsilonSchedule s);

  Vector plain(double t) const;
  Vector precond(double t) const;

  const Vector& eigenvalues() const { return lambda_; }
  const Matrix& eigenvectors() const { return basis_; }

 private:
  Vector lambda_;
  Matrix basis_;
  Vector q_coeff_;
  Vector u0_coeff_;
  EpsilonSchedule s_;
};

Vector spectral_flow_plain(const Matrix& a, const Vector& f, const Vector& u0,
                           const EpsilonSchedule& s, double t);
Vector spectral_flow_precond(const Matrix& a, const Vector& f, const Vector& u0,
                             const EpsilonSchedule& s, double t);

/// j(lambda, t) = int_0^t lambda e^{s-t} / (lambda + eps(s)) ds, in [0, 1].
double response_factor(double lambda, const EpsilonSchedule& s, double t);

}  // namespace dsm
