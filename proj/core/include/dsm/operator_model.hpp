#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "dsm/rng.hpp"
#include "dsm/types.hpp"

namespace dsm {

/// The equation F(u) = B(u) - f = 0 on R^n together with the data the
/// convergence theory refers to: the ball B(u0, R), the derivative bounds
/// M1 >= sup ||F'(u)||, M2 >= sup ||F''(u)|| on that ball, and the inverse
/// bound m1 >= sup ||F'(u)^{-1}|| when the problem is well-posed.
///
/// Values are immutable after construction; `apply` and `jacobian` must be
/// pure so that problems can be shared across threads.
struct OperatorProblem {
  std::string name;
  int dim = 0;
  std::function<Vector(const Vector&)> apply;     // B(u)
  Vector rhs;                                     // f
  std::function<Matrix(const Vector&)> jacobian;  // A(u) = F'(u) = B'(u)
  Vector u0;
  double radius = 1.0;
  double M1 = 0.0;
  double M2 = 0.0;
  std::optional<double> m1;
  std::optional<Vector> y_known;
  bool monotone = false;
  /// B is affine; jacobian(u) is the same matrix for every u.
  bool linear = false;
  /// Diagnostics recorded at construction (condition numbers, source norms).
  std::map<std::string, double> notes;

  /// Throws UsageError when the callables, dimensions or constants are
  /// inconsistent.
  void validate() const;
};

/// Noisy right-hand side f_delta with ||f_delta - f|| <= delta.
struct NoisyProblem {
  OperatorProblem base;
  Vector f_delta;
  double delta = 0.0;

  void validate() const;
};

/// Sector { r e^{i phi} : 0 < r < r0, |phi - pi| < phi0 } that the spectrum of
/// F'(u) has to avoid.
struct SectorSpec {
  double phi0 = 0.0;
  double r0 = 0.0;

  void validate() const;
};

/// Problem wrapping a constant matrix: B(u) = A u.
OperatorProblem make_linear_problem(std::string name, Matrix a, Vector f, Vector u0,
                                    double radius);

Vector residual(const OperatorProblem& p, const Vector& u);
/// Residual B(u) - rhs with an explicit right-hand side (used for noisy data).
Vector residual(const OperatorProblem& p, const Vector& u, const Vector& rhs);
Vector jacobian_apply(const OperatorProblem& p, const Vector& u, const Vector& v);
Vector adjoint_apply(const OperatorProblem& p, const Vector& u, const Vector& v);

/// Reciprocal condition estimate of an LU factorization; 0 when a pivot is
/// negligible against the largest one, which Eigen's rcond() alone misses.
double lu_rcond(const Eigen::PartialPivLU<Matrix>& lu);

/// Solves (M + eps I) x = b for symmetric positive semidefinite M by Cholesky
/// with up to three steps of iterative refinement. Throws UsageError for
/// eps <= 0 and SolverError when the relative residual stays above 1e-10.
Vector shifted_solve(const Matrix& m, double eps, const Vector& b);

/// Singular values at or below this are treated as zero:
/// max(rows, cols) * sigma_max * machine epsilon * 10.
double svd_cutoff(const Eigen::JacobiSVD<Matrix>& svd, Eigen::Index rows, Eigen::Index cols);

/// y = A^+ f computed by SVD with the cutoff above. Throws InconsistencyError
/// when ||A y - f|| > 1e-8 (||f|| + sigma_max ||y||).
Vector minimal_norm_solution(const Matrix& a, const Vector& f);

/// Orthonormal basis (columns) of the numerical null-space of A.
Matrix numerical_null_space(const Matrix& a);

struct MonotonicityReport {
  bool monotone = true;
  double worst_value = 0.0;  // min over pairs of (F(u)-F(v), u-v)
  Vector worst_u;
  Vector worst_v;
  int pairs_checked = 0;
};

/// Falsification probe for monotonicity on B(u0, R). Besides `samples` random
/// pairs it checks, at each sampled point, a short pair along the eigenvector
/// of the least eigenvalue of the symmetric part of F'(u).
MonotonicityReport monotonicity_probe(const OperatorProblem& p, int samples, Rng& rng);

struct SectorReport {
  bool ok = true;
  bool spectrum_ok = true;
  bool resolvent_ok = true;
  Vector offending_point;
  double worst_resolvent_ratio = 0.0;  // max ||(A+eps)^{-1}|| * eps * sin(phi0)
};

/// Samples the ball and checks that no eigenvalue of F'(u) falls in the
/// sector; when that holds, spot-checks ||(A(u)+eps)^{-1}|| <= 1/(eps sin phi0)
/// for eps below r0 (1 - sin phi0). Throws NumericError if an eigenvalue
/// computation fails.
SectorReport sector_probe(const OperatorProblem& p, const SectorSpec& s, int samples, Rng& rng);

struct ConstantEstimates {
  double M1 = 0.0;
  double M2 = 0.0;
  int samples = 0;
};

/// Sampled estimates of the derivative bounds on the ball. M2 uses symmetric
/// second differences with h = eps^{1/3} (1 + ||u||); linear problems report
/// M2 = 0 exactly. Estimates carry no guarantee.
ConstantEstimates estimate_constants(const OperatorProblem& p, int samples, Rng& rng);

/// ||(F(u+hv)-F(u))/h - A(u)v||. For a consistent Jacobian this is O(h).
double jacobian_fd_defect(const OperatorProblem& p, const Vector& u, const Vector& v, double h);

}  // namespace dsm
