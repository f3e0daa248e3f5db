#include "dsm/regularized_path.hpp"

#include <algorithm>
#include <cmath>

#include "dsm/errors.hpp"
#include "dsm/quadrature.hpp"

namespace dsm {

namespace {

constexpr double kArmijo = 1e-4;

/// int_0^t kernel(t - tau) d tau with kernel concentrated near tau = 0 on
/// the scale `width`: panels [0, w], [w, 2w], [2w, 4w], ... up to t.
double layered_integral(const ScalarFn& integrand_in_s, double t, double width) {
  if (t <= 0.0) return 0.0;
  double total = 0.0;
  double lo = 0.0;
  double hi = std::min(t, std::max(width, 1e-12 * t));
  while (true) {
    const double a = t - hi;
    const double b = t - lo;
    total += adaptive_simpson(integrand_in_s, a, b, 1e-13, 1e-13);
    if (hi >= t) break;
    lo = hi;
    hi = std::min(t, 2.0 * hi);
  }
  return total;
}

}  // namespace

Vector solve_V(const OperatorProblem& p, double eps, const Vector& u_tilde0,
               const SolveVOptions& opt) {
  if (!(eps > 0.0)) throw UsageError("solve_V: eps must be positive");
  if (u_tilde0.size() != p.dim) throw UsageError("solve_V: u_tilde0 dimension mismatch");
  const Vector f = opt.rhs ? *opt.rhs : p.rhs;
  if (f.size() != p.dim) throw UsageError("solve_V: rhs dimension mismatch");

  auto shifted_residual = [&](const Vector& v) { return Vector(p.apply(v) - f + eps * (v - u_tilde0)); };
  const double tol = 1e-10 * (1.0 + f.norm());

  Vector v = opt.initial_guess ? *opt.initial_guess : u_tilde0;
  Vector r = shifted_residual(v);
  double rn = r.norm();
  for (int it = 0; it < opt.max_iterations && !(rn <= tol); ++it) {
    Matrix jac = p.jacobian(v);
    jac.diagonal().array() += eps;
    Eigen::PartialPivLU<Matrix> lu(jac);
    const Vector d = -lu.solve(r);
    if (!d.allFinite()) throw SolverError("solve_V: Newton direction is not finite", rn);

    double step = 1.0;
    bool accepted = false;
    for (int k = 0; k <= opt.max_halvings; ++k) {
      const Vector trial = v + step * d;
      const Vector rt = shifted_residual(trial);
      const double rtn = rt.norm();
      if (std::isfinite(rtn) && rtn * rtn <= (1.0 - 2.0 * kArmijo * step) * rn * rn) {
        v = trial;
        r = rt;
        rn = rtn;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Stagnation at roundoff level still counts as converged if close.
      if (rn <= 1e3 * tol) break;
      throw SolverError("solve_V: line search failed (residual " + std::to_string(rn) + ")", rn);
    }
  }
  if (!(rn <= tol)) {
    throw SolverError("solve_V: no convergence after " + std::to_string(opt.max_iterations) +
                          " iterations (residual " + std::to_string(rn) + ")",
                      rn);
  }
  if (p.monotone && p.y_known && !opt.rhs && u_tilde0.isZero(0.0)) {
    const double ny = p.y_known->norm();
    if (v.norm() > ny * (1.0 + 1e-8) + 1e-12) {
      throw NumericError("solve_V: ||V|| exceeds ||y|| for a monotone problem");
    }
  }
  return v;
}

VPath v_path(const OperatorProblem& p, const EpsilonSchedule& s, const std::vector<double>& grid,
             const Vector& u_tilde0) {
  VPath path;
  SolveVOptions opt;
  for (double t : grid) {
    const double e = s.eval(t);
    Vector v = solve_V(p, e, u_tilde0, opt);
    opt.initial_guess = v;
    path.times.push_back(t);
    path.eps.push_back(e);
    if (p.y_known) path.error_norms.push_back((v - *p.y_known).norm());
    path.V.push_back(std::move(v));
  }
  return path;
}

LinearSpectralOracle::LinearSpectralOracle(const Matrix& a, const Vector& f, Vector u0,
                                           EpsilonSchedule s)
    : s_(std::move(s)) {
  if (a.rows() != f.size() || a.cols() != u0.size()) {
    throw UsageError("spectral oracle: dimension mismatch");
  }
  const Matrix b = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Matrix> es(b);
  if (es.info() != Eigen::Success) throw NumericError("spectral oracle: eigen solve failed");
  lambda_ = es.eigenvalues();
  basis_ = es.eigenvectors();
  q_coeff_ = basis_.transpose() * (a.transpose() * f);
  u0_coeff_ = basis_.transpose() * u0;
}

Vector LinearSpectralOracle::plain(double t) const {
  if (t < 0.0) throw UsageError("spectral oracle: t must be >= 0");
  const double Ht = s_.integral(0.0, t);
  Vector coeff(lambda_.size());
  for (Eigen::Index k = 0; k < lambda_.size(); ++k) {
    const double lam = lambda_[k];
    // exp(-lam (t - s) - (H(t) - H(s))) lies in (0, 1] for lam >= 0
    const ScalarFn kernel = [&](double sv) {
      return std::exp(-lam * (t - sv) - (Ht - s_.integral(0.0, sv)));
    };
    const double width = 1.0 / std::max(lam + s_.eval(t), 1e-300);
    coeff[k] = u0_coeff_[k] * std::exp(-lam * t - Ht) + q_coeff_[k] * layered_integral(kernel, t, width);
  }
  return basis_ * coeff;
}

Vector LinearSpectralOracle::precond(double t) const {
  if (t < 0.0) throw UsageError("spectral oracle: t must be >= 0");
  Vector coeff(lambda_.size());
  for (Eigen::Index k = 0; k < lambda_.size(); ++k) {
    const double lam = lambda_[k];
    const ScalarFn kernel = [&](double sv) { return std::exp(sv - t) / (lam + s_.eval(sv)); };
    coeff[k] = u0_coeff_[k] * std::exp(-t) + q_coeff_[k] * layered_integral(kernel, t, 1.0);
  }
  return basis_ * coeff;
}

Vector spectral_flow_plain(const Matrix& a, const Vector& f, const Vector& u0,
                           const EpsilonSchedule& s, double t) {
  return LinearSpectralOracle(a, f, u0, s).plain(t);
}

Vector spectral_flow_precond(const Matrix& a, const Vector& f, const Vector& u0,
                             const EpsilonSchedule& s, double t) {
  return LinearSpectralOracle(a, f, u0, s).precond(t);
}

double response_factor(double lambda, const EpsilonSchedule& s, double t) {
  if (t < 0.0) throw UsageError("response_factor: t must be >= 0");
  const double lam = std::max(lambda, 0.0);
  if (lam == 0.0 || t == 0.0) return 0.0;
  const ScalarFn kernel = [&](double sv) { return lam * std::exp(sv - t) / (lam + s.eval(sv)); };
  return layered_integral(kernel, t, 1.0);
}

}  // namespace dsm
