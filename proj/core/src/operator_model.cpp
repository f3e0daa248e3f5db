#include "dsm/operator_model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "dsm/errors.hpp"

namespace dsm {

namespace {

constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

void require_dim(const OperatorProblem& p, const Vector& v, const char* what) {
  if (v.size() != p.dim) {
    throw UsageError(std::string(what) + ": dimension " + std::to_string(v.size()) +
                     " does not match problem dimension " + std::to_string(p.dim));
  }
}

}  // namespace

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

void OperatorProblem::validate() const {
  if (dim <= 0) throw UsageError("problem '" + name + "': dimension must be positive");
  if (!apply || !jacobian) throw UsageError("problem '" + name + "': apply/jacobian missing");
  if (rhs.size() != dim || u0.size() != dim) {
    throw UsageError("problem '" + name + "': rhs/u0 dimension mismatch");
  }
  if (!(radius > 0.0)) throw UsageError("problem '" + name + "': radius must be positive");
  if (M1 < 0.0 || M2 < 0.0) throw UsageError("problem '" + name + "': M1, M2 must be >= 0");
  if (m1 && !(*m1 > 0.0)) throw UsageError("problem '" + name + "': m1 must be positive");
  if (y_known && y_known->size() != dim) {
    throw UsageError("problem '" + name + "': y_known dimension mismatch");
  }
}

void NoisyProblem::validate() const {
  base.validate();
  if (f_delta.size() != base.dim) throw UsageError("noisy problem: f_delta dimension mismatch");
  if (delta < 0.0) throw UsageError("noisy problem: delta must be >= 0");
  const double dist = (f_delta - base.rhs).norm();
  if (dist > delta * (1.0 + 1e-12) + 1e-15 * (1.0 + base.rhs.norm())) {
    throw UsageError("noisy problem: ||f_delta - f|| exceeds delta");
  }
}

void SectorSpec::validate() const {
  if (!(phi0 > 0.0) || phi0 > std::numbers::pi / 2 + 1e-15) {
    throw UsageError("sector: phi0 must lie in (0, pi/2]");
  }
  if (!(r0 > 0.0)) throw UsageError("sector: r0 must be positive");
}

OperatorProblem make_linear_problem(std::string name, Matrix a, Vector f, Vector u0,
                                    double radius) {
  if (a.rows() != a.cols()) throw UsageError("linear problem: matrix must be square");
  OperatorProblem p;
  p.name = std::move(name);
  p.dim = static_cast<int>(a.rows());
  p.rhs = std::move(f);
  p.u0 = std::move(u0);
  p.radius = radius;
  p.M1 = spectral_norm(a);
  p.M2 = 0.0;
  p.linear = true;
  p.apply = [a](const Vector& u) -> Vector { return a * u; };
  p.jacobian = [a](const Vector&) -> Matrix { return a; };
  p.validate();
  return p;
}

Vector residual(const OperatorProblem& p, const Vector& u) { return residual(p, u, p.rhs); }

Vector residual(const OperatorProblem& p, const Vector& u, const Vector& rhs) {
  require_dim(p, u, "residual");
  require_dim(p, rhs, "residual rhs");
  return p.apply(u) - rhs;
}

Vector jacobian_apply(const OperatorProblem& p, const Vector& u, const Vector& v) {
  require_dim(p, u, "jacobian_apply u");
  require_dim(p, v, "jacobian_apply v");
  return p.jacobian(u) * v;
}

Vector adjoint_apply(const OperatorProblem& p, const Vector& u, const Vector& v) {
  require_dim(p, u, "adjoint_apply u");
  require_dim(p, v, "adjoint_apply v");
  return p.jacobian(u).transpose() * v;
}

double lu_rcond(const Eigen::PartialPivLU<Matrix>& lu) {
  const Vector piv = lu.matrixLU().diagonal().cwiseAbs();
  if (piv.size() == 0) return 0.0;
  if (!(piv.minCoeff() > 1e-14 * piv.maxCoeff())) return 0.0;
  return lu.rcond();
}

Vector shifted_solve(const Matrix& m, double eps, const Vector& b) {
  if (!(eps > 0.0)) throw UsageError("shifted_solve: eps must be positive");
  if (m.rows() != m.cols() || m.rows() != b.size()) {
    throw UsageError("shifted_solve: dimension mismatch");
  }
  Matrix shifted = m;
  shifted.diagonal().array() += eps;
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success) {
    throw SolverError("shifted_solve: Cholesky factorization failed (matrix not PSD?)");
  }
  Vector x = llt.solve(b);
  const double target = 1e-10 * b.norm();
  double res = (b - shifted * x).norm();
  for (int k = 0; k < 3 && res > target; ++k) {
    x += llt.solve(b - shifted * x);
    res = (b - shifted * x).norm();
  }
  if (!x.allFinite() || res > target) {
    throw SolverError("shifted_solve: residual above 1e-10 relative after refinement", res);
  }
  return x;
}

double svd_cutoff(const Eigen::JacobiSVD<Matrix>& svd, Eigen::Index rows, Eigen::Index cols) {
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  return static_cast<double>(std::max(rows, cols)) * smax * kMachineEps * 10.0;
}

Vector minimal_norm_solution(const Matrix& a, const Vector& f) {
  if (a.rows() != f.size()) throw UsageError("minimal_norm_solution: dimension mismatch");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cut = svd_cutoff(svd, a.rows(), a.cols());
  const auto& s = svd.singularValues();
  Vector coeff = svd.matrixU().transpose() * f;
  for (Eigen::Index k = 0; k < s.size(); ++k) coeff[k] = s[k] > cut ? coeff[k] / s[k] : 0.0;
  Vector y = svd.matrixV() * coeff;
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double res = (a * y - f).norm();
  if (res > 1e-8 * (f.norm() + smax * y.norm())) {
    throw InconsistencyError("minimal_norm_solution: f is outside the numerical range (residual " +
                             std::to_string(res) + ")");
  }
  return y;
}

Matrix numerical_null_space(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const double cut = svd_cutoff(svd, a.rows(), a.cols());
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > cut) ++rank;
  const Eigen::Index n = a.cols();
  return svd.matrixV().rightCols(n - rank);
}

MonotonicityReport monotonicity_probe(const OperatorProblem& p, int samples, Rng& rng) {
  if (samples < 1) throw UsageError("monotonicity_probe: samples must be >= 1");
  MonotonicityReport report;
  report.worst_value = std::numeric_limits<double>::infinity();

  auto check = [&](const Vector& u, const Vector& v) {
    const double val = inner(p.apply(u) - p.apply(v), u - v);
    ++report.pairs_checked;
    if (val < report.worst_value) {
      report.worst_value = val;
      report.worst_u = u;
      report.worst_v = v;
    }
  };

  for (int k = 0; k < samples; ++k) {
    const Vector u = rng.in_ball(p.u0, p.radius);
    const Vector v = rng.in_ball(p.u0, p.radius);
    check(u, v);

    const Matrix a = p.jacobian(u);
    const Matrix sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() == Eigen::Success && es.eigenvalues()(0) < 0.0) {
      const Vector dir = es.eigenvectors().col(0);
      const double room = p.radius - (u - p.u0).norm();
      const double step = std::max(1e-6 * p.radius, 0.5 * room);
      check(u, u + step * dir);
    }
  }
  report.monotone = report.worst_value >= -1e-12;
  return report;
}

SectorReport sector_probe(const OperatorProblem& p, const SectorSpec& s, int samples, Rng& rng) {
  s.validate();
  if (samples < 1) throw UsageError("sector_probe: samples must be >= 1");
  SectorReport report;
  const double sin_phi0 = std::sin(s.phi0);
  const double eps_limit = s.r0 * (1.0 - sin_phi0);

  for (int k = 0; k < samples; ++k) {
    const Vector u = k == 0 ? p.u0 : rng.in_ball(p.u0, p.radius);
    const Matrix a = p.jacobian(u);
    Eigen::EigenSolver<Matrix> es(a, false);
    if (es.info() != Eigen::Success) throw NumericError("sector_probe: eigenvalue computation failed");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const std::complex<double> z = es.eigenvalues()(i);
      const double r = std::abs(z);
      if (r <= 0.0 || r >= s.r0) continue;
      // angle measured from the negative real axis
      const double off = std::abs(std::arg(-z));
      if (off < s.phi0) {
        report.spectrum_ok = false;
        report.offending_point = u;
      }
    }
    if (!report.spectrum_ok) break;

    if (eps_limit > 0.0) {
      for (double frac : {0.5, 0.1, 0.01}) {
        const double eps = frac * eps_limit;
        Matrix shifted = a;
        shifted.diagonal().array() += eps;
        Eigen::JacobiSVD<Matrix> svd(shifted);
        const double smin = svd.singularValues()(svd.singularValues().size() - 1);
        const double ratio = smin > 0.0 ? eps * sin_phi0 / smin : std::numeric_limits<double>::infinity();
        report.worst_resolvent_ratio = std::max(report.worst_resolvent_ratio, ratio);
        if (ratio > 1.0 + 1e-10) {
          report.resolvent_ok = false;
          report.offending_point = u;
        }
      }
    }
  }
  report.ok = report.spectrum_ok && report.resolvent_ok;
  return report;
}

ConstantEstimates estimate_constants(const OperatorProblem& p, int samples, Rng& rng) {
  if (samples < 2) throw UsageError("estimate_constants: samples must be >= 2");
  ConstantEstimates est;
  est.samples = samples;
  const double h_base = std::cbrt(kMachineEps);
  for (int k = 0; k < samples; ++k) {
    const Vector u = rng.in_ball(p.u0, p.radius);
    est.M1 = std::max(est.M1, spectral_norm(p.jacobian(u)));
    if (p.linear) continue;
    const Vector v = rng.unit_vector(p.dim);
    const double h = h_base * (1.0 + u.norm());
    const Vector second = (p.apply(u + h * v) - 2.0 * p.apply(u) + p.apply(u - h * v)) / (h * h);
    est.M2 = std::max(est.M2, second.norm());
  }
  return est;
}

double jacobian_fd_defect(const OperatorProblem& p, const Vector& u, const Vector& v, double h) {
  require_dim(p, u, "jacobian_fd_defect u");
  require_dim(p, v, "jacobian_fd_defect v");
  const Vector quotient = (p.apply(u + h * v) - p.apply(u)) / h;
  return (quotient - p.jacobian(u) * v).norm();
}

}  // namespace dsm
