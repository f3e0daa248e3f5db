#include "dsm/phi_fields.hpp"

#include <array>
#include <cmath>

#include "dsm/errors.hpp"

namespace dsm {

namespace {

// reciprocal condition estimate below which an LU solve is reported singular
constexpr double kSingularRcond = 1e-14;

constexpr std::array<std::pair<Method, std::string_view>, 12> kTags{{
    {Method::newton, "newton"},
    {Method::simple, "simple"},
    {Method::gradient, "gradient"},
    {Method::gauss_newton, "gauss_newton"},
    {Method::modified_newton, "modified_newton"},
    {Method::descent, "descent"},
    {Method::linear_plain, "linear_plain"},
    {Method::linear_precond, "linear_precond"},
    {Method::monotone_reg_newton, "monotone_reg_newton"},
    {Method::monotone_simple, "monotone_simple"},
    {Method::nonmonotone_source, "nonmonotone_source"},
    {Method::coupled_inversion_free, "coupled_inversion_free"},
}};

bool needs_schedule(Method m) {
  switch (m) {
    case Method::linear_plain:
    case Method::linear_precond:
    case Method::monotone_reg_newton:
    case Method::monotone_simple:
    case Method::nonmonotone_source:
      return true;
    default:
      return false;
  }
}

Vector lu_solve(const Matrix& a, const Vector& b, double t, const Vector& u, const char* what) {
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rc = lu_rcond(lu);
  if (!(rc > kSingularRcond)) {
    throw SingularityError(std::string(what) + ": singular linear system (rcond " +
                               std::to_string(rc) + ") at t = " + std::to_string(t),
                           t, u);
  }
  Vector x = lu.solve(b);
  if (!x.allFinite()) throw SingularityError(std::string(what) + ": non-finite solve", t, u);
  return x;
}

Vector shifted_solve_at(const Matrix& m, double eps, const Vector& b, double t, const Vector& u,
                        const char* what) {
  try {
    return shifted_solve(m, eps, b);
  } catch (const SolverError& e) {
    throw SingularityError(std::string(what) + ": " + e.what() + " at t = " + std::to_string(t),
                           t, u);
  }
}

}  // namespace

std::string_view method_tag(Method m) {
  for (const auto& [method, tag] : kTags) {
    if (method == m) return tag;
  }
  return "unknown";
}

Method parse_method(std::string_view tag) {
  for (const auto& [method, name] : kTags) {
    if (name == tag) return method;
  }
  throw UsageError("unknown method tag '" + std::string(tag) + "'");
}

std::vector<std::string> method_tags() {
  std::vector<std::string> out;
  for (const auto& entry : kTags) out.emplace_back(entry.second);
  return out;
}

bool is_wellposed_method(Method m) {
  switch (m) {
    case Method::newton:
    case Method::simple:
    case Method::gradient:
    case Method::gauss_newton:
    case Method::modified_newton:
    case Method::descent:
      return true;
    default:
      return false;
  }
}

PhiField make_field(const OperatorProblem& p, Method method, std::optional<EpsilonSchedule> s,
                    std::optional<Vector> u_tilde0, const Vector* f_delta, double delta) {
  p.validate();
  if (method == Method::coupled_inversion_free) {
    throw UsageError("coupled_inversion_free is built with make_coupled_phi");
  }
  if (needs_schedule(method) && !s) {
    throw UsageError(std::string("method '") + std::string(method_tag(method)) +
                     "' requires an epsilon schedule");
  }
  PhiField phi;
  phi.problem_ = p;
  phi.method_ = method;
  if (needs_schedule(method)) phi.schedule_ = s;
  phi.rhs_ = f_delta ? *f_delta : p.rhs;
  if (phi.rhs_.size() != p.dim) throw UsageError("noisy rhs dimension mismatch");
  phi.noisy_ = f_delta != nullptr;
  phi.delta_ = delta;
  phi.u_tilde0_ = u_tilde0 ? *u_tilde0 : Vector::Zero(p.dim);
  if (phi.u_tilde0_.size() != p.dim) throw UsageError("u_tilde0 dimension mismatch");

  if (method == Method::linear_plain || method == Method::linear_precond) {
    if (!p.linear) throw UsageError("linear flows require a linear problem");
    const Matrix a = p.jacobian(p.u0);
    phi.normal_ = a.transpose() * a;
    // q = A^T f; for B(u) = A u + c the affine offset moves to the data side
    const Vector offset = p.apply(Vector::Zero(p.dim));
    phi.q_ = a.transpose() * (phi.rhs_ - offset);
    phi.data_error_bound_ = spectral_norm(a) * delta;
  }
  if (method == Method::modified_newton) {
    auto lu = std::make_shared<Eigen::PartialPivLU<Matrix>>(p.jacobian(p.u0));
    if (!(lu_rcond(*lu) > kSingularRcond)) {
      throw SingularityError("modified_newton: F'(u0) is singular", 0.0, p.u0);
    }
    phi.frozen_lu_ = std::move(lu);
  }
  return phi;
}

Vector PhiField::operator()(double t, const Vector& u, EvalCounters* counters) const {
  if (u.size() != problem_.dim) throw UsageError("phi: state dimension mismatch");
  if (counters) {
    ++counters->evals;
    if ((u - problem_.u0).norm() > problem_.radius) ++counters->ball_exits;
  }
  auto count_solve = [counters] {
    if (counters) ++counters->solves;
  };

  switch (method_) {
    case Method::newton: {
      const Vector F = residual(problem_, u, rhs_);
      count_solve();
      return -lu_solve(problem_.jacobian(u), F, t, u, "newton");
    }
    case Method::simple:
      return -residual(problem_, u, rhs_);
    case Method::gradient: {
      const Vector F = residual(problem_, u, rhs_);
      return -(problem_.jacobian(u).transpose() * F);
    }
    case Method::gauss_newton: {
      const Matrix a = problem_.jacobian(u);
      const Vector g = a.transpose() * residual(problem_, u, rhs_);
      const Matrix normal = a.transpose() * a;
      count_solve();
      Eigen::LLT<Matrix> llt(normal);
      if (llt.info() != Eigen::Success || !(llt.rcond() > kSingularRcond)) {
        throw SingularityError("gauss_newton: singular normal matrix at t = " + std::to_string(t),
                               t, u);
      }
      return -llt.solve(g);
    }
    case Method::modified_newton: {
      count_solve();
      Vector x = frozen_lu_->solve(residual(problem_, u, rhs_));
      return -x;
    }
    case Method::descent: {
      const Vector F = residual(problem_, u, rhs_);
      const double f = F.squaredNorm();
      const Vector fprime = 2.0 * (problem_.jacobian(u).transpose() * F);
      const double g2 = fprime.squaredNorm();
      if (f == 0.0) return Vector::Zero(problem_.dim);
      if (!(g2 > 0.0)) {
        throw SingularityError("descent: gradient of ||F||^2 vanishes away from a root", t, u);
      }
      return -(f / g2) * fprime;
    }
    case Method::linear_plain: {
      const double e = schedule_->eval(t);
      return -(normal_ * u + e * u - q_);
    }
    case Method::linear_precond: {
      const double e = schedule_->eval(t);
      count_solve();
      return -u + shifted_solve_at(normal_, e, q_, t, u, "linear_precond");
    }
    case Method::monotone_reg_newton: {
      const double e = schedule_->eval(t);
      Matrix shifted = problem_.jacobian(u);
      shifted.diagonal().array() += e;
      const Vector rhs = residual(problem_, u, rhs_) + e * (u - u_tilde0_);
      count_solve();
      return -lu_solve(shifted, rhs, t, u, "monotone_reg_newton");
    }
    case Method::monotone_simple: {
      const double e = schedule_->eval(t);
      return -(residual(problem_, u, rhs_) + e * (u - u_tilde0_));
    }
    case Method::nonmonotone_source: {
      const double e = schedule_->eval(t);
      const Matrix a = problem_.jacobian(u);
      const Vector rhs = a.transpose() * residual(problem_, u, rhs_) + e * (u - u_tilde0_);
      count_solve();
      return -shifted_solve_at(a.transpose() * a, e, rhs, t, u, "nonmonotone_source");
    }
    case Method::coupled_inversion_free:
      break;
  }
  throw UsageError("phi: unsupported method");
}

PhiField make_wellposed_phi(const OperatorProblem& p, Method method) {
  if (!is_wellposed_method(method)) {
    throw UsageError(std::string("'") + std::string(method_tag(method)) +
                     "' is not a well-posed method");
  }
  return make_field(p, method, std::nullopt, std::nullopt, nullptr, 0.0);
}

PhiField make_linear_phi(const OperatorProblem& p, LinearVariant variant, const EpsilonSchedule& s) {
  const Method m = variant == LinearVariant::plain ? Method::linear_plain : Method::linear_precond;
  return make_field(p, m, s, std::nullopt, nullptr, 0.0);
}

PhiField make_linear_phi(const NoisyProblem& p, LinearVariant variant, const EpsilonSchedule& s) {
  p.validate();
  const Method m = variant == LinearVariant::plain ? Method::linear_plain : Method::linear_precond;
  return make_field(p.base, m, s, std::nullopt, &p.f_delta, p.delta);
}

PhiField make_monotone_phi(const OperatorProblem& p, MonotoneVariant variant,
                           const EpsilonSchedule& s, std::optional<Vector> u_tilde0) {
  const Method m = variant == MonotoneVariant::regularized_newton ? Method::monotone_reg_newton
                                                                  : Method::monotone_simple;
  return make_field(p, m, s, std::move(u_tilde0), nullptr, 0.0);
}

PhiField make_monotone_phi(const NoisyProblem& p, MonotoneVariant variant,
                           const EpsilonSchedule& s, std::optional<Vector> u_tilde0) {
  p.validate();
  const Method m = variant == MonotoneVariant::regularized_newton ? Method::monotone_reg_newton
                                                                  : Method::monotone_simple;
  return make_field(p.base, m, s, std::move(u_tilde0), &p.f_delta, p.delta);
}

PhiField make_nonmonotone_phi(const OperatorProblem& p, const EpsilonSchedule& s,
                              std::optional<Vector> u_tilde0) {
  return make_field(p, Method::nonmonotone_source, s, std::move(u_tilde0), nullptr, 0.0);
}

PhiField make_nonmonotone_phi(const NoisyProblem& p, const EpsilonSchedule& s,
                              std::optional<Vector> u_tilde0) {
  p.validate();
  return make_field(p.base, Method::nonmonotone_source, s, std::move(u_tilde0), &p.f_delta,
                    p.delta);
}

PhiField make_phi(const OperatorProblem& p, Method method, std::optional<EpsilonSchedule> s,
                  std::optional<Vector> u_tilde0) {
  return make_field(p, method, std::move(s), std::move(u_tilde0), nullptr, 0.0);
}

PhiField make_phi(const NoisyProblem& p, Method method, std::optional<EpsilonSchedule> s,
                  std::optional<Vector> u_tilde0) {
  p.validate();
  return make_field(p.base, method, std::move(s), std::move(u_tilde0), &p.f_delta, p.delta);
}

Vector eval_phi(const PhiField& phi, double t, const Vector& u) { return phi(t, u); }

CoupledField::CoupledField(OperatorProblem p, Matrix q0) : problem_(std::move(p)), q0_(std::move(q0)) {
  problem_.validate();
  if (q0_.rows() != problem_.dim || q0_.cols() != problem_.dim) {
    throw UsageError("coupled field: Q0 must be n x n");
  }
}

CoupledState CoupledField::operator()(double, const CoupledState& s, EvalCounters* counters) const {
  if (s.u.size() != problem_.dim || s.Q.rows() != problem_.dim || s.Q.cols() != problem_.dim) {
    throw UsageError("coupled field: state dimension mismatch");
  }
  if (counters) {
    ++counters->evals;
    if ((s.u - problem_.u0).norm() > problem_.radius) ++counters->ball_exits;
  }
  const Matrix a = problem_.jacobian(s.u);
  CoupledState d;
  d.u = -(s.Q * residual(problem_, s.u));
  d.Q = -(a.transpose() * (a * s.Q)) + a.transpose();
  return d;
}

CoupledField make_coupled_phi(const OperatorProblem& p, const Matrix& q0) { return CoupledField(p, q0); }

double lambda_defect(const OperatorProblem& p, const Matrix& q) {
  if (!p.y_known) throw UsageError("lambda_defect: problem has no known solution");
  if (q.rows() != p.dim || q.cols() != p.dim) throw UsageError("lambda_defect: Q must be n x n");
  const Matrix lambda = Matrix::Identity(p.dim, p.dim) - q * p.jacobian(*p.y_known);
  return spectral_norm(lambda);
}

}  // namespace dsm
