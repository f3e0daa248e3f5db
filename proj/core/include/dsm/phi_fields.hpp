#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsm/operator_model.hpp"
#include "dsm/schedules.hpp"
#include "dsm/types.hpp"

namespace dsm {

/// Right-hand sides Phi(t, u) of the Cauchy problem u' = Phi(t, u).
enum class Method {
  newton,                  // -F'(u)^{-1} F(u)
  simple,                  // -F(u)
  gradient,                // -F'(u)^T F(u)
  gauss_newton,            // -(F'^T F')^{-1} F'^T F
  modified_newton,         // -F'(u0)^{-1} F(u)
  descent,                 // -(f / ||f'||^2) f',  f = ||F||^2
  linear_plain,            // -(B u + eps u - q),   B = A^T A, q = A^T f
  linear_precond,          // -u + (B + eps)^{-1} q
  monotone_reg_newton,     // -(A + eps I)^{-1} [F(u) + eps (u - u~0)]
  monotone_simple,         // -F(u) - eps (u - u~0)
  nonmonotone_source,      // -(A^T A + eps I)^{-1} [A^T F(u) + eps (u - u~0)]
  coupled_inversion_free,  // u' = -Q F(u), Q' = -A^T A Q + A^T
};

std::string_view method_tag(Method m);
/// Throws UsageError on an unknown tag.
Method parse_method(std::string_view tag);
/// All tags, in declaration order.
std::vector<std::string> method_tags();
bool is_wellposed_method(Method m);

/// Instrumentation filled in by field evaluations.
struct EvalCounters {
  long evals = 0;
  long solves = 0;
  long ball_exits = 0;
};

class PhiField {
 public:
  /// Phi(t, u). Pure in (t, u); counters are only written when provided.
  Vector operator()(double t, const Vector& u, EvalCounters* counters = nullptr) const;

  Method method() const { return method_; }
  const OperatorProblem& problem() const { return problem_; }
  /// Right-hand side in use: f for exact data, f_delta for noisy data.
  const Vector& rhs() const { return rhs_; }
  bool noisy() const { return noisy_; }
  double delta() const { return delta_; }
  /// ||A^T|| delta, the unnormalized bound on ||q - q_delta|| (diagnostic).
  double data_error_bound() const { return data_error_bound_; }
  const std::optional<EpsilonSchedule>& schedule() const { return schedule_; }
  /// eps(t), or 0 when the method uses no schedule.
  double eps(double t) const { return schedule_ ? schedule_->eval(t) : 0.0; }
  const Vector& u_tilde0() const { return u_tilde0_; }
  /// No explicit t-dependence.
  bool autonomous() const { return !schedule_ || schedule_->is_constant(); }

 private:
  friend PhiField make_field(const OperatorProblem&, Method, std::optional<EpsilonSchedule>,
                             std::optional<Vector>, const Vector*, double);

  PhiField() = default;

  OperatorProblem problem_;
  Method method_ = Method::simple;
  std::optional<EpsilonSchedule> schedule_;
  Vector rhs_;
  Vector u_tilde0_;
  bool noisy_ = false;
  double delta_ = 0.0;
  double data_error_bound_ = 0.0;
  // linear fields: B = A^T A, q = A^T rhs
  Matrix normal_;
  Vector q_;
  // modified Newton: factorization of F'(u0), computed once
  std::shared_ptr<const Eigen::PartialPivLU<Matrix>> frozen_lu_;
};

/// Shared constructor behind the public factories.
PhiField make_field(const OperatorProblem& p, Method method, std::optional<EpsilonSchedule> s,
                    std::optional<Vector> u_tilde0, const Vector* f_delta, double delta);

/// Well-posed flows (newton, simple, gradient, gauss_newton, modified_newton,
/// descent). Throws SingularityError at evaluation if a solve is singular.
PhiField make_wellposed_phi(const OperatorProblem& p, Method method);

enum class LinearVariant { plain, preconditioned };

PhiField make_linear_phi(const OperatorProblem& p, LinearVariant variant, const EpsilonSchedule& s);
PhiField make_linear_phi(const NoisyProblem& p, LinearVariant variant, const EpsilonSchedule& s);

enum class MonotoneVariant { regularized_newton, simple };

/// `u_tilde0` defaults to the zero vector.
PhiField make_monotone_phi(const OperatorProblem& p, MonotoneVariant variant,
                           const EpsilonSchedule& s, std::optional<Vector> u_tilde0 = {});
PhiField make_monotone_phi(const NoisyProblem& p, MonotoneVariant variant,
                           const EpsilonSchedule& s, std::optional<Vector> u_tilde0 = {});

PhiField make_nonmonotone_phi(const OperatorProblem& p, const EpsilonSchedule& s,
                              std::optional<Vector> u_tilde0 = {});
PhiField make_nonmonotone_phi(const NoisyProblem& p, const EpsilonSchedule& s,
                              std::optional<Vector> u_tilde0 = {});

/// Dispatch on a method tag; `s` is required by the regularized methods and
/// ignored by the well-posed ones.
PhiField make_phi(const OperatorProblem& p, Method method, std::optional<EpsilonSchedule> s,
                  std::optional<Vector> u_tilde0 = {});
PhiField make_phi(const NoisyProblem& p, Method method, std::optional<EpsilonSchedule> s,
                  std::optional<Vector> u_tilde0 = {});

Vector eval_phi(const PhiField& phi, double t, const Vector& u);

struct CoupledState {
  Vector u;
  Matrix Q;
};

/// u' = -Q F(u), Q' = -T Q + A^T with A = F'(u), T = A^T A. Evaluation uses
/// operator applications only; no linear systems are solved.
class CoupledField {
 public:
  explicit CoupledField(OperatorProblem p, Matrix q0);

  CoupledState operator()(double t, const CoupledState& s, EvalCounters* counters = nullptr) const;

  const OperatorProblem& problem() const { return problem_; }
  const Matrix& q0() const { return q0_; }

 private:
  OperatorProblem problem_;
  Matrix q0_;
};

CoupledField make_coupled_phi(const OperatorProblem& p, const Matrix& q0);

/// ||I - Q F'(y)||_2. Requires p.y_known.
double lambda_defect(const OperatorProblem& p, const Matrix& q);

}  // namespace dsm
