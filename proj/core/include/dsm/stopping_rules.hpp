#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dsm/flow_integrator.hpp"
#include "dsm/operator_model.hpp"
#include "dsm/schedules.hpp"

namespace dsm {

enum class StopKind {
  time_root_eps_power,   // eps(t) = delta^b_rule
  time_root_sqrt_eps,    // 2 sqrt(eps(t)) = delta^b_rule
  time_root_eps_sq_16M,  // eps(t)^2 = 16 M delta
  discrepancy,           // ||B(u) - f_delta|| <= C delta
  residual_threshold,    // ||B(u) - f_delta|| <= threshold
  minimization,          // argmin c eps^a + delta / eps
};

std::string_view stop_kind_tag(StopKind k);
StopKind parse_stop_kind(std::string_view tag);
std::vector<std::string> stop_kind_tags();
bool is_time_root(StopKind k);

struct StopCondition {
  StopKind kind = StopKind::time_root_eps_power;
  double delta = 0.0;
  double b_rule = 0.5;
  double M = 0.0;
  double C = 1.5;
  double threshold = 0.0;
  // decay model c eps^a for the minimization rule
  double c = 0.0;
  double a = 0.0;

  void validate() const;
};

/// The value of eps at which the rule stops. 0 means "never" (delta = 0).
double stopping_eps(const StopCondition& rule);

/// t_delta for time-root and minimization rules, in closed form for power
/// schedules. Returns 0 when eps(0) is already at or below the target and
/// +inf for delta = 0. Throws NoRootError on a constant schedule above the
/// target and UsageError for in-run kinds.
double stopping_time(const StopCondition& rule, const EpsilonSchedule& s);

/// Closed-form minimizer time of c eps^a + delta / eps: eps = (delta/(c a))^{1/(1+a)}.
double minimization_stop(double c, double a, const EpsilonSchedule& s, double delta);

/// Fires at the first state with ||B(u) - f_delta|| <= C delta.
StopFn discrepancy_stop(const NoisyProblem& noisy, double C = 1.5);

/// Fires once ||B(u) - rhs|| <= threshold.
StopFn residual_stop(const OperatorProblem& p, const Vector& rhs, double threshold);

/// t_eps = eps^{-2}, so that eps t_eps = 1/eps grows without bound.
double constant_eps_time(double eps);

}  // namespace dsm
