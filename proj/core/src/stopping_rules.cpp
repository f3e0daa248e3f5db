#include "dsm/stopping_rules.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace dsm {

namespace {

constexpr std::array<std::pair<StopKind, std::string_view>, 6> kTags{{
    {StopKind::time_root_eps_power, "time_root_eps_power"},
    {StopKind::time_root_sqrt_eps, "time_root_sqrt_eps"},
    {StopKind::time_root_eps_sq_16M, "time_root_eps_sq_16M"},
    {StopKind::discrepancy, "discrepancy"},
    {StopKind::residual_threshold, "residual_threshold"},
    {StopKind::minimization, "minimization"},
}};

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string_view stop_kind_tag(StopKind k) {
  for (const auto& [kind, tag] : kTags) {
    if (kind == k) return tag;
  }
  return "unknown";
}

StopKind parse_stop_kind(std::string_view tag) {
  for (const auto& [kind, name] : kTags) {
    if (name == tag) return kind;
  }
  throw UsageError("unknown stop rule '" + std::string(tag) + "'");
}

std::vector<std::string> stop_kind_tags() {
  std::vector<std::string> out;
  for (const auto& entry : kTags) out.emplace_back(entry.second);
  return out;
}

bool is_time_root(StopKind k) {
  return k == StopKind::time_root_eps_power || k == StopKind::time_root_sqrt_eps ||
         k == StopKind::time_root_eps_sq_16M;
}

void StopCondition::validate() const {
  if (!(delta >= 0.0)) throw UsageError("stop: delta must be >= 0");
  switch (kind) {
    case StopKind::time_root_eps_power:
    case StopKind::time_root_sqrt_eps:
      if (!(b_rule > 0.0 && b_rule < 1.0)) throw UsageError("stop: b_rule must lie in (0, 1)");
      break;
    case StopKind::time_root_eps_sq_16M:
      if (!(M > 0.0)) throw UsageError("stop: M must be positive");
      break;
    case StopKind::discrepancy:
      if (!(C > 1.0)) throw UsageError("stop: discrepancy constant C must exceed 1");
      break;
    case StopKind::residual_threshold:
      if (!(threshold >= 0.0)) throw UsageError("stop: threshold must be >= 0");
      break;
    case StopKind::minimization:
      if (!(c > 0.0) || !(a > 0.0)) {
        throw UsageError("stop: minimization rule needs a decay model c eps^a with c, a > 0");
      }
      break;
  }
}

double stopping_eps(const StopCondition& rule) {
  rule.validate();
  const double d = rule.delta;
  switch (rule.kind) {
    case StopKind::time_root_eps_power:
      return std::pow(d, rule.b_rule);
    case StopKind::time_root_sqrt_eps: {
      const double half = 0.5 * std::pow(d, rule.b_rule);
      return half * half;
    }
    case StopKind::time_root_eps_sq_16M:
      return 4.0 * std::sqrt(rule.M * d);
    case StopKind::minimization:
      return std::pow(d / (rule.c * rule.a), 1.0 / (1.0 + rule.a));
    case StopKind::discrepancy:
    case StopKind::residual_threshold:
      break;
  }
  throw UsageError("stop: '" + std::string(stop_kind_tag(rule.kind)) +
                   "' is evaluated during the run, not in closed form");
}

double stopping_time(const StopCondition& rule, const EpsilonSchedule& s) {
  const double target = stopping_eps(rule);
  if (target == 0.0) return kInf;
  return s.time_at(target);
}

double minimization_stop(double c, double a, const EpsilonSchedule& s, double delta) {
  StopCondition rule;
  rule.kind = StopKind::minimization;
  rule.c = c;
  rule.a = a;
  rule.delta = delta;
  return stopping_time(rule, s);
}

StopFn discrepancy_stop(const NoisyProblem& noisy, double C) {
  if (!(C > 1.0)) throw UsageError("discrepancy_stop: C must exceed 1");
  noisy.validate();
  return residual_stop(noisy.base, noisy.f_delta, C * noisy.delta);
}

StopFn residual_stop(const OperatorProblem& p, const Vector& rhs, double threshold) {
  if (!(threshold >= 0.0)) throw UsageError("residual_stop: threshold must be >= 0");
  return [p, rhs, threshold](double, const Vector& u) {
    return residual(p, u, rhs).norm() <= threshold;
  };
}

double constant_eps_time(double eps) {
  if (!(eps > 0.0)) throw UsageError("constant_eps_time: eps must be positive");
  return 1.0 / (eps * eps);
}

}  // namespace dsm
