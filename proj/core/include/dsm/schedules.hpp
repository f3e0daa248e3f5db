#pragma once

#include <string>
#include <utility>

namespace dsm {

/// Regularization function eps(t) > 0, nonincreasing on t >= 0.
///
/// power:    eps(t) = c1 (c0 + t)^{-b}, 0 < b < 1
/// constant: eps(t) = eps_const
class EpsilonSchedule {
 public:
  enum class Kind { power, constant };

  static EpsilonSchedule power(double c1, double c0, double b);
  static EpsilonSchedule constant(double eps);

  Kind kind() const { return kind_; }
  double c1() const { return c1_; }
  double c0() const { return c0_; }
  double b() const { return b_; }
  double eps_const() const { return eps_const_; }
  bool is_constant() const { return kind_ == Kind::constant; }

  /// eps(t); throws UsageError for t < 0.
  double eval(double t) const;
  double operator()(double t) const { return eval(t); }
  /// d eps / dt (nonpositive).
  double derivative(double t) const;
  /// (|eps'|/eps, |eps'|/eps^2); (0, 0) for constant schedules.
  std::pair<double, double> derivative_ratio(double t) const;
  /// Closed form of the integral of eps over [t0, t1].
  double integral(double t0, double t1) const;
  /// Smallest t >= 0 with eps(t) <= target: 0 when eps(0) <= target.
  /// Throws NoRootError for constant schedules above the target.
  double time_at(double target) const;

  std::string describe() const;

 private:
  EpsilonSchedule(Kind kind, double c1, double c0, double b, double eps)
      : kind_(kind), c1_(c1), c0_(c0), b_(b), eps_const_(eps) {}

  Kind kind_;
  double c1_;
  double c0_;
  double b_;
  double eps_const_;
};

/// Schedule for the regularized Newton flow on monotone problems with
/// second-derivative bound M and r >= ||y|| + ||u0||: power kind with
/// c0 = 4b and c1 = 4 M r c0^b, so eps(0) = 4 M r and |eps'|/eps <= 1/4.
EpsilonSchedule theorem42_schedule(double M, double r, double b = 0.5);

}  // namespace dsm
