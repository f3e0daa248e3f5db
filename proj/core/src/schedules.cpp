#include "dsm/schedules.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dsm/errors.hpp"

namespace dsm {

EpsilonSchedule EpsilonSchedule::power(double c1, double c0, double b) {
  if (!(c1 > 0.0) || !(c0 > 0.0)) throw UsageError("power schedule: c1 and c0 must be positive");
  if (!(b > 0.0 && b < 1.0)) throw UsageError("power schedule: b must lie in (0, 1)");
  return EpsilonSchedule(Kind::power, c1, c0, b, 0.0);
}

EpsilonSchedule EpsilonSchedule::constant(double eps) {
  if (!(eps > 0.0)) throw UsageError("constant schedule: eps must be positive");
  return EpsilonSchedule(Kind::constant, 0.0, 0.0, 0.0, eps);
}

double EpsilonSchedule::eval(double t) const {
  if (t < 0.0) throw UsageError("schedule: t must be >= 0");
  if (kind_ == Kind::constant) return eps_const_;
  return c1_ * std::pow(c0_ + t, -b_);
}

double EpsilonSchedule::derivative(double t) const {
  if (t < 0.0) throw UsageError("schedule: t must be >= 0");
  if (kind_ == Kind::constant) return 0.0;
  return -b_ * c1_ * std::pow(c0_ + t, -b_ - 1.0);
}

std::pair<double, double> EpsilonSchedule::derivative_ratio(double t) const {
  if (t < 0.0) throw UsageError("schedule: t must be >= 0");
  if (kind_ == Kind::constant) return {0.0, 0.0};
  return {b_ / (c0_ + t), b_ / c1_ * std::pow(c0_ + t, b_ - 1.0)};
}

double EpsilonSchedule::integral(double t0, double t1) const {
  if (t0 < 0.0 || t1 < t0) throw UsageError("schedule integral: need 0 <= t0 <= t1");
  if (kind_ == Kind::constant) return eps_const_ * (t1 - t0);
  const double e = 1.0 - b_;
  return c1_ * (std::pow(c0_ + t1, e) - std::pow(c0_ + t0, e)) / e;
}

double EpsilonSchedule::time_at(double target) const {
  if (!(target >= 0.0)) throw UsageError("schedule time_at: target must be >= 0");
  if (eval(0.0) <= target) return 0.0;
  if (kind_ == Kind::constant) {
    throw NoRootError("constant schedule never reaches eps = " + std::to_string(target));
  }
  if (target == 0.0) return std::numeric_limits<double>::infinity();
  // c1 (c0 + t)^{-b} = target
  const double t = std::pow(c1_ / target, 1.0 / b_) - c0_;
  return t > 0.0 ? t : 0.0;
}

std::string EpsilonSchedule::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind_ == Kind::constant) {
    os << "constant(eps=" << eps_const_ << ")";
  } else {
    os << "power(c1=" << c1_ << ", c0=" << c0_ << ", b=" << b_ << ")";
  }
  return os.str();
}

EpsilonSchedule theorem42_schedule(double M, double r, double b) {
  if (!(M > 0.0) || !(r > 0.0)) throw UsageError("theorem42_schedule: M and r must be positive");
  if (!(b > 0.0 && b < 1.0)) throw UsageError("theorem42_schedule: b must lie in (0, 1)");
  const double c0 = 4.0 * b;
  const double c1 = 4.0 * M * r * std::pow(c0, b);
  return EpsilonSchedule::power(c1, c0, b);
}

}  // namespace dsm
