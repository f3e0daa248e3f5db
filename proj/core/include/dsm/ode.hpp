#pragma once

// Explicit time steppers shared by the flow integrator and the certificate
// comparisons. Header-only so the right-hand side inlines.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dsm/errors.hpp"
#include "dsm/types.hpp"

namespace dsm {

enum class StepperKind { euler, rk4, rk45_adaptive };

struct StepperSpec {
  StepperKind kind = StepperKind::rk45_adaptive;
  double h = 1e-2;  // fixed-step kinds
  double rtol = 1e-8;
  double atol = 1e-10;
  double t_max = 10.0;
  long max_steps = 10'000'000;
  /// First trial step for the adaptive kind; 0 selects one automatically.
  double h_initial = 0.0;

  void validate() const {
    if (!(h > 0.0)) throw UsageError("stepper: h must be positive");
    if (!(rtol > 0.0) || !(atol > 0.0)) throw UsageError("stepper: rtol and atol must be positive");
    if (!(t_max > 0.0)) throw UsageError("stepper: t_max must be positive");
    if (max_steps < 1) throw UsageError("stepper: max_steps must be >= 1");
    if (h_initial < 0.0) throw UsageError("stepper: h_initial must be >= 0");
  }
};

std::string_view stepper_tag(StepperKind k);
StepperKind parse_stepper(std::string_view tag);

namespace ode {

enum class Outcome { reached_t_max, max_steps, stopped };

/// y + h * rhs(t, y). The single definition of the explicit Euler update.
template <class Rhs>
Vector euler_step(Rhs& rhs, double t, const Vector& y, double h) {
  return y + h * rhs(t, y);
}

template <class Rhs>
Vector rk4_step(Rhs& rhs, double t, const Vector& y, double h) {
  const Vector k1 = rhs(t, y);
  const Vector k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
  const Vector k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
  const Vector k4 = rhs(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Runs the stepper from (t0, y0). `accept(t, y)` is called for the initial
/// state and after every accepted step; returning true stops the run.
template <class Rhs, class Accept>
Outcome drive(Rhs&& rhs, double t0, Vector y, const StepperSpec& spec, Accept&& accept) {
  spec.validate();
  if (accept(t0, static_cast<const Vector&>(y))) return Outcome::stopped;
  const double t_end = spec.t_max;
  if (!(t_end > t0)) return Outcome::reached_t_max;

  if (spec.kind != StepperKind::rk45_adaptive) {
    const double h = spec.h;
    long n = 0;
    double t = t0;
    while (true) {
      if (n >= spec.max_steps) return Outcome::max_steps;
      double t_next = t0 + static_cast<double>(n + 1) * h;
      bool last = false;
      if (t_next >= t_end - 1e-12 * h) {
        t_next = t_end;
        last = true;
      }
      const double step = last ? t_next - t : h;
      if (step > 0.0) {
        y = spec.kind == StepperKind::euler ? euler_step(rhs, t, y, step) : rk4_step(rhs, t, y, step);
        t = t_next;
        ++n;
        if (accept(t, static_cast<const Vector&>(y))) return Outcome::stopped;
      }
      if (last) return Outcome::reached_t_max;
    }
  }

  // Dormand-Prince 5(4) with FSAL.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double kSafety = 0.9, kMinFactor = 0.2, kMaxFactor = 5.0;

  auto err_norm = [&](const Vector& err, const Vector& ya, const Vector& yb) {
    const auto scale = spec.atol + spec.rtol * ya.cwiseAbs().cwiseMax(yb.cwiseAbs()).array();
    return std::sqrt((err.array() / scale).square().mean());
  };

  double t = t0;
  Vector k1 = rhs(t, y);
  double h = spec.h_initial;
  if (h == 0.0) {
    const auto scale = spec.atol + spec.rtol * y.cwiseAbs().array();
    const double d0 = std::sqrt((y.array() / scale).square().mean());
    const double d1 = std::sqrt((k1.array() / scale).square().mean());
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end - t0);
    const Vector k_probe = rhs(t + h0, Vector(y + h0 * k1));
    const double d2 = std::sqrt((((k_probe - k1).array() / scale)).square().mean()) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
    h = std::min(100.0 * h0, h1);
  }
  h = std::min(h, t_end - t0);

  long steps = 0;
  while (true) {
    if (steps >= spec.max_steps) return Outcome::max_steps;
    bool last = false;
    if (t + h >= t_end) {
      h = t_end - t;
      last = true;
    }
    const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < h_floor) {
      throw StiffnessError("adaptive step size underflow at t = " + std::to_string(t), t);
    }
    const Vector k2 = rhs(t + c2 * h, Vector(y + h * (a21 * k1)));
    const Vector k3 = rhs(t + c3 * h, Vector(y + h * (a31 * k1 + a32 * k2)));
    const Vector k4 = rhs(t + c4 * h, Vector(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const Vector k5 = rhs(t + c5 * h, Vector(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const Vector k6 =
        rhs(t + h, Vector(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    Vector y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double t_new = last ? t_end : t + h;
    const Vector k7 = rhs(t_new, y_new);
    const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = err_norm(err, y, y_new);

    if (std::isfinite(en) && en <= 1.0) {
      t = t_new;
      y = std::move(y_new);
      k1 = k7;
      ++steps;
      if (accept(t, static_cast<const Vector&>(y))) return Outcome::stopped;
      if (last) return Outcome::reached_t_max;
      const double factor = en == 0.0 ? kMaxFactor
                                      : std::clamp(kSafety * std::pow(en, -0.2), kMinFactor, kMaxFactor);
      h *= factor;
    } else {
      const double factor = std::isfinite(en)
                                ? std::clamp(kSafety * std::pow(en, -0.2), kMinFactor, 1.0)
                                : kMinFactor;
      h *= factor;
    }
  }
}

}  // namespace ode
}  // namespace dsm
