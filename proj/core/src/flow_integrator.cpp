#include "dsm/flow_integrator.hpp"

#include <cmath>
#include <numeric>

namespace dsm {

std::string_view stepper_tag(StepperKind k) {
  switch (k) {
    case StepperKind::euler:
      return "euler";
    case StepperKind::rk4:
      return "rk4";
    case StepperKind::rk45_adaptive:
      return "rk45_adaptive";
  }
  return "unknown";
}

StepperKind parse_stepper(std::string_view tag) {
  if (tag == "euler") return StepperKind::euler;
  if (tag == "rk4") return StepperKind::rk4;
  if (tag == "rk45_adaptive" || tag == "rk45") return StepperKind::rk45_adaptive;
  throw UsageError("unknown stepper '" + std::string(tag) + "'");
}

std::string_view termination_tag(Termination t) {
  switch (t) {
    case Termination::t_max:
      return "t_max";
    case Termination::max_steps:
      return "max_steps";
    case Termination::stopped:
      return "stopped";
    case Termination::converged:
      return "converged";
    case Termination::singular:
      return "singular";
    case Termination::stiff:
      return "stiff";
  }
  return "unknown";
}

namespace {

class Recorder {
 public:
  Recorder(const OperatorProblem& p, const Vector& rhs, TrajectoryLog& log)
      : problem_(p), rhs_(rhs), log_(log) {}

  void record(double t, const Vector& u, double eps) {
    log_.times.push_back(t);
    log_.states.push_back(u);
    log_.residual_norms.push_back(residual(problem_, u, rhs_).norm());
    log_.eps_values.push_back(eps);
    if (problem_.y_known) log_.error_norms.push_back((u - *problem_.y_known).norm());
  }

 private:
  const OperatorProblem& problem_;
  const Vector& rhs_;
  TrajectoryLog& log_;
};

Termination to_termination(ode::Outcome o) {
  switch (o) {
    case ode::Outcome::reached_t_max:
      return Termination::t_max;
    case ode::Outcome::max_steps:
      return Termination::max_steps;
    case ode::Outcome::stopped:
      return Termination::stopped;
  }
  return Termination::t_max;
}

void copy_counters(const EvalCounters& c, TrajectoryLog& log) {
  log.vdot_counter = c.evals;
  log.solve_counter = c.solves;
  log.ball_exits = c.ball_exits;
}

/// Runs `body`; singular solves and step underflow become IntegrationError
/// carrying whatever was logged so far.
template <class Body>
void guarded(TrajectoryLog& log, const EvalCounters& counters, Body&& body) {
  try {
    body();
  } catch (const SingularityError& e) {
    copy_counters(counters, log);
    log.termination = Termination::singular;
    log.message = e.what();
    throw IntegrationError(e.what(), std::move(log));
  } catch (const StiffnessError& e) {
    copy_counters(counters, log);
    log.termination = Termination::stiff;
    log.message = e.what();
    throw IntegrationError(e.what(), std::move(log));
  }
  copy_counters(counters, log);
}

}  // namespace

TrajectoryLog integrate(const PhiField& phi, const Vector& u0, const StepperSpec& spec,
                        const StopFn& stop) {
  const OperatorProblem& p = phi.problem();
  if (u0.size() != p.dim) throw UsageError("integrate: u0 dimension mismatch");
  spec.validate();

  TrajectoryLog log;
  EvalCounters counters;
  Recorder recorder(p, phi.rhs(), log);
  auto rhs = [&](double t, const Vector& u) { return phi(t, u, &counters); };
  auto accept = [&](double t, const Vector& u) {
    recorder.record(t, u, phi.eps(t));
    return stop && stop(t, u);
  };
  guarded(log, counters, [&] {
    log.termination = to_termination(ode::drive(rhs, 0.0, u0, spec, accept));
  });
  return log;
}

TrajectoryLog integrate_coupled(const CoupledField& phi, const Vector& u0, const Matrix& q0,
                                const StepperSpec& spec, const StopFn& stop) {
  const OperatorProblem& p = phi.problem();
  const Eigen::Index n = p.dim;
  if (u0.size() != n) throw UsageError("integrate_coupled: u0 dimension mismatch");
  if (q0.rows() != n || q0.cols() != n) throw UsageError("integrate_coupled: Q0 must be n x n");
  spec.validate();

  // packed state [u; vec(Q)] in column-major order
  auto unpack = [n](const Vector& y) {
    CoupledState s;
    s.u = y.head(n);
    s.Q = Eigen::Map<const Matrix>(y.data() + n, n, n);
    return s;
  };
  Vector y0(n + n * n);
  y0.head(n) = u0;
  y0.tail(n * n) = Eigen::Map<const Vector>(q0.data(), n * n);

  TrajectoryLog log;
  EvalCounters counters;
  Recorder recorder(p, p.rhs, log);
  auto rhs = [&](double t, const Vector& y) {
    const CoupledState d = phi(t, unpack(y), &counters);
    Vector out(y.size());
    out.head(n) = d.u;
    out.tail(n * n) = Eigen::Map<const Vector>(d.Q.data(), n * n);
    return out;
  };
  auto accept = [&](double t, const Vector& y) {
    CoupledState s = unpack(y);
    recorder.record(t, s.u, 0.0);
    if (p.y_known) log.lambda_defects.push_back(lambda_defect(p, s.Q));
    log.q_states.push_back(std::move(s.Q));
    return stop && stop(t, s.u);
  };
  guarded(log, counters, [&] {
    log.termination = to_termination(ode::drive(rhs, 0.0, y0, spec, accept));
  });
  return log;
}

TrajectoryLog iterate_fixed(const PhiField& phi, const Vector& u0, double h, long n_max,
                            const StopFn& stop) {
  if (!phi.autonomous()) throw UsageError("iterate_fixed: field depends explicitly on t");
  if (!(h > 0.0)) throw UsageError("iterate_fixed: h must be positive");
  if (n_max < 0) throw UsageError("iterate_fixed: n_max must be >= 0");
  const OperatorProblem& p = phi.problem();
  if (u0.size() != p.dim) throw UsageError("iterate_fixed: u0 dimension mismatch");

  TrajectoryLog log;
  EvalCounters counters;
  Recorder recorder(p, phi.rhs(), log);
  auto rhs = [&](double t, const Vector& u) { return phi(t, u, &counters); };
  guarded(log, counters, [&] {
    Vector u = u0;
    recorder.record(0.0, u, phi.eps(0.0));
    log.termination = Termination::t_max;
    if (stop && stop(0.0, u)) {
      log.termination = Termination::stopped;
      return;
    }
    for (long n = 0; n < n_max; ++n) {
      const double t = static_cast<double>(n) * h;
      u = ode::euler_step(rhs, t, u, h);
      const double t_next = static_cast<double>(n + 1) * h;
      recorder.record(t_next, u, phi.eps(t_next));
      if (stop && stop(t_next, u)) {
        log.termination = Termination::stopped;
        return;
      }
    }
  });
  return log;
}

TrajectoryLog discrete_newton(const OperatorProblem& p, const Vector& u0, long n_max, double tol) {
  p.validate();
  if (u0.size() != p.dim) throw UsageError("discrete_newton: u0 dimension mismatch");
  if (n_max < 0) throw UsageError("discrete_newton: n_max must be >= 0");
  if (tol < 0.0) throw UsageError("discrete_newton: tol must be >= 0");

  TrajectoryLog log;
  EvalCounters counters;
  Recorder recorder(p, p.rhs, log);
  guarded(log, counters, [&] {
    Vector u = u0;
    log.termination = Termination::max_steps;
    for (long n = 0;; ++n) {
      recorder.record(static_cast<double>(n), u, 0.0);
      if (log.residual_norms.back() < tol) {
        log.termination = Termination::converged;
        return;
      }
      if (n == n_max) return;
      Eigen::PartialPivLU<Matrix> lu(p.jacobian(u));
      if (!(lu_rcond(lu) > 1e-14)) {
        throw SingularityError("discrete_newton: singular Jacobian at step " + std::to_string(n),
                               static_cast<double>(n), u);
      }
      ++counters.evals;
      ++counters.solves;
      u -= lu.solve(residual(p, u));
    }
  });
  return log;
}

double fitted_decay_rate(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw UsageError("fitted_decay_rate: size mismatch");
  double st = 0, sl = 0, stt = 0, stl = 0;
  long count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) continue;
    const double l = std::log(values[i]);
    st += times[i];
    sl += l;
    stt += times[i] * times[i];
    stl += times[i] * l;
    ++count;
  }
  if (count < 2) throw UsageError("fitted_decay_rate: need at least two positive samples");
  const double denom = count * stt - st * st;
  if (!(denom > 0.0)) throw UsageError("fitted_decay_rate: degenerate sample times");
  return -(count * stl - st * sl) / denom;
}

}  // namespace dsm
