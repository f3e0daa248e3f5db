#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dsm/errors.hpp"
#include "dsm/ode.hpp"
#include "dsm/operator_model.hpp"
#include "dsm/phi_fields.hpp"
#include "dsm/types.hpp"

namespace dsm {

/// In-run stop condition evaluated on every accepted state.
using StopFn = std::function<bool(double t, const Vector& u)>;

enum class Termination { t_max, max_steps, stopped, converged, singular, stiff };

std::string_view termination_tag(Termination t);

/// One experimental run: every accepted state with its residual norm,
/// regularization parameter and (when the problem knows y) error norm.
struct TrajectoryLog {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> residual_norms;
  std::vector<double> eps_values;
  std::vector<double> error_norms;  // empty when no reference solution exists
  // coupled runs only
  std::vector<Matrix> q_states;
  std::vector<double> lambda_defects;

  long vdot_counter = 0;
  long solve_counter = 0;
  long ball_exits = 0;
  Termination termination = Termination::t_max;
  std::string message;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  double final_time() const { return times.back(); }
  const Vector& final_state() const { return states.back(); }
  bool has_errors() const { return !error_norms.empty(); }
};

/// Thrown when a run ends on a singular solve or a step-size underflow. The
/// trajectory up to the failure is preserved.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, TrajectoryLog partial)
      : Error(what), partial_(std::move(partial)) {}
  const TrajectoryLog& partial() const { return partial_; }
  Termination kind() const { return partial_.termination; }

 private:
  TrajectoryLog partial_;
};

/// Integrates u' = phi(t, u) from u(0) = u0 until t_max, max_steps or `stop`.
TrajectoryLog integrate(const PhiField& phi, const Vector& u0, const StepperSpec& spec,
                        const StopFn& stop = {});

/// Integrates the coupled (u, Q) system. `stop` sees only u.
TrajectoryLog integrate_coupled(const CoupledField& phi, const Vector& u0, const Matrix& q0,
                                const StepperSpec& spec, const StopFn& stop = {});

/// u_{n+1} = u_n + h phi(u_n) for an autonomous field; t_n = n h.
TrajectoryLog iterate_fixed(const PhiField& phi, const Vector& u0, double h, long n_max,
                            const StopFn& stop = {});

/// u_{n+1} = u_n - F'(u_n)^{-1} F(u_n); stops after n_max steps or once
/// ||F(u_n)|| < tol. Times are iteration indices.
TrajectoryLog discrete_newton(const OperatorProblem& p, const Vector& u0, long n_max, double tol);

/// Least-squares slope c of log(e_n) against t_n (decay e_n ~ C exp(-c t)).
/// Entries that are zero or not finite are skipped.
double fitted_decay_rate(const std::vector<double>& times, const std::vector<double>& values);

}  // namespace dsm
