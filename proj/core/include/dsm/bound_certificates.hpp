#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dsm/operator_model.hpp"
#include "dsm/phi_fields.hpp"
#include "dsm/quadrature.hpp"
#include "dsm/rng.hpp"
#include "dsm/schedules.hpp"

namespace dsm {

// ---------------------------------------------------------------------------
// Riccati differential inequality
//   g' <= -gamma g + sigma g^2 + beta,  g(t0) = g0,
// bounded by (1 - nu(t)) / mu(t) under the admissibility conditions
//   0 <= sigma <= (mu/2)(gamma - mu'/mu),  beta <= (1/(2mu))(gamma - mu'/mu),
//   g0 mu(t0) < 1.

struct RiccatiData {
  ScalarFn gamma;
  ScalarFn sigma;
  ScalarFn beta;
  ScalarFn mu;
  /// Analytic mu'; central differences with step eps^{1/3}(1+|t|) when empty.
  ScalarFn mu_dot;
  double g0 = 0.0;
  double t0 = 0.0;
  /// Set when gamma is constant so its integral is taken in closed form.
  std::optional<double> gamma_const;

  double mu_dot_at(double t) const;
};

struct RiccatiCheck {
  bool ok = true;
  bool initial_ok = true;  // g0 mu(t0) < 1
  std::optional<double> first_violation_t;
  std::string violated;     // which condition failed first, empty when ok
  double min_margin = 0.0;  // smallest slack across the three inequalities
};

RiccatiCheck riccati_conditions(const RiccatiData& d, const std::vector<double>& grid);

struct RiccatiBound {
  double nu = 1.0;
  double bound = 0.0;
};

/// nu(t) = [1/(1 - mu(t0) g0) + (1/2) int_{t0}^t (gamma - mu'/mu)]^{-1} and
/// bound (1 - nu)/mu. The mu'/mu part integrates exactly to ln(mu(t)/mu(t0)).
/// Throws CertificateInapplicable when g0 mu(t0) >= 1.
RiccatiBound riccati_bound(const RiccatiData& d, double t);

struct CompareOptions {
  /// Multiplies the bound before comparison. Only fixtures change this.
  double bound_scale = 1.0;
  double slack_tol = 1e-8;
  /// Points of the uniform grid used for the condition checks.
  int condition_grid = 2001;
};

struct CertificateReport {
  bool applicable = true;    // hypotheses hold
  bool conditions_ok = true;
  bool violated = false;     // numeric solution exceeded the bound
  double max_slack = 0.0;    // max over checked points of (value - bound); <= 0 when dominated
  std::optional<double> first_violation_t;
  long points_checked = 0;
  std::string note;
};

/// Solves g' = -gamma g + sigma g^2 + beta, g(t0) = g0 with adaptive RK45
/// (rtol 1e-12) and compares g against the bound at every accepted step.
/// Inapplicable data (conditions fail) is reported, not thrown.
CertificateReport riccati_compare(const RiccatiData& d, double t_max, const CompareOptions& opt = {});

/// gamma = 1, sigma = M/(2 eps), beta = r |eps'|/eps, mu = 2M/eps, t0 = 0.
RiccatiData regularization_riccati(const EpsilonSchedule& s, double M, double r, double g0);

// ---------------------------------------------------------------------------
// Operator Gronwall inequality for Q' = -T(t) Q + G(t) with (T h, h) >= eps ||h||^2:
//   ||Q(t)|| <= e^{-E(t)} [ ||Q0|| + int_0^t ||G(s)|| e^{E(s)} ds ],  E = int_0^t eps.

using MatrixFn = std::function<Matrix(double)>;

struct GronwallData {
  MatrixFn T;
  MatrixFn G;
  Matrix Q0;
  ScalarFn eps;
};

/// Rayleigh-quotient check of (T(t) h, h) >= eps(t) ||h||^2 (relative slack
/// 1e-12) at each grid time on `samples` random directions plus the least
/// eigenvector of the symmetric part.
bool gronwall_coercive(const GronwallData& d, const std::vector<double>& grid, int samples, Rng& rng);

/// The bound by nested adaptive quadrature.
double gronwall_bound(const GronwallData& d, double t);

/// Integrates the matrix ODE with classical RK4 at step h and, on the same
/// steps, the scalar comparison equation b' = -eps b + ||G||, b(0) = ||Q0||,
/// whose solution is the bound. Compares ||Q(t_k)||_2 with b(t_k).
CertificateReport gronwall_compare(const GronwallData& d, double t_max, double h = 1e-3,
                                   const CompareOptions& opt = {});

// ---------------------------------------------------------------------------
// Well-posed reachability: (F'(u) Phi, F) <= -g1 ||F||^a, ||Phi|| <= g2 ||F||.

enum class WellPosedRegime { a_eq_2, a_lt_2, a_gt_2 };

std::string_view regime_tag(WellPosedRegime r);

struct WellPosedCert {
  double a = 2.0;
  ScalarFn g1;
  ScalarFn g2;
  double F0_norm = 0.0;
  double R = 0.0;
  /// Set for constant g1 / g2; enables closed forms.
  std::optional<double> g1_const;
  std::optional<double> g2_const;

  static WellPosedCert constants(double a, double c1, double c2, double F0_norm, double R);
};

struct WellPosedResult {
  bool applicable = true;
  bool reachable = false;
  WellPosedRegime regime = WellPosedRegime::a_eq_2;
  /// Quantity compared with R: F0 int G (a = 2), F0 int_0^T g2 (a < 2),
  /// int g2 h (a > 2).
  double reach = 0.0;
  std::optional<double> T_finite;
  /// Bound on ||u(t) - y||.
  ScalarFn error_bound;
  /// Bound on ||F(u(t))||; for a > 2 this is h(t).
  ScalarFn residual_bound;
  std::string note;
};

WellPosedResult wellposed_certificate(const WellPosedCert& c);

/// Rate constants (c1, c2) of the well-posed flows on problem p, with R the
/// radius the certificate uses: p.radius, capped at (2 M2 m0)^{-1} for the
/// frozen Newton flow. The simple flow reads its lower derivative bound from
/// p.notes["min_sym_derivative"].
struct FlowConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double R = 0.0;
};

FlowConstants wellposed_constants(Method m, const OperatorProblem& p);

/// Certificate for flow `m` on p started at p.u0 (a = 2, constant g1, g2).
WellPosedResult wellposed_flow_certificate(Method m, const OperatorProblem& p);

// ---------------------------------------------------------------------------
// Inversion-free coupled flow.

/// r = g0 / (1 - g0 c0); throws CertificateInapplicable when g0 c0 >= 1.
double coupled_rate(double g0, double c0);

/// sup_{t>0} (e^{-gamma t} - e^{-c t}) / (c - gamma), with the c = gamma limit 1/(e gamma).
double coupled_sup_factor(double c, double gamma);

}  // namespace dsm
