#include "dsm/bound_certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dsm/errors.hpp"
#include "dsm/ode.hpp"

namespace dsm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> uniform_grid(double a, double b, int points) {
  std::vector<double> grid(static_cast<std::size_t>(std::max(points, 2)));
  const double n = static_cast<double>(grid.size() - 1);
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = a + (b - a) * (static_cast<double>(k) / n);
  grid.back() = b;
  return grid;
}

/// Running integral of gamma from t0, extended monotonically in t.
class GammaIntegral {
 public:
  explicit GammaIntegral(const RiccatiData& d) : d_(d), last_t_(d.t0) {}

  double at(double t) {
    if (d_.gamma_const) return *d_.gamma_const * (t - d_.t0);
    if (t < last_t_) return adaptive_simpson(d_.gamma, d_.t0, t, 1e-10, 1e-13);
    acc_ += adaptive_simpson(d_.gamma, last_t_, t, 1e-11, 1e-13);
    last_t_ = t;
    return acc_;
  }

 private:
  const RiccatiData& d_;
  double last_t_;
  double acc_ = 0.0;
};

RiccatiBound bound_from(const RiccatiData& d, double t, double gamma_integral) {
  const double mu0 = d.mu(d.t0);
  const double mut = d.mu(t);
  const double head = 1.0 / (1.0 - mu0 * d.g0);
  const double inv_nu = head + 0.5 * (gamma_integral - std::log(mut / mu0));
  RiccatiBound out;
  out.nu = 1.0 / inv_nu;
  out.bound = (1.0 - out.nu) / mut;
  return out;
}

}  // namespace

double RiccatiData::mu_dot_at(double t) const {
  if (mu_dot) return mu_dot(t);
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(t));
  return (mu(t + h) - mu(t - h)) / (2.0 * h);
}

RiccatiCheck riccati_conditions(const RiccatiData& d, const std::vector<double>& grid) {
  RiccatiCheck out;
  out.min_margin = kInf;
  auto fail = [&](double t, const char* which) {
    if (out.ok) {
      out.ok = false;
      out.first_violation_t = t;
      out.violated = which;
    }
  };

  const double m0 = 1.0 - d.g0 * d.mu(d.t0);
  out.min_margin = std::min(out.min_margin, m0);
  if (!(m0 > 0.0)) {
    out.initial_ok = false;
    fail(d.t0, "g0*mu(t0) < 1");
  }
  for (double t : grid) {
    if (t < d.t0) continue;
    const double mu = d.mu(t);
    const double gap = d.gamma(t) - d.mu_dot_at(t) / mu;
    const double sigma = d.sigma(t);
    const double beta = d.beta(t);
    const double sigma_cap = 0.5 * mu * gap;
    const double beta_cap = gap / (2.0 * mu);
    const double tol_s = 1e-12 * (1.0 + std::abs(sigma) + std::abs(sigma_cap));
    const double tol_b = 1e-12 * (1.0 + std::abs(beta) + std::abs(beta_cap));
    out.min_margin = std::min({out.min_margin, sigma, sigma_cap - sigma, beta_cap - beta});
    if (sigma < -tol_s) fail(t, "sigma >= 0");
    if (sigma > sigma_cap + tol_s) fail(t, "sigma <= (mu/2)(gamma - mu'/mu)");
    if (beta > beta_cap + tol_b) fail(t, "beta <= (gamma - mu'/mu)/(2 mu)");
  }
  return out;
}

RiccatiBound riccati_bound(const RiccatiData& d, double t) {
  if (!(d.g0 * d.mu(d.t0) < 1.0)) {
    throw CertificateInapplicable("riccati_bound: g0 * mu(t0) >= 1");
  }
  if (t < d.t0) throw UsageError("riccati_bound: t must be >= t0");
  GammaIntegral gi(d);
  return bound_from(d, t, gi.at(t));
}

CertificateReport riccati_compare(const RiccatiData& d, double t_max, const CompareOptions& opt) {
  if (!(t_max > d.t0)) throw UsageError("riccati_compare: t_max must exceed t0");
  CertificateReport rep;
  const RiccatiCheck check = riccati_conditions(d, uniform_grid(d.t0, t_max, opt.condition_grid));
  rep.conditions_ok = check.ok;
  if (!check.ok) {
    rep.applicable = false;
    rep.first_violation_t = check.first_violation_t;
    rep.note = "condition violated: " + check.violated;
    return rep;
  }

  StepperSpec spec;
  spec.kind = StepperKind::rk45_adaptive;
  spec.rtol = 1e-12;
  spec.atol = 1e-14;
  spec.t_max = t_max;
  spec.max_steps = 5'000'000;

  GammaIntegral gi(d);
  rep.max_slack = -kInf;
  auto rhs = [&](double t, const Vector& g) {
    Vector out(1);
    out[0] = -d.gamma(t) * g[0] + d.sigma(t) * g[0] * g[0] + d.beta(t);
    return out;
  };
  auto accept = [&](double t, const Vector& g) {
    if (!std::isfinite(g[0])) throw StiffnessError("riccati_compare: solution is not finite", t);
    const RiccatiBound b = bound_from(d, t, gi.at(t));
    const double slack = g[0] - opt.bound_scale * b.bound;
    ++rep.points_checked;
    rep.max_slack = std::max(rep.max_slack, slack);
    if (slack > opt.slack_tol && !rep.first_violation_t) {
      rep.violated = true;
      rep.first_violation_t = t;
    }
    return false;
  };
  try {
    ode::drive(rhs, d.t0, Vector::Constant(1, d.g0), spec, accept);
  } catch (const StiffnessError& e) {
    rep.violated = true;
    rep.first_violation_t = e.t();
    rep.note = std::string("equality ODE blew up: ") + e.what();
  }
  return rep;
}

RiccatiData regularization_riccati(const EpsilonSchedule& s, double M, double r, double g0) {
  if (!(M > 0.0) || !(r > 0.0)) throw UsageError("regularization_riccati: M and r must be positive");
  RiccatiData d;
  d.gamma = [](double) { return 1.0; };
  d.gamma_const = 1.0;
  d.sigma = [s, M](double t) { return M / (2.0 * s.eval(t)); };
  d.beta = [s, r](double t) { return r * s.derivative_ratio(t).first; };
  d.mu = [s, M](double t) { return 2.0 * M / s.eval(t); };
  d.mu_dot = [s, M](double t) {
    const double e = s.eval(t);
    return -2.0 * M * s.derivative(t) / (e * e);
  };
  d.g0 = g0;
  d.t0 = 0.0;
  return d;
}

bool gronwall_coercive(const GronwallData& d, const std::vector<double>& grid, int samples, Rng& rng) {
  for (double t : grid) {
    const Matrix T = d.T(t);
    const double e = d.eps(t);
    auto ok = [&](const Vector& h) {
      const double lhs = h.dot(T * h);
      const double rhs = e * h.squaredNorm();
      return lhs >= rhs - 1e-12 * (std::abs(lhs) + std::abs(rhs)) - 1e-300;
    };
    const Matrix sym = 0.5 * (T + T.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success) throw NumericError("gronwall_coercive: eigen solve failed");
    if (!ok(es.eigenvectors().col(0))) return false;
    for (int k = 0; k < samples; ++k) {
      if (!ok(rng.unit_vector(T.rows()))) return false;
    }
  }
  return true;
}

double gronwall_bound(const GronwallData& d, double t) {
  if (t < 0.0) throw UsageError("gronwall_bound: t must be >= 0");
  const double q0 = spectral_norm(d.Q0);
  if (t == 0.0) return q0;
  auto E = [&](double s) { return adaptive_simpson(d.eps, 0.0, s, 1e-13, 1e-14); };
  const double Et = E(t);
  const ScalarFn forcing = [&](double s) { return spectral_norm(d.G(s)) * std::exp(E(s) - Et); };
  return q0 * std::exp(-Et) + adaptive_simpson(forcing, 0.0, t, 1e-12, 1e-12);
}

CertificateReport gronwall_compare(const GronwallData& d, double t_max, double h,
                                   const CompareOptions& opt) {
  if (!(t_max > 0.0)) throw UsageError("gronwall_compare: t_max must be positive");
  const Eigen::Index n = d.Q0.rows();
  if (d.Q0.cols() != n) throw UsageError("gronwall_compare: Q0 must be square");
  const Eigen::Index nn = n * n;

  Vector y0(nn + 1);
  y0.head(nn) = Eigen::Map<const Vector>(d.Q0.data(), nn);
  y0[nn] = spectral_norm(d.Q0);

  auto rhs = [&](double t, const Vector& y) {
    const Eigen::Map<const Matrix> Q(y.data(), n, n);
    const Matrix G = d.G(t);
    const Matrix dQ = -d.T(t) * Q + G;
    Vector out(nn + 1);
    out.head(nn) = Eigen::Map<const Vector>(dQ.data(), nn);
    out[nn] = -d.eps(t) * y[nn] + spectral_norm(G);
    return out;
  };

  CertificateReport rep;
  rep.max_slack = -kInf;
  auto accept = [&](double t, const Vector& y) {
    const Eigen::Map<const Matrix> Q(y.data(), n, n);
    const double slack = spectral_norm(Q) - opt.bound_scale * y[nn];
    ++rep.points_checked;
    rep.max_slack = std::max(rep.max_slack, slack);
    if (slack > opt.slack_tol && !rep.first_violation_t) {
      rep.violated = true;
      rep.first_violation_t = t;
    }
    return false;
  };

  StepperSpec spec;
  spec.kind = StepperKind::rk4;
  spec.h = h;
  spec.t_max = t_max;
  spec.max_steps = static_cast<long>(std::ceil(t_max / h)) + 2;
  ode::drive(rhs, 0.0, y0, spec, accept);
  return rep;
}

std::string_view regime_tag(WellPosedRegime r) {
  switch (r) {
    case WellPosedRegime::a_eq_2:
      return "a=2";
    case WellPosedRegime::a_lt_2:
      return "a<2";
    case WellPosedRegime::a_gt_2:
      return "a>2";
  }
  return "unknown";
}

WellPosedCert WellPosedCert::constants(double a, double c1, double c2, double F0_norm, double R) {
  WellPosedCert c;
  c.a = a;
  c.g1 = [c1](double) { return c1; };
  c.g2 = [c2](double) { return c2; };
  c.g1_const = c1;
  c.g2_const = c2;
  c.F0_norm = F0_norm;
  c.R = R;
  return c;
}

namespace {

/// int_0^t g1, closed form for constants.
double g1_integral(const WellPosedCert& c, double t) {
  if (c.g1_const) return *c.g1_const * t;
  return adaptive_simpson(c.g1, 0.0, t, 1e-12, 1e-12);
}

/// Growth test for int_0^inf g1 = inf on horizons 10^k: the last decade's
/// increment must not have shrunk below 0.9 of the previous one.
bool g1_diverges(const WellPosedCert& c) {
  if (c.g1_const) return *c.g1_const > 0.0;
  double prev = g1_integral(c, 1e4) - g1_integral(c, 1e3);
  double last = g1_integral(c, 1e5) - g1_integral(c, 1e4);
  return last > 0.0 && last >= 0.9 * prev;
}

}  // namespace

WellPosedResult wellposed_certificate(const WellPosedCert& c) {
  if (!(c.a > 0.0)) throw UsageError("wellposed_certificate: a must be positive");
  if (!c.g1 || !c.g2) throw UsageError("wellposed_certificate: g1 and g2 are required");
  if (!(c.F0_norm >= 0.0)) throw UsageError("wellposed_certificate: ||F(u0)|| must be >= 0");
  if (!(c.R > 0.0)) throw UsageError("wellposed_certificate: R must be positive");

  WellPosedResult out;
  out.regime = c.a == 2.0 ? WellPosedRegime::a_eq_2
               : c.a < 2.0 ? WellPosedRegime::a_lt_2
                           : WellPosedRegime::a_gt_2;
  const double F0 = c.F0_norm;

  if (!g1_diverges(c)) {
    out.applicable = false;
    out.note = "integral of g1 over [0, inf) appears finite";
    return out;
  }
  if (F0 == 0.0) {
    out.reachable = true;
    out.reach = 0.0;
    out.T_finite = 0.0;
    out.error_bound = [](double) { return 0.0; };
    out.residual_bound = [](double) { return 0.0; };
    out.note = "u0 already solves the equation";
    return out;
  }

  switch (out.regime) {
    case WellPosedRegime::a_eq_2: {
      if (c.g1_const && c.g2_const) {
        const double c1 = *c.g1_const;
        const double c2 = *c.g2_const;
        out.reach = F0 * c2 / c1;
        out.error_bound = [=](double t) { return F0 * c2 / c1 * std::exp(-c1 * t); };
        out.residual_bound = [=](double t) { return F0 * std::exp(-c1 * t); };
      } else {
        const WellPosedCert cc = c;
        const ScalarFn G = [cc](double t) { return cc.g2(t) * std::exp(-g1_integral(cc, t)); };
        const TailIntegral tail = integrate_to_infinity(G, 0.0, 1e-10);
        if (!tail.converged) {
          out.applicable = false;
          out.note = "integral of G = g2 exp(-int g1) does not converge";
          return out;
        }
        out.reach = F0 * tail.value;
        out.error_bound = [G, F0](double t) { return F0 * integrate_to_infinity(G, t, 1e-10).value; };
        out.residual_bound = [cc, F0](double t) { return F0 * std::exp(-g1_integral(cc, t)); };
      }
      break;
    }
    case WellPosedRegime::a_lt_2: {
      const double p = 2.0 - c.a;
      const double target = std::pow(F0, p) / p;
      double T = 0.0;
      if (c.g1_const) {
        T = target / *c.g1_const;
      } else {
        double hi = 1.0;
        while (g1_integral(c, hi) < target) {
          hi *= 2.0;
          if (hi > 1e12) {
            out.applicable = false;
            out.note = "no finite T solves int_0^T g1 = ||F0||^{2-a}/(2-a)";
            return out;
          }
        }
        const WellPosedCert cc = c;
        T = bisect_increasing([cc, target](double x) { return g1_integral(cc, x) - target; }, 0.0, hi);
      }
      out.T_finite = T;
      const double g2_int = c.g2_const ? *c.g2_const * T : adaptive_simpson(c.g2, 0.0, T, 1e-12, 1e-12);
      out.reach = F0 * g2_int;
      const WellPosedCert cc = c;
      const ScalarFn phi = [cc, F0, p](double s) {
        const double base = std::pow(F0, p) - p * g1_integral(cc, s);
        return base > 0.0 ? std::pow(base, 1.0 / p) : 0.0;
      };
      out.residual_bound = phi;
      out.error_bound = [cc, phi, T](double t) {
        if (t >= T) return 0.0;
        const ScalarFn f = [&](double s) { return cc.g2(s) * phi(s); };
        return adaptive_simpson(f, t, T, 1e-12, 1e-12);
      };
      break;
    }
    case WellPosedRegime::a_gt_2: {
      const double q = c.a - 2.0;
      const WellPosedCert cc = c;
      const ScalarFn h = [cc, F0, q](double t) {
        return std::pow(std::pow(F0, -q) + q * g1_integral(cc, t), -1.0 / q);
      };
      out.residual_bound = h;
      if (c.g1_const && c.g2_const) {
        // int c2 (A + B t)^{-p} dt with A = F0^{2-a}, B = (a-2) c1, p = 1/(a-2)
        const double A = std::pow(F0, -q);
        const double B = q * *c.g1_const;
        const double p = 1.0 / q;
        const double c2 = *c.g2_const;
        if (!(p > 1.0)) {
          out.applicable = false;
          out.reach = kInf;
          out.note = "integral of g2 h diverges (a >= 3 with constant g1, g2)";
          return out;
        }
        out.reach = c2 * std::pow(A, 1.0 - p) / (B * (p - 1.0));
        out.error_bound = [=](double t) { return c2 * std::pow(A + B * t, 1.0 - p) / (B * (p - 1.0)); };
      } else {
        const ScalarFn f = [cc, h](double t) { return cc.g2(t) * h(t); };
        const TailIntegral tail = integrate_to_infinity(f, 0.0, 1e-10);
        if (!tail.converged) {
          out.applicable = false;
          out.note = "integral of g2 h does not converge";
          return out;
        }
        out.reach = tail.value;
        out.error_bound = [f](double t) { return integrate_to_infinity(f, t, 1e-10).value; };
      }
      break;
    }
  }
  out.reachable = out.reach <= c.R;
  return out;
}

FlowConstants wellposed_constants(Method m, const OperatorProblem& p) {
  auto need_m1 = [&]() {
    if (!p.m1) throw UsageError("wellposed_constants: problem '" + p.name + "' has no m1 bound");
    return *p.m1;
  };
  FlowConstants k;
  k.R = p.radius;
  switch (m) {
    case Method::newton:
      k.c1 = 1.0;
      k.c2 = need_m1();
      break;
    case Method::simple: {
      const auto it = p.notes.find("min_sym_derivative");
      if (it == p.notes.end() || !(it->second > 0.0)) {
        throw UsageError("wellposed_constants: simple flow needs a positive lower derivative bound");
      }
      k.c1 = it->second;
      k.c2 = 1.0;
      break;
    }
    case Method::gradient: {
      const double m1 = need_m1();
      k.c1 = 1.0 / (m1 * m1);
      k.c2 = p.M1;
      break;
    }
    case Method::gauss_newton: {
      const double m1 = need_m1();
      k.c1 = 1.0;
      k.c2 = m1 * m1 * p.M1;
      break;
    }
    case Method::modified_newton: {
      const Matrix inv = p.jacobian(p.u0).inverse();
      const double m0 = spectral_norm(inv);
      if (!std::isfinite(m0)) throw UsageError("wellposed_constants: F'(u0) is singular");
      k.c1 = 0.5;
      k.c2 = m0;
      if (p.M2 > 0.0) k.R = std::min(p.radius, 1.0 / (2.0 * p.M2 * m0));
      break;
    }
    case Method::descent:
      k.c1 = 0.5;
      k.c2 = 0.5 * need_m1();
      break;
    default:
      throw UsageError("wellposed_constants: '" + std::string(method_tag(m)) +
                       "' is not a well-posed flow");
  }
  return k;
}

WellPosedResult wellposed_flow_certificate(Method m, const OperatorProblem& p) {
  const FlowConstants k = wellposed_constants(m, p);
  const double F0 = residual(p, p.u0).norm();
  return wellposed_certificate(WellPosedCert::constants(2.0, k.c1, k.c2, F0, k.R));
}

double coupled_rate(double g0, double c0) {
  if (g0 < 0.0 || c0 < 0.0) throw UsageError("coupled_rate: g0 and c0 must be >= 0");
  if (!(g0 * c0 < 1.0)) throw CertificateInapplicable("coupled_rate: g0 * c0 >= 1");
  return g0 / (1.0 - g0 * c0);
}

double coupled_sup_factor(double c, double gamma) {
  if (!(c > 0.0) || !(gamma > 0.0)) throw UsageError("coupled_sup_factor: rates must be positive");
  if (std::abs(c - gamma) <= 1e-12 * std::max(c, gamma)) return 1.0 / (std::exp(1.0) * gamma);
  const double t_star = std::log(c / gamma) / (c - gamma);
  return (std::exp(-gamma * t_star) - std::exp(-c * t_star)) / (c - gamma);
}

}  // namespace dsm
