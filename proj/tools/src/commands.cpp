#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "dsm/bound_certificates.hpp"
#include "dsm/flow_integrator.hpp"
#include "dsm/problem_zoo.hpp"
#include "dsm/regularized_path.hpp"
#include "dsm/rng.hpp"
#include "dsm/stopping_rules.hpp"
#include "dsm/trajectory_io.hpp"

namespace dsm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LoadedConfig {
  json doc;
  ExperimentConfig cfg;
  fs::path out;
};

LoadedConfig load(const std::string& path) {
  std::string text;
  LoadedConfig lc;
  lc.doc = load_json(path, &text);
  lc.cfg = parse_experiment(lc.doc, text);
  lc.out = output_dir(lc.cfg);
  fs::create_directories(lc.out);
  return lc;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json num(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write '" + file.string() + "'");
  out << text;
}

RunMetadata metadata(const ExperimentConfig& cfg) {
  RunMetadata m;
  m.problem = cfg.problem.name;
  m.method = std::string(method_tag(cfg.method));
  m.schedule = cfg.schedule ? cfg.schedule->describe() : "none";
  m.stepper = std::string(stepper_tag(cfg.stepper.kind));
  m.seed = cfg.seed;
  return m;
}

/// One integration of the configured flow against `noisy` data (delta may
/// be 0). Stops according to cfg.stop; `t_stop` receives the closed-form
/// stopping time when the rule has one.
struct RunOutcome {
  TrajectoryLog log;
  double t_stop = kInf;
  json notes = json::array();
  std::optional<std::string> failure;
};

RunOutcome run_flow(const ExperimentConfig& cfg, const NoisyProblem& noisy) {
  RunOutcome r;
  StepperSpec spec = cfg.stepper;
  StopFn stop;

  if (cfg.stop) {
    StopCondition rule = *cfg.stop;
    rule.delta = noisy.delta;
    if (is_time_root(rule.kind) || rule.kind == StopKind::minimization) {
      if (!cfg.schedule) throw ConfigError("stop rule '" + std::string(stop_kind_tag(rule.kind)) +
                                           "' needs an epsilon schedule");
      r.t_stop = stopping_time(rule, *cfg.schedule);
      if (std::isinf(r.t_stop)) {
        r.notes.push_back("exact data: no stopping time, integrating to t_max");
      } else if (r.t_stop == 0.0) {
        r.notes.push_back("eps(0) already below the stopping target: stop immediately");
        stop = [](double, const Vector&) { return true; };
      } else {
        spec.t_max = r.t_stop;
      }
    } else if (rule.kind == StopKind::discrepancy) {
      stop = residual_stop(noisy.base, noisy.f_delta, rule.C * noisy.delta);
    } else {
      stop = residual_stop(noisy.base, noisy.f_delta, rule.threshold);
    }
  }

  try {
    if (cfg.method == Method::coupled_inversion_free) {
      if (noisy.delta != 0.0) throw ConfigError("coupled_inversion_free runs on exact data only");
      const Matrix q0 = (1.0 + cfg.q0_perturbation) * cfg.problem.jacobian(cfg.problem.u0).inverse();
      if (!q0.allFinite()) throw ConfigError("coupled_inversion_free: F'(u0) is singular");
      r.log = integrate_coupled(CoupledField(cfg.problem, q0), cfg.problem.u0, q0, spec, stop);
    } else {
      const PhiField phi = make_phi(noisy, cfg.method, cfg.schedule, cfg.u_tilde0);
      r.log = integrate(phi, cfg.problem.u0, spec, stop);
    }
  } catch (const IntegrationError& e) {
    r.log = e.partial();
    r.failure = e.what();
  }
  if (cfg.stop && cfg.stop->kind == StopKind::discrepancy && r.log.termination != Termination::stopped) {
    r.notes.push_back("discrepancy principle did not fire before t_max");
  }
  return r;
}

NoisyProblem data_for(const ExperimentConfig& cfg) {
  if (cfg.noise) return add_noise(cfg.problem, cfg.noise->delta, cfg.noise->seed);
  return add_noise(cfg.problem, 0.0, cfg.seed);
}

json certify_report_json(const CertificateReport& rep) {
  json j;
  j["applicable"] = rep.applicable;
  j["conditions_ok"] = rep.conditions_ok;
  j["violated"] = rep.violated;
  j["max_slack"] = num(rep.max_slack);
  j["first_violation_t"] = rep.first_violation_t ? json(*rep.first_violation_t) : json(nullptr);
  j["points_checked"] = rep.points_checked;
  if (!rep.note.empty()) j["note"] = rep.note;
  return j;
}

double get(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw ConfigError(std::string("certificate: '") + key + "' must be a number");
  return obj.at(key).get<double>();
}

Matrix matrix_of(const json& v, const char* key) {
  if (!v.contains(key)) throw ConfigError(std::string("certificate: missing '") + key + "'");
  const json& m = v.at(key);
  if (!m.is_array() || m.empty()) throw ConfigError(std::string("certificate: '") + key + "' must be a matrix");
  Matrix out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m[0].size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].size() != m[0].size()) throw ConfigError(std::string("certificate: ragged '") + key + "'");
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j].get<double>();
    }
  }
  return out;
}

}  // namespace

int cmd_run(const std::string& config_path, std::ostream& log) {
  const LoadedConfig lc = load(config_path);
  const ExperimentConfig& cfg = lc.cfg;
  const RunOutcome r = run_flow(cfg, data_for(cfg));

  std::ostringstream csv;
  write_trajectory_csv(csv, r.log);
  write_text(lc.out / "trajectory.csv", csv.str());

  json run = json::parse(trajectory_summary_json(r.log, metadata(cfg)));
  run["config"] = cfg.resolved;
  run["timestamp"] = timestamp();
  run["notes"] = r.notes;
  run["t_stop"] = num(r.t_stop);
  run["status"] = r.failure ? "solver_error" : "ok";
  if (r.failure) run["error"] = *r.failure;
  write_text(lc.out / "run.json", run.dump(2) + "\n");

  if (r.failure) {
    std::cerr << "solver error: " << *r.failure << " (partial trajectory written)\n";
    return kSolver;
  }
  log << "run finished: " << r.log.size() << " states, final t = " << format_double(r.log.final_time())
      << ", ||F|| = " << format_double(r.log.residual_norms.back()) << '\n';
  return kOk;
}

int cmd_sweep_delta(const std::string& config_path, const std::vector<double>& deltas, std::ostream& log) {
  const LoadedConfig lc = load(config_path);
  const ExperimentConfig& cfg = lc.cfg;
  if (!cfg.problem.y_known) throw ConfigError("sweep-delta needs a problem with a known solution");
  if (deltas.empty()) throw ConfigError("sweep-delta needs at least one delta");

  std::ostringstream csv;
  csv << "delta,t_delta,err\n";
  json rows = json::array();
  const Rng root(cfg.seed);
  int status = kOk;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double delta = deltas[i];
    if (!(delta >= 0.0)) throw ConfigError("deltas must be >= 0");
    const NoisyProblem noisy = add_noise(cfg.problem, delta, root.split(i + 1).seed());
    const RunOutcome r = run_flow(cfg, noisy);
    if (r.failure) {
      std::cerr << "solver error at delta = " << format_double(delta) << ": " << *r.failure << '\n';
      status = kSolver;
    }
    const double err = (r.log.final_state() - *cfg.problem.y_known).norm();
    csv << format_double(delta) << ',' << format_double(r.t_stop) << ',' << format_double(err) << '\n';
    rows.push_back({{"delta", delta}, {"t_delta", num(r.t_stop)}, {"t_end", r.log.final_time()},
                    {"err", err}, {"notes", r.notes}});
  }
  write_text(lc.out / "sweep.csv", csv.str());
  json meta;
  meta["config"] = cfg.resolved;
  meta["deltas"] = deltas;
  meta["rows"] = rows;
  meta["timestamp"] = timestamp();
  write_text(lc.out / "sweep.json", meta.dump(2) + "\n");
  log << "sweep finished: " << deltas.size() << " rows\n";
  return status;
}

int cmd_certify(const std::string& config_path, std::ostream& log) {
  std::string text;
  const json doc = load_json(config_path, &text);
  if (!doc.contains("certificate")) throw ConfigError("certify needs a \"certificate\" object");
  const json& c = doc.at("certificate");
  const std::string kind = c.value("kind", "");
  CompareOptions opt;
  opt.bound_scale = get(c, "bound_scale", 1.0);
  const double t_max = get(c, "t_max", 20.0);

  json out;
  out["kind"] = kind;
  CertificateReport rep;
  bool have_report = true;

  if (kind == "riccati") {
    const double gamma = get(c, "gamma", 1.0);
    const double sigma = get(c, "sigma", 0.0);
    const double beta = get(c, "beta", 0.0);
    const double mu = get(c, "mu", 1.0);
    RiccatiData d;
    d.gamma = [gamma](double) { return gamma; };
    d.gamma_const = gamma;
    d.sigma = [sigma](double) { return sigma; };
    d.beta = [beta](double) { return beta; };
    d.mu = [mu](double) { return mu; };
    d.mu_dot = [](double) { return 0.0; };
    d.g0 = get(c, "g0", 0.0);
    d.t0 = get(c, "t0", 0.0);
    rep = riccati_compare(d, t_max, opt);
  } else if (kind == "riccati_regularized") {
    double M = get(c, "M", 0.0);
    double r = get(c, "r", 0.0);
    double g0 = get(c, "g0", 0.0);
    const double b = get(c, "b", 0.5);
    if (doc.contains("problem")) {
      const ExperimentConfig cfg = parse_experiment(doc, text);
      const OperatorProblem& p = cfg.problem;
      if (!p.y_known) throw ConfigError("riccati_regularized needs a problem with known y");
      M = p.M2;
      r = p.y_known->norm() + p.u0.norm();
      const EpsilonSchedule s = theorem42_schedule(M, r, b);
      const Vector v0 = solve_V(p, s.eval(0.0), Vector::Zero(p.dim));
      g0 = (p.u0 - v0).norm();
      out["problem"] = p.name;
    }
    if (!(M > 0.0) || !(r > 0.0)) throw ConfigError("riccati_regularized needs positive M and r");
    out["M"] = M;
    out["r"] = r;
    out["g0"] = g0;
    rep = riccati_compare(regularization_riccati(theorem42_schedule(M, r, b), M, r, g0), t_max, opt);
  } else if (kind == "gronwall") {
    const Matrix T = matrix_of(c, "T");
    const Matrix G = matrix_of(c, "G");
    const Matrix Q0 = matrix_of(c, "Q0");
    if (T.rows() != T.cols() || G.rows() != T.rows() || Q0.rows() != T.rows() ||
        G.cols() != T.cols() || Q0.cols() != T.cols()) {
      throw ConfigError("gronwall: T, G, Q0 must be square of equal size");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (T + T.transpose()));
    const double eps = es.eigenvalues()(0);
    if (!(eps > 0.0)) {
      rep.applicable = false;
      rep.conditions_ok = false;
      rep.note = "T is not coercive";
    } else {
      GronwallData d{[T](double) { return T; }, [G](double) { return G; }, Q0,
                     [eps](double) { return eps; }};
      rep = gronwall_compare(d, t_max, get(c, "h", 1e-3), opt);
    }
  } else if (kind == "wellposed") {
    have_report = false;
    WellPosedResult res;
    if (c.contains("method")) {
      const ExperimentConfig cfg = parse_experiment(doc, text);
      res = wellposed_flow_certificate(parse_method(c.at("method").get<std::string>()), cfg.problem);
    } else {
      res = wellposed_certificate(WellPosedCert::constants(get(c, "a", 2.0), get(c, "c1", 1.0),
                                                           get(c, "c2", 1.0), get(c, "F0", 0.0),
                                                           get(c, "R", 1.0)));
    }
    out["applicable"] = res.applicable;
    out["conditions_ok"] = res.applicable;
    out["reachable"] = res.reachable;
    out["regime"] = std::string(regime_tag(res.regime));
    out["reach"] = num(res.reach);
    out["T_finite"] = res.T_finite ? json(*res.T_finite) : json(nullptr);
    out["violated"] = false;
    out["max_slack"] = nullptr;
    out["first_violation_t"] = nullptr;
    if (!res.note.empty()) out["note"] = res.note;
  } else {
    throw ConfigError("unknown certificate kind '" + kind + "'");
  }

  if (have_report) out.update(certify_report_json(rep));
  out["config"] = doc;
  out["timestamp"] = timestamp();

  fs::path dir = doc.value("output", std::string("dsm_out"));
  if (const char* env = std::getenv("DSM_OUT"); env && *env) dir = env;
  fs::create_directories(dir);
  write_text(dir / "certify.json", out.dump(2) + "\n");

  if (have_report && rep.violated) {
    log << "certificate violated at t = "
        << (rep.first_violation_t ? format_double(*rep.first_violation_t) : "?") << '\n';
    return kCertificate;
  }
  if (!out.value("applicable", true)) {
    log << "certificate inapplicable: " << out.value("note", std::string("hypotheses fail")) << '\n';
    return kOk;
  }
  log << "certificate holds\n";
  return kOk;
}

int cmd_list(std::ostream& out) {
  out << "problems:\n";
  for (const auto& n : zoo_names()) out << "  " << n << '\n';
  out << "methods:\n";
  for (const auto& m : method_tags()) out << "  " << m << '\n';
  out << "stop rules:\n";
  for (const auto& s : stop_kind_tags()) out << "  " << s << '\n';
  out << "steppers:\n";
  for (auto k : {StepperKind::euler, StepperKind::rk4, StepperKind::rk45_adaptive}) {
    out << "  " << stepper_tag(k) << '\n';
  }
  return kOk;
}

}  // namespace dsm::cli
