#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "dsm/errors.hpp"
#include "dsm/problem_zoo.hpp"
#include "dsm/rng.hpp"

namespace dsm::cli {

namespace {

using nlohmann::json;

/// Finds where a key first appears in the raw text so semantic errors can
/// point at a line, like syntax errors do.
class Anchors {
 public:
  explicit Anchors(const std::string& text) : text_(text) {}

  std::string at(const std::string& key) const {
    if (text_.empty()) return "";
    const std::size_t pos = text_.find("\"" + key + "\"");
    if (pos == std::string::npos) return "";
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return "line " + std::to_string(line) + ":" + std::to_string(col) + ": ";
  }

 private:
  const std::string& text_;
};

[[noreturn]] void fail(const Anchors& a, const std::string& key, const std::string& what) {
  throw ConfigError(a.at(key) + key + ": " + what);
}

double number(const json& obj, const char* key, const Anchors& a) {
  const json& v = obj.at(key);
  if (!v.is_number()) fail(a, key, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const Anchors& a) {
  return obj.contains(key) ? number(obj, key, a) : fallback;
}

std::string string_or(const json& obj, const char* key, const std::string& fallback,
                      const Anchors& a) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) fail(a, key, "expected a string");
  return obj.at(key).get<std::string>();
}

std::uint64_t seed_value(const json& v, const char* key, const Anchors& a) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    fail(a, key, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

Vector vector_from(const json& v, const char* key, const Anchors& a) {
  if (!v.is_array()) fail(a, key, "expected an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(a, key, "expected an array of numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

Matrix matrix_from(const json& v, const char* key, const Anchors& a) {
  if (!v.is_array() || v.empty() || !v[0].is_array()) fail(a, key, "expected an array of rows");
  const std::size_t rows = v.size();
  const std::size_t cols = v[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) fail(a, key, "rows must have equal length");
    for (std::size_t j = 0; j < cols; ++j) {
      if (!v[i][j].is_number()) fail(a, key, "expected numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i][j].get<double>();
    }
  }
  return m;
}

OperatorProblem parse_problem(const json& v, const Anchors& a) {
  if (v.is_string()) return make_zoo_problem(v.get<std::string>());
  if (!v.is_object()) fail(a, "problem", "expected a zoo name or an object");

  if (v.contains("linear")) {
    const json& lin = v.at("linear");
    const Matrix A = matrix_from(lin.at("A"), "A", a);
    const Vector f = vector_from(lin.at("f"), "f", a);
    const Vector u0 = lin.contains("u0") ? vector_from(lin.at("u0"), "u0", a)
                                         : Vector::Zero(A.cols());
    OperatorProblem p = make_linear_problem("inline", A, f, u0, number_or(lin, "radius", 10.0, a));
    try {
      p.y_known = minimal_norm_solution(A, f);
    } catch (const InconsistencyError&) {
      // no reference solution for inconsistent data
    }
    return p;
  }

  if (!v.contains("name")) fail(a, "problem", "object needs \"name\" or \"linear\"");
  OperatorProblem p = make_zoo_problem(v.at("name").get<std::string>());
  if (v.contains("u0")) {
    p.u0 = vector_from(v.at("u0"), "u0", a);
  } else if (v.contains("u0_offset")) {
    // u0 = y + scale * (seeded unit vector)
    const json& off = v.at("u0_offset");
    if (!p.y_known) fail(a, "u0_offset", "problem has no reference solution");
    Rng rng(off.contains("seed") ? seed_value(off.at("seed"), "seed", a) : 0);
    p.u0 = *p.y_known + number(off, "scale", a) * rng.unit_vector(p.dim);
  }
  if (v.contains("radius")) p.radius = number(v, "radius", a);
  p.validate();
  return p;
}

EpsilonSchedule parse_schedule(const json& v, const OperatorProblem& p, const Anchors& a) {
  if (!v.is_object()) fail(a, "schedule", "expected an object");
  const std::string kind = string_or(v, "kind", "power", a);
  if (kind == "power") {
    return EpsilonSchedule::power(number(v, "c1", a), number(v, "c0", a), number(v, "b", a));
  }
  if (kind == "constant") return EpsilonSchedule::constant(number(v, "eps", a));
  if (kind == "from_constants") {
    if (!p.y_known) fail(a, "schedule", "from_constants schedule needs a problem with known y");
    const double r = p.y_known->norm() + p.u0.norm();
    const double M = number_or(v, "M", p.M2, a);
    return theorem42_schedule(M, r, number_or(v, "b", 0.5, a));
  }
  fail(a, "kind", "unknown schedule kind '" + kind + "'");
}

StepperSpec parse_stepper(const json& v, const Anchors& a) {
  StepperSpec s;
  if (!v.is_object()) fail(a, "stepper", "expected an object");
  s.kind = dsm::parse_stepper(string_or(v, "kind", "rk45_adaptive", a));
  s.h = number_or(v, "h", s.h, a);
  s.rtol = number_or(v, "rtol", s.rtol, a);
  s.atol = number_or(v, "atol", s.atol, a);
  s.t_max = number_or(v, "t_max", s.t_max, a);
  s.max_steps = static_cast<long>(number_or(v, "max_steps", static_cast<double>(s.max_steps), a));
  s.validate();
  return s;
}

StopCondition parse_stop(const json& v, const std::optional<NoiseConfig>& noise, const Anchors& a) {
  if (!v.is_object()) fail(a, "stop", "expected an object");
  StopCondition s;
  if (!v.contains("kind")) fail(a, "stop", "missing \"kind\"");
  s.kind = parse_stop_kind(v.at("kind").get<std::string>());
  s.delta = number_or(v, "delta", noise ? noise->delta : 0.0, a);
  s.b_rule = number_or(v, "b_rule", s.b_rule, a);
  s.M = number_or(v, "M", s.M, a);
  s.C = number_or(v, "C", s.C, a);
  s.threshold = number_or(v, "threshold", s.threshold, a);
  s.c = number_or(v, "c", s.c, a);
  s.a = number_or(v, "a", s.a, a);
  s.validate();
  return s;
}

const std::set<std::string> kTopLevel{"problem", "method",  "schedule", "stepper",
                                      "stop",    "noise",   "output",   "seed",
                                      "u_tilde0", "q0_perturbation", "certificate", "deltas"};

}  // namespace

json load_json(const std::string& path, std::string* text_out) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text_out) *text_out = text;
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": JSON syntax error: " + e.what());
  }
}

ExperimentConfig parse_experiment(const json& doc, const std::string& source_text) {
  const Anchors a(source_text);
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& item : doc.items()) {
    if (!kTopLevel.count(item.key())) fail(a, item.key(), "unknown configuration key");
  }

  ExperimentConfig cfg;
  try {
    if (!doc.contains("problem")) throw ConfigError("missing \"problem\"");
    cfg.seed = doc.contains("seed") ? seed_value(doc.at("seed"), "seed", a) : 0;
    try {
      cfg.problem = parse_problem(doc.at("problem"), a);
    } catch (const UsageError& e) {
      fail(a, "problem", e.what());
    }
    try {
      cfg.method = parse_method(string_or(doc, "method", "newton", a));
    } catch (const UsageError& e) {
      fail(a, "method", e.what());
    }
    if (doc.contains("schedule")) cfg.schedule = parse_schedule(doc.at("schedule"), cfg.problem, a);
    cfg.stepper = doc.contains("stepper") ? parse_stepper(doc.at("stepper"), a) : StepperSpec{};
    if (doc.contains("noise")) {
      const json& n = doc.at("noise");
      NoiseConfig nc;
      nc.delta = number(n, "delta", a);
      nc.seed = n.contains("seed") ? seed_value(n.at("seed"), "seed", a) : cfg.seed;
      cfg.noise = nc;
    }
    if (doc.contains("stop")) cfg.stop = parse_stop(doc.at("stop"), cfg.noise, a);
    if (doc.contains("u_tilde0")) cfg.u_tilde0 = vector_from(doc.at("u_tilde0"), "u_tilde0", a);
    cfg.q0_perturbation = number_or(doc, "q0_perturbation", 0.0, a);
    cfg.output = string_or(doc, "output", cfg.output, a);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  } catch (const NoRootError& e) {
    throw ConfigError(e.what());
  } catch (const InconsistencyError& e) {
    throw ConfigError(e.what());
  }

  const bool needs_schedule = !is_wellposed_method(cfg.method) &&
                              cfg.method != Method::coupled_inversion_free;
  if (needs_schedule && !cfg.schedule) {
    fail(a, "method", "'" + std::string(method_tag(cfg.method)) + "' needs a \"schedule\"");
  }

  json resolved = doc;
  resolved["seed"] = cfg.seed;
  resolved["method"] = std::string(method_tag(cfg.method));
  resolved["output"] = cfg.output;
  resolved["stepper"] = {{"kind", std::string(stepper_tag(cfg.stepper.kind))},
                         {"h", cfg.stepper.h},
                         {"rtol", cfg.stepper.rtol},
                         {"atol", cfg.stepper.atol},
                         {"t_max", cfg.stepper.t_max},
                         {"max_steps", cfg.stepper.max_steps}};
  if (cfg.schedule) resolved["schedule_resolved"] = cfg.schedule->describe();
  if (cfg.stop) {
    resolved["stop"] = {{"kind", std::string(stop_kind_tag(cfg.stop->kind))},
                        {"delta", cfg.stop->delta},
                        {"b_rule", cfg.stop->b_rule},
                        {"M", cfg.stop->M},
                        {"C", cfg.stop->C},
                        {"threshold", cfg.stop->threshold},
                        {"c", cfg.stop->c},
                        {"a", cfg.stop->a}};
  }
  resolved["problem_resolved"] = {{"name", cfg.problem.name},
                                  {"dim", cfg.problem.dim},
                                  {"radius", cfg.problem.radius},
                                  {"M1", cfg.problem.M1},
                                  {"M2", cfg.problem.M2}};
  cfg.resolved = std::move(resolved);
  return cfg;
}

std::string output_dir(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("DSM_OUT"); env && *env) return env;
  return cfg.output;
}

}  // namespace dsm::cli
