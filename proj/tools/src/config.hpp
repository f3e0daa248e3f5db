#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "dsm/bound_certificates.hpp"
#include "dsm/flow_integrator.hpp"
#include "dsm/operator_model.hpp"
#include "dsm/phi_fields.hpp"
#include "dsm/schedules.hpp"
#include "dsm/stopping_rules.hpp"

namespace dsm::cli {

/// Malformed or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NoiseConfig {
  double delta = 0.0;
  std::uint64_t seed = 0;
};

/// A parsed experiment. `resolved` is the input document with every default
/// filled in; it is echoed into run artifacts for replay.
struct ExperimentConfig {
  nlohmann::json resolved;
  OperatorProblem problem;
  Method method = Method::newton;
  std::optional<EpsilonSchedule> schedule;
  StepperSpec stepper;
  std::optional<StopCondition> stop;
  std::optional<NoiseConfig> noise;
  std::optional<Vector> u_tilde0;
  double q0_perturbation = 0.0;  // coupled flow: Q0 = (1 + p) F'(u0)^{-1}
  std::string output = "dsm_out";
  std::uint64_t seed = 0;
};

/// Reads and parses a JSON file; syntax errors carry line:column. The raw
/// text is returned through `text_out` for error anchoring.
nlohmann::json load_json(const std::string& path, std::string* text_out = nullptr);

ExperimentConfig parse_experiment(const nlohmann::json& doc, const std::string& source_text = {});

/// Output directory after applying the DSM_OUT override.
std::string output_dir(const ExperimentConfig& cfg);

}  // namespace dsm::cli
