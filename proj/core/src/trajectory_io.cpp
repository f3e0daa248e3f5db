#include "dsm/trajectory_io.hpp"

#include <charconv>
#include <cmath>

#include "json.hpp"

namespace dsm {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log) {
  const bool coupled = !log.lambda_defects.empty();
  os << "t,res_norm,eps,err_norm";
  if (coupled) os << ",lambda_defect";
  os << '\n';
  for (std::size_t i = 0; i < log.size(); ++i) {
    os << format_double(log.times[i]) << ',' << format_double(log.residual_norms[i]) << ','
       << format_double(log.eps_values[i]) << ',';
    if (log.has_errors()) os << format_double(log.error_norms[i]);
    if (coupled) os << ',' << format_double(log.lambda_defects[i]);
    os << '\n';
  }
}

std::string trajectory_summary_json(const TrajectoryLog& log, const RunMetadata& meta) {
  auto num = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    return format_double(x);
  };
  nlohmann::json j;
  j["problem"] = meta.problem;
  j["method"] = meta.method;
  j["schedule"] = meta.schedule;
  j["stepper"] = meta.stepper;
  j["seed"] = meta.seed;
  j["counters"] = {{"vdot", log.vdot_counter}, {"solves", log.solve_counter},
                   {"ball_exits", log.ball_exits}, {"states", log.size()}};
  j["termination"] = std::string(termination_tag(log.termination));
  if (!log.message.empty()) j["message"] = log.message;
  if (!log.empty()) {
    j["final"] = {{"t", num(log.final_time())}, {"res_norm", num(log.residual_norms.back())},
                  {"eps", num(log.eps_values.back())}};
    if (log.has_errors()) j["final"]["err_norm"] = num(log.error_norms.back());
    if (!log.lambda_defects.empty()) j["final"]["lambda_defect"] = num(log.lambda_defects.back());
  }
  return j.dump(2);
}

}  // namespace dsm
