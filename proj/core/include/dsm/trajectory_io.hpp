#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "dsm/flow_integrator.hpp"

namespace dsm {

/// Shortest decimal string that parses back to the same double; "inf",
/// "-inf" and "nan" for non-finite values.
std::string format_double(double x);

/// Columns t,res_norm,eps,err_norm (err_norm empty when the problem has no
/// reference solution), plus lambda_defect for coupled runs.
void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log);

struct RunMetadata {
  std::string problem;
  std::string method;
  std::string schedule;
  std::string stepper;
  std::uint64_t seed = 0;
};

/// Summary as a JSON object text: metadata, counters, termination, final
/// time and norms.
std::string trajectory_summary_json(const TrajectoryLog& log, const RunMetadata& meta);

}  // namespace dsm
