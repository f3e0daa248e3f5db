#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "dsm/errors.hpp"

namespace dsm::cli {

enum ExitCode : int { kOk = 0, kConfig = 2, kSolver = 3, kCertificate = 4 };

int cmd_run(const std::string& config_path, std::ostream& log);
int cmd_sweep_delta(const std::string& config_path, const std::vector<double>& deltas,
                    std::ostream& log);
int cmd_certify(const std::string& config_path, std::ostream& log);
int cmd_list(std::ostream& out);

/// Runs `body`, mapping exceptions onto the exit-code contract.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const UsageError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const NoRootError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const InconsistencyError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolver;
  }
  return kConfig;
}

}  // namespace dsm::cli
