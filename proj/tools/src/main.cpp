#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dynamical systems method solver for operator equations"};
  app.require_subcommand(1);

  std::string config;
  std::vector<double> deltas;

  auto* run = app.add_subcommand("run", "integrate a configured experiment");
  run->add_option("config", config, "experiment JSON")->required();

  auto* sweep = app.add_subcommand("sweep-delta", "noise-level sweep with stopping rule");
  sweep->add_option("config", config, "experiment JSON")->required();
  sweep->add_option("--deltas", deltas, "comma-separated noise levels")->delimiter(',')->required();

  auto* certify = app.add_subcommand("certify", "check a bound certificate");
  certify->add_option("config", config, "certificate JSON")->required();

  app.add_subcommand("list", "list problems, methods, stop rules and steppers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dsm::cli::kConfig;
  }

  using namespace dsm::cli;
  if (run->parsed()) return guarded(std::cerr, [&] { return cmd_run(config, std::cout); });
  if (sweep->parsed()) {
    return guarded(std::cerr, [&] { return cmd_sweep_delta(config, deltas, std::cout); });
  }
  if (certify->parsed()) return guarded(std::cerr, [&] { return cmd_certify(config, std::cout); });
  return cmd_list(std::cout);
}
