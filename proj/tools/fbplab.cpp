// fbplab: non-uniqueness laboratory for u_t = phi(u)_xx with piecewise-linear,
// nonmonotone phi.
//
//   fbplab [--config FILE] [--out DIR] [--seed-check] counterexample|regularize|inverse

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fbp/errors.hpp"
#include "fbp/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Forward-backward parabolic lab: entropy-solution counterexample, eps-regularization, inverse source"};
  app.fallthrough();
  std::string config_path;
  std::string out_dir;
  bool seed_check = false;
  app.add_option("--config", config_path, "INI scenario file (defaults are used when omitted)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory, overrides [output] dir");
  app.add_flag("--seed-check", seed_check, "run the negative-control suite");

  auto* counterexample = app.add_subcommand("counterexample", "build the family of solutions and verify it");
  auto* regularize = app.add_subcommand("regularize", "pseudoparabolic eps sweep with viscous entropy checks");
  auto* inverse = app.add_subcommand("inverse", "source f from endpoint coefficients [inverse] a, b");
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(fbp::ExitCode::configuration_error);
  }
  if (!seed_check && app.get_subcommands().empty()) {
    std::cerr << app.help();
    return static_cast<int>(fbp::ExitCode::configuration_error);
  }

  try {
    fbp::ScenarioConfig config = config_path.empty() ? fbp::ScenarioConfig::defaults()
                                                     : fbp::ScenarioConfig::load(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;

    int status = 0;
    if (seed_check) status = fbp::cmd_seed_check(config, std::cout);
    if (status != 0) return status;
    if (counterexample->parsed()) return fbp::cmd_counterexample(config, std::cout);
    if (regularize->parsed()) return fbp::cmd_regularize(config, std::cout);
    if (inverse->parsed()) return fbp::cmd_inverse(config, std::cout);
    return status;
  } catch (const fbp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(fbp::ExitCode::configuration_error);
  }
}
