#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "karst/commands.hpp"

namespace {

karst::RunConfig load_config(const std::string& config_path, const std::string& out_dir,
                             const std::vector<std::string>& overrides) {
  std::string text = "{}";
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw std::invalid_argument("cannot read config file: " + config_path);
    std::ostringstream ss;
    ss << is.rdbuf();
    text = ss.str();
  }
  karst::RunConfig cfg = karst::parse_config(text, overrides);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled matrix/conduit flow solver with residual error estimation"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--set", overrides, "config override, dotted.path=value")->take_all();

  int (*command)(const karst::RunConfig&) = nullptr;
  app.add_subcommand("mesh", "generate a mesh and its diagnostics")
      ->callback([&] { command = karst::cmd_mesh; })
      ->fallthrough();
  app.add_subcommand("solve", "assemble and solve")
      ->callback([&] { command = karst::cmd_solve; })
      ->fallthrough();
  app.add_subcommand("estimate", "solve and compute the error estimator")
      ->callback([&] { command = karst::cmd_estimate; })
      ->fallthrough();
  app.add_subcommand("adapt", "adaptive refinement loop")
      ->callback([&] { command = karst::cmd_adapt; })
      ->fallthrough();
  app.add_subcommand("verify", "property suites and a convergence study")
      ->callback([&] { command = karst::cmd_verify; })
      ->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    const karst::RunConfig cfg = load_config(config_path, out_dir, overrides);
    return command(cfg);
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
