// Command-line driver: spectrum | synthesize | simulate | verify.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "modalstab/errors.hpp"
#include "modalstab/pipeline.hpp"
#include "modalstab/run_config.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> output;
  std::optional<std::string> mode;
  std::optional<std::string> shape;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
};

modalstab::RunConfig resolve(const Overrides& o) {
  modalstab::RunConfig c;
  if (!o.config_path.empty()) c = modalstab::load_config(o.config_path);
  if (o.shape) modalstab::apply_setting(c, "domain.shape", *o.shape);
  if (o.output) modalstab::apply_setting(c, "output_dir", *o.output);
  if (o.mode) modalstab::apply_setting(c, "mode", *o.mode);
  if (o.seed) c.seed = *o.seed;
  if (o.grid) c.grid = *o.grid;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modal boundary stabilization of the heat equation on a disk or ball"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config_path, "Run configuration file (key = value)");
    cmd->add_option("--output", o.output, "Output directory");
    cmd->add_option("--mode", o.mode, "closed_loop or open_loop");
    cmd->add_option("--shape", o.shape, "disk or ball");
    cmd->add_option("--seed", o.seed, "Seed of the random initial polynomial");
    cmd->add_option("--grid", o.grid, "Grid points per axis for the max norm");
  };
  CLI::App* spectrum = app.add_subcommand("spectrum", "Mode table and unstable count");
  CLI::App* synthesize = app.add_subcommand("synthesize", "Controller gains and Hurwitz margins");
  CLI::App* simulate = app.add_subcommand("simulate", "Trajectory, norm series and snapshots");
  CLI::App* verify = app.add_subcommand("verify", "Decay claims and consistency checks");
  for (CLI::App* cmd : {spectrum, synthesize, simulate, verify}) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : modalstab::kExitBadInput;
  }

  modalstab::RunConfig config;
  try {
    config = resolve(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return modalstab::exit_code_for(e);
  }

  if (*spectrum) return modalstab::run_spectrum(config, std::cout);
  if (*synthesize) return modalstab::run_synthesize(config, std::cout);
  if (*simulate) return modalstab::run_simulate(config, std::cout);
  return modalstab::run_verify(config, std::cout);
}
