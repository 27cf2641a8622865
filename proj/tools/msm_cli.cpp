#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "msm/commands.hpp"
#include "msm/config.hpp"

namespace {

struct Options {
  std::string config_path;
  std::optional<std::size_t> layers;
  std::optional<std::size_t> nx;
  std::optional<double> cfl;
  std::optional<std::string> rheology;
  std::optional<int> shear_order;
  std::optional<std::string> out;
};

void add_options(CLI::App* command, Options& options) {
  command->add_option("--config", options.config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
  command->add_option("--layers", options.layers, "number of layers N")->check(CLI::PositiveNumber);
  command->add_option("--nx", options.nx, "number of cells")->check(CLI::PositiveNumber);
  command->add_option("--cfl", options.cfl, "CFL number in (0, 1]");
  command->add_option("--rheology", options.rheology, "friction law")->check(CLI::IsMember({"mu-i", "constant"}));
  command->add_option("--shear-order", options.shear_order, "shear estimate order")->check(CLI::IsMember({1, 2}));
  command->add_option("--out", options.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilayer shallow model of dry granular flows with the mu(I) rheology"};
  app.require_subcommand(1);
  Options options;
  const std::map<std::string, msm::Command> commands = {{"uniform-flow", msm::Command::UniformFlow},
                                                       {"collapse", msm::Command::Collapse},
                                                       {"sweep", msm::Command::Sweep}};
  std::map<std::string, CLI::App*> subcommands;
  subcommands["uniform-flow"] = app.add_subcommand("uniform-flow", "steady flow down an incline vs the closed form");
  subcommands["collapse"] = app.add_subcommand("collapse", "granular column collapse over an erodible bed");
  subcommands["sweep"] = app.add_subcommand("sweep", "grid of collapse runs (slope, bed thickness, friction, N)");
  for (auto& [name, sub] : subcommands) add_options(sub, options);

  CLI11_PARSE(app, argc, argv);

  msm::Command command = msm::Command::Collapse;
  for (const auto& [name, sub] : subcommands) {
    if (sub->parsed()) command = commands.at(name);
  }

  msm::CliOverrides overrides;
  overrides.layers = options.layers;
  overrides.nx = options.nx;
  overrides.cfl = options.cfl;
  if (options.rheology) {
    overrides.friction = *options.rheology == "mu-i" ? msm::FrictionMode::MuOfI : msm::FrictionMode::Constant;
  }
  if (options.shear_order) {
    overrides.shear_order = *options.shear_order == 1 ? msm::ShearOrder::First : msm::ShearOrder::Second;
  }
  overrides.out = options.out;

  try {
    const msm::RunConfig config = msm::load_config(command, options.config_path, overrides);
    return msm::run_command(config, std::cout);
  } catch (const msm::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return msm::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return msm::kExitRuntimeError;
  }
}
