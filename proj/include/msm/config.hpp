#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "msm/multilayer_core.hpp"
#include "msm/rheology.hpp"
#include "msm/scenarios.hpp"
#include "msm/solver.hpp"

namespace msm {

enum class Command { UniformFlow, Collapse, Sweep };

std::string_view command_name(Command command) noexcept;
std::optional<Command> parse_command(std::string_view name) noexcept;

std::string_view friction_name(FrictionMode mode) noexcept;

/// Raised for malformed, unknown, missing or out-of-range configuration entries.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct UniformFlowSettings {
  double H = 1.0;
  double theta = 0.0;  ///< [rad]
  double error_bound = 0.1;
  std::vector<std::size_t> layer_counts;  ///< rows of error.csv; always contains the run's own N
  std::vector<double> theta_grid;         ///< slopes of surface_velocity_vs_theta.csv [rad]
  double steady_tolerance = 1e-6;         ///< [m/s^2]
  double dx = 1.0;                        ///< [m]

  friend bool operator==(const UniformFlowSettings&, const UniformFlowSettings&) = default;
};

struct SweepSettings {
  std::vector<double> thetas_deg;
  bool experiment_beds = true;           ///< use the campaign bed thicknesses of each slope
  std::vector<double> bed_thicknesses;   ///< [m], used when experiment_beds is false
  std::vector<FrictionMode> friction_modes;
  std::vector<std::size_t> layer_counts;
  std::vector<ShearOrder> shear_orders;

  friend bool operator==(const SweepSettings&, const SweepSettings&) = default;
};

struct OutputSettings {
  std::string directory = "output";
  double snapshot_interval = 0.1;   ///< [s]
  std::vector<double> w_stations;   ///< x positions of the velocity profiles [m]
  double w_interval = 0.15;         ///< [s]

  friend bool operator==(const OutputSettings&, const OutputSettings&) = default;
};

/// Fully resolved settings of one CLI invocation.
struct RunConfig {
  Command command = Command::Collapse;
  std::string preset;  ///< empty when every rheology value is given explicitly
  RheologyParams rheology{};
  SolverConfig solver{};
  std::size_t layers = 1;
  std::size_t nx = 1;
  UniformFlowSettings uniform{};
  CollapseSpec collapse{};
  SweepSettings sweep{};
  OutputSettings output{};

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Command-line values that take precedence over the file.
struct CliOverrides {
  std::optional<std::size_t> layers;
  std::optional<std::size_t> nx;
  std::optional<double> cfl;
  std::optional<FrictionMode> friction;
  std::optional<ShearOrder> shear_order;
  std::optional<std::string> out;
};

/// Parses an INI document with sections [rheology], [solver], [scenario], [output].
/// Unknown sections or keys, missing required keys and invalid values throw ConfigError.
RunConfig parse_config(Command command, std::string_view text, const CliOverrides& overrides = {});

RunConfig load_config(Command command, const std::filesystem::path& path, const CliOverrides& overrides = {});

/// INI text listing every effective setting; parse_config(command, echo_config(c)) == c.
std::string echo_config(const RunConfig& config);

}  // namespace msm
