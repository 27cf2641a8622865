#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msm/grid_state.hpp"
#include "msm/layers.hpp"
#include "msm/rheology.hpp"
#include "msm/solver.hpp"

namespace msm {

/// Steady uniform flow of depth H down a plane of slope theta.
struct UniformFlowSpec {
  double H = 1.0;
  double theta = 0.0;
  RheologyParams rheology{};

  /// tan(theta) strictly between mu_s and mu_2.
  [[nodiscard]] bool flowing() const noexcept;
  /// Throws std::invalid_argument for H <= 0, std::domain_error outside the flowing regime.
  void validate() const;
};

struct BagnoldPoint {
  double u = 0.0;    ///< downslope velocity [m/s]
  double p = 0.0;    ///< pressure [Pa]
  double tau = 0.0;  ///< shear stress [Pa]
};

/// Closed-form steady profile at height z in [0, H].
/// u = (2 / (3 d_s)) I0 k sqrt(phi_s g cos(theta)) (H^{3/2} - (H - z)^{3/2}),
/// k = (tan(theta) - mu_s) / (mu_2 - tan(theta)).
BagnoldPoint bagnold_profile(double z, const UniformFlowSpec& spec);

/// Exact average of the steady profile over each layer of the partition.
std::vector<double> layer_average_bagnold(const UniformFlowSpec& spec, const LayerPartition& partition);

/// sqrt(sum (ref - sim)^2 / sum ref^2). Throws for unequal lengths or an all-zero reference.
double relative_error(std::span<const double> u_sim, std::span<const double> u_ref);

struct SteadyFlowResult {
  GridState state;
  std::vector<double> velocities;  ///< layer velocities of the middle column
  bool converged = false;
  std::size_t steps = 0;
};

/// Integrates a uniform layer of depth H from rest on `cells` cells of width dx
/// until the largest velocity change rate falls below `tolerance` [m/s^2]
/// or the time reaches config.t_end. Static slopes converge after one step.
SteadyFlowResult run_steady_uniform_flow(double H, double theta, const RheologyParams& rheology,
                                         const LayerPartition& partition, SolverConfig config,
                                         std::size_t cells, double dx, double tolerance);

/// Granular column of height h0 and length r0 behind a gate at x = 0, on a bed of thickness h_i.
struct CollapseSpec {
  double h0 = 0.14;
  double r0 = 0.2;
  double h_i = 0.0;
  double theta = 0.0;
  double x_min = -0.25;  ///< upslope end of the domain [m]
  double x_max = 1.5;    ///< downslope end of the domain [m]

  void validate() const;

  friend bool operator==(const CollapseSpec&, const CollapseSpec&) = default;
};

/// h = h_i + h0 on cells whose centre lies in [-r0, 0], h_i elsewhere; u = 0, z_b = 0.
/// Throws std::invalid_argument when the mesh does not reach x = -r0.
GridState collapse_initial(const CollapseSpec& spec, std::size_t nx, const LayerPartition& partition);

inline constexpr double kFrontThreshold = 1e-4;

/// Right face of the furthest cell with h - h_i > h_front, or 0 if there is none.
double front_position(const GridState& state, double h_i, double h_front = kFrontThreshold);

struct DepositDiagnostics {
  double r_f = 0.0;  ///< runout from the gate [m]
  double t_f = 0.0;  ///< stopping time [s]
  double h_f = 0.0;  ///< maximum final thickness [m]
  bool censored = false;  ///< true when the flow never came to rest
};

/// Streaming deposit measurement: tracks the state at the start of the
/// current quiet streak, so no history has to be stored.
class DepositMonitor : public RunObserver {
 public:
  DepositMonitor(double h_i, double u_stop, double h_front = kFrontThreshold);

  void on_start(const GridState& state) override;
  void on_step(const GridState& state, const StepReport& report) override;
  void on_finish(const GridState& state, const RunSummary& summary) override;

  /// Diagnostics of the run; valid after on_finish.
  [[nodiscard]] const DepositDiagnostics& diagnostics() const noexcept { return diagnostics_; }
  /// Thickness at t_f (or at the final time if censored).
  [[nodiscard]] const GridState& deposit() const noexcept { return deposit_; }

 private:
  void observe(const GridState& state, double max_speed);

  double h_i_;
  double u_stop_;
  double h_front_;
  bool quiet_ = false;
  GridState candidate_;
  GridState deposit_;
  DepositDiagnostics diagnostics_;
};

/// Batch form over a state history (oldest first). Censored when the last state still moves.
DepositDiagnostics deposit_diagnostics(std::span<const GridState> history, double h_i, double u_stop,
                                       double h_front = kFrontThreshold);

/// Named parameter sets shipped with the program.
struct Preset {
  std::string name;
  RheologyParams rheology;
  std::optional<double> theta;  ///< slope of the reference case, if the preset fixes one [rad]
};

/// "experiments-2010" and "analytic-bagnold".
std::optional<Preset> find_preset(std::string_view name);
std::vector<std::string> preset_names();

/// Slopes of the laboratory campaign [deg].
std::vector<double> experiment_slopes_deg();

/// Bed thicknesses [m] used at a campaign slope [deg]; throws for an unknown slope.
std::vector<double> experiment_bed_thicknesses(double theta_deg);

}  // namespace msm
