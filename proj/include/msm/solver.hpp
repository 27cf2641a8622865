#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "msm/execution.hpp"
#include "msm/grid_state.hpp"
#include "msm/layers.hpp"
#include "msm/multilayer_core.hpp"
#include "msm/rheology.hpp"

namespace msm {

/// Boundary treatment for one side of the domain. Open uses zero-order
/// extrapolation ghost cells, Wall mirrors the velocities.
enum class Boundary { Open, Wall };

struct BoundaryConditions {
  Boundary left = Boundary::Open;
  Boundary right = Boundary::Open;

  friend bool operator==(const BoundaryConditions&, const BoundaryConditions&) = default;
};

struct SolverConfig {
  double cfl = 0.5;
  double t_end = 1.0;
  std::size_t max_steps = 10'000'000;
  ClosureOptions closure{};
  bool basal_friction = true;  ///< false only for frictionless oracle runs
  BoundaryConditions boundary{};
  double u_stop = 1e-4;        ///< quiescence speed threshold [m/s]
  std::size_t n_stop = 10;     ///< consecutive quiet steps that end a run
  bool stop_on_quiescence = true;
  Execution execution = Execution::Serial;

  void validate() const;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct StepReport {
  double dt = 0.0;
  double time = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double energy_change = 0.0;  ///< energy after minus energy before the step
  double max_speed = 0.0;
  bool energy_increase_flag = false;
};

/// Raised when a sub-step produces an inadmissible state (negative depth, NaN).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CFL time step cfl * dx / max(|u_alpha| + sqrt(g_n h)) over wet cells, capped at t_end - t.
/// An all-dry state returns t_end - t.
double stable_dt(const GridState& state, const Environment& env, double cfl, double t_end);

struct HyperbolicResult {
  GridState state;               ///< h^{n+1} and provisional layer velocities
  InterfaceArray mass_transfer;  ///< G_{alpha+1/2} consistent with the layer fluxes of the step
};

/// First-order Rusanov step with hydrostatic reconstruction for (h, h u_alpha).
///
/// Advances advection, the hydrostatic pressure gradient and the downslope
/// gravity source. The layer mass fluxes define the interface transfers G
/// returned alongside, so that h_alpha = l_alpha h holds after the exchange.
/// With static_friction > 0 (mu_s), no mass crosses a face between two resting
/// cells whose free-surface slope that friction can hold.
/// Throws SolverError on a negative depth or a non-finite value.
HyperbolicResult hyperbolic_step(const GridState& state, const Environment& env,
                                 const LayerPartition& partition, double dt,
                                 const BoundaryConditions& bc = {},
                                 Execution exec = Execution::Serial, double static_friction = 0.0);

/// Per-column inputs of the semi-implicit exchange: frozen viscosities and transfers.
struct ExchangeCoefficients {
  InterfaceArray viscosity;
  InterfaceArray mass_transfer;
};

/// Basal Coulomb contact applied inside the implicit exchange.
struct BasalContact {
  const RheologyParams* rheology = nullptr;
  FrictionMode friction = FrictionMode::MuOfI;
};

/// Outcome of one column solve.
enum class ColumnState { Dry, Rigid, Stuck, Sliding, Free };

/// Solve one column in place. `u` holds the provisional velocities on entry and
/// the new ones on exit; `viscosity` and `transfer` are indexed by interface 0..N.
///
/// Without `basal` this is the plain semi-implicit exchange:
///   rho l_a h (u*_a - u_a)/dt = K*_{a-1/2} - K*_{a+1/2}
///       + rho G_{a+1/2} (u*_{a+1} + u*_a)/2 - rho G_{a-1/2} (u*_a + u*_{a-1})/2
/// with K*_{a+1/2} = -eta (u*_{a+1} - u*_a)/h_{a+1/2}.
/// With `basal` the bed friction is solved implicitly as a stick/slip contact,
/// and a column whose every interface can hold it at rest is set exactly to rest.
ColumnState solve_column(std::span<double> u, double h, const LayerPartition& partition,
                         const Environment& env, std::span<const double> viscosity,
                         std::span<const double> transfer, double rho, double dt,
                         const BasalContact* basal = nullptr);

/// Semi-implicit inter-layer exchange (viscous coupling and mass-transfer momentum)
/// with frozen coefficients. No bed friction.
GridState exchange_step(const GridState& state, const ExchangeCoefficients& coefficients,
                        const Environment& env, const LayerPartition& partition,
                        const RheologyParams& rheology, double dt,
                        Execution exec = Execution::Serial);

/// Exchange with the bed contact solved inside the implicit system (see solve_column).
GridState exchange_with_friction(const GridState& state, const ExchangeCoefficients& coefficients,
                                 const Environment& env, const LayerPartition& partition,
                                 const RheologyParams& rheology, FrictionMode friction, double dt,
                                 Execution exec = Execution::Serial);

/// Coulomb projection on the bottom layer alone: u_1 is set exactly to 0 when
/// rho l_1 h |u_1| <= dt mu rho g_n h, otherwise |u_1| shrinks by dt mu g_n / l_1.
GridState friction_step(const GridState& state, const Environment& env, const LayerPartition& partition,
                        const RheologyParams& rheology, FrictionMode friction, double dt);

/// Frozen coefficients for the exchange, evaluated on a post-hyperbolic state.
ExchangeCoefficients exchange_coefficients(const GridState& state, const InterfaceArray& mass_transfer,
                                           const LayerPartition& partition, const Environment& env,
                                           const RheologyParams& rheology, const ClosureOptions& closure,
                                           Execution exec = Execution::Serial);

struct RunSummary {
  enum class Status { Completed, Quiescent };
  Status status = Status::Completed;
  std::size_t steps = 0;
  double time = 0.0;
  std::optional<double> quiescent_since;  ///< time of the first step of the final quiet streak
};

/// Receives the state as the run progresses.
class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_start(const GridState&) {}
  virtual void on_step(const GridState&, const StepReport&) {}
  virtual void on_finish(const GridState&, const RunSummary&) {}
};

/// Raised when max_steps is reached; observers have already been given on_finish.
class StepLimitExceeded : public SolverError {
 public:
  StepLimitExceeded(GridState partial, std::size_t steps)
      : SolverError("max_steps exceeded after " + std::to_string(steps) + " steps"),
        partial_(std::move(partial)) {}
  [[nodiscard]] const GridState& partial() const noexcept { return partial_; }

 private:
  GridState partial_;
};

/// The model and its numerics: partition, physics and solver settings.
class Solver {
 public:
  Solver(LayerPartition partition, Environment env, RheologyParams rheology, SolverConfig config);

  [[nodiscard]] const LayerPartition& partition() const noexcept { return partition_; }
  [[nodiscard]] const Environment& environment() const noexcept { return env_; }
  [[nodiscard]] const RheologyParams& rheology() const noexcept { return rheology_; }
  [[nodiscard]] const SolverConfig& config() const noexcept { return config_; }

  /// stable_dt -> hyperbolic_step -> exchange (with bed contact) in one call.
  [[nodiscard]] std::pair<GridState, StepReport> step(const GridState& state) const;

  /// Steps until t_end or quiescence. Deterministic for fixed inputs.
  GridState run(const GridState& initial, RunObserver* observer = nullptr,
                RunSummary* summary = nullptr) const;

  [[nodiscard]] double energy(const GridState& state) const;

 private:
  LayerPartition partition_;
  Environment env_;
  RheologyParams rheology_;
  SolverConfig config_;
};

}  // namespace msm
