#include "msm/solver.hpp"

#include <cmath>
#include <utility>

namespace msm {

void SolverConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("cfl: must lie in (0, 1]");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end: must be finite and >= 0");
  if (max_steps == 0) throw std::invalid_argument("max_steps: must be >= 1");
  if (!(u_stop > 0.0)) throw std::invalid_argument("u_stop: must be positive");
  if (n_stop == 0) throw std::invalid_argument("n_stop: must be >= 1");
  closure.regularization.validate();
}

Solver::Solver(LayerPartition partition, Environment env, RheologyParams rheology, SolverConfig config)
    : partition_(std::move(partition)), env_(env), rheology_(rheology), config_(config) {
  env_.validate();
  rheology_.validate();
  config_.validate();
}

double Solver::energy(const GridState& state) const {
  return total_energy(state, partition_, env_, rheology_.rho());
}

std::pair<GridState, StepReport> Solver::step(const GridState& state) const {
  if (state.layers() != partition_.size()) throw std::invalid_argument("step: layer count mismatch");
  const double remaining = config_.t_end - state.time();
  const double dt = stable_dt(state, env_, config_.cfl, config_.t_end);
  if (!(dt > 0.0)) throw SolverError("step: no time left before t_end");

  const double static_friction = config_.basal_friction ? rheology_.mu_s : 0.0;
  HyperbolicResult hyp =
      hyperbolic_step(state, env_, partition_, dt, config_.boundary, config_.execution, static_friction);
  const ExchangeCoefficients coefficients = exchange_coefficients(
      hyp.state, hyp.mass_transfer, partition_, env_, rheology_, config_.closure, config_.execution);
  GridState next =
      config_.basal_friction
          ? exchange_with_friction(hyp.state, coefficients, env_, partition_, rheology_,
                                   config_.closure.friction, dt, config_.execution)
          : exchange_step(hyp.state, coefficients, env_, partition_, rheology_, dt, config_.execution);
  if (dt == remaining) next.set_time(config_.t_end);

  StepReport report;
  report.dt = dt;
  report.time = next.time();
  report.mass = next.mass();
  report.energy = energy(next);
  report.energy_change = report.energy - energy(state);
  report.max_speed = next.max_speed();
  report.energy_increase_flag = report.energy_change > 0.0;
  return {std::move(next), report};
}

GridState Solver::run(const GridState& initial, RunObserver* observer, RunSummary* summary) const {
  GridState state = initial;
  RunSummary local;
  RunSummary& out = summary != nullptr ? *summary : local;
  out = RunSummary{};
  if (observer != nullptr) observer->on_start(state);

  std::size_t quiet = 0;
  std::optional<double> quiet_since;
  while (state.time() < config_.t_end) {
    if (out.steps >= config_.max_steps) {
      out.time = state.time();
      if (observer != nullptr) observer->on_finish(state, out);
      throw StepLimitExceeded(state, out.steps);
    }
    auto [next, report] = step(state);
    state = std::move(next);
    ++out.steps;
    if (observer != nullptr) observer->on_step(state, report);

    if (report.max_speed < config_.u_stop) {
      if (quiet == 0) quiet_since = report.time;
      ++quiet;
    } else {
      quiet = 0;
      quiet_since.reset();
    }
    if (config_.stop_on_quiescence && quiet >= config_.n_stop) {
      out.status = RunSummary::Status::Quiescent;
      break;
    }
  }
  out.time = state.time();
  out.quiescent_since = quiet_since;
  if (observer != nullptr) observer->on_finish(state, out);
  return state;
}

}  // namespace msm
