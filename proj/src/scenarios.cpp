#include "msm/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace msm {

bool UniformFlowSpec::flowing() const noexcept {
  const double t = std::tan(theta);
  return t > rheology.mu_s && t < rheology.mu_2;
}

void UniformFlowSpec::validate() const {
  if (!(H > 0.0)) throw std::invalid_argument("H: must be positive");
  rheology.validate();
  if (!flowing()) throw std::domain_error("theta: tan(theta) must lie in (mu_s, mu_2) for a steady flowing solution");
}

namespace {

double bagnold_amplitude(const UniformFlowSpec& spec) {
  const RheologyParams& r = spec.rheology;
  const double t = std::tan(spec.theta);
  const double k = (t - r.mu_s) / (r.mu_2 - t);
  return 2.0 / (3.0 * r.d_s) * r.I0 * k * std::sqrt(r.phi_s * kGravity * std::cos(spec.theta));
}

}  // namespace

BagnoldPoint bagnold_profile(double z, const UniformFlowSpec& spec) {
  spec.validate();
  if (!(z >= 0.0 && z <= spec.H)) throw std::domain_error("bagnold_profile: z must lie in [0, H]");
  const double depth = spec.H - z;
  const double rho_g = spec.rheology.rho() * kGravity;
  BagnoldPoint out;
  out.u = bagnold_amplitude(spec) * (std::pow(spec.H, 1.5) - std::pow(depth, 1.5));
  out.p = rho_g * std::cos(spec.theta) * depth;
  out.tau = rho_g * std::sin(spec.theta) * depth;
  return out;
}

std::vector<double> layer_average_bagnold(const UniformFlowSpec& spec, const LayerPartition& partition) {
  spec.validate();
  const double amplitude = bagnold_amplitude(spec);
  const double H = spec.H;
  std::vector<double> out(partition.size());
  for (std::size_t a = 1; a <= partition.size(); ++a) {
    const double bottom = partition.cumulative(a - 1) * H;
    const double top = partition.cumulative(a) * H;
    const double integral = (std::pow(H - bottom, 2.5) - std::pow(H - top, 2.5)) / (2.5 * (top - bottom));
    out[a - 1] = amplitude * (std::pow(H, 1.5) - integral);
  }
  return out;
}

double relative_error(std::span<const double> u_sim, std::span<const double> u_ref) {
  if (u_sim.size() != u_ref.size()) throw std::invalid_argument("relative_error: lengths differ");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < u_ref.size(); ++k) {
    const double d = u_ref[k] - u_sim[k];
    num += d * d;
    den += u_ref[k] * u_ref[k];
  }
  if (den == 0.0) throw std::invalid_argument("relative_error: reference is identically zero");
  return std::sqrt(num / den);
}

SteadyFlowResult run_steady_uniform_flow(double H, double theta, const RheologyParams& rheology,
                                         const LayerPartition& partition, SolverConfig config,
                                         std::size_t cells, double dx, double tolerance) {
  if (!(H > 0.0)) throw std::invalid_argument("H: must be positive");
  if (!(tolerance > 0.0)) throw std::invalid_argument("steady_tolerance: must be positive");
  config.stop_on_quiescence = false;
  Environment env;
  env.theta = theta;
  const Solver solver(partition, env, rheology, config);

  SteadyFlowResult out;
  out.state = GridState(cells, partition.size(), 0.0, dx);
  for (std::size_t i = 0; i < cells; ++i) out.state.h(i) = H;

  while (out.state.time() < config.t_end && out.steps < config.max_steps) {
    auto [next, report] = solver.step(out.state);
    double change = 0.0;
    const auto before = out.state.velocities();
    const auto after = next.velocities();
    for (std::size_t k = 0; k < before.size(); ++k) change = std::max(change, std::abs(after[k] - before[k]));
    out.state = std::move(next);
    ++out.steps;
    if (change / report.dt < tolerance) {
      out.converged = true;
      break;
    }
  }
  const auto column = out.state.column(cells / 2);
  out.velocities.assign(column.begin(), column.end());
  return out;
}

void CollapseSpec::validate() const {
  if (!(h0 > 0.0)) throw std::invalid_argument("h0: must be positive");
  if (!(r0 > 0.0)) throw std::invalid_argument("r0: must be positive");
  if (!(h_i >= 0.0)) throw std::invalid_argument("h_i: must be >= 0");
  if (!(theta >= 0.0 && theta < std::numbers::pi / 2)) throw std::invalid_argument("theta: must lie in [0, pi/2)");
  if (!(x_min <= -r0)) throw std::invalid_argument("x_min: domain must reach -r0");
  if (!(x_max > 0.0)) throw std::invalid_argument("x_max: domain must extend past the gate");
}

GridState collapse_initial(const CollapseSpec& spec, std::size_t nx, const LayerPartition& partition) {
  spec.validate();
  if (nx == 0) throw std::invalid_argument("nx: must be >= 1");
  const double dx = (spec.x_max - spec.x_min) / static_cast<double>(nx);
  GridState state(nx, partition.size(), spec.x_min, dx);
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = state.x(i);
    state.h(i) = spec.h_i + ((x >= -spec.r0 && x <= 0.0) ? spec.h0 : 0.0);
  }
  return state;
}

double front_position(const GridState& state, double h_i, double h_front) {
  for (std::size_t i = state.cells(); i-- > 0;) {
    if (state.h(i) - h_i > h_front) return state.x(i) + 0.5 * state.dx();
  }
  return 0.0;
}

namespace {

DepositDiagnostics measure(const GridState& state, double h_i, double h_front, bool censored) {
  DepositDiagnostics d;
  d.r_f = std::max(0.0, front_position(state, h_i, h_front));
  d.t_f = state.time();
  const auto h = state.thickness();
  d.h_f = h.empty() ? 0.0 : *std::max_element(h.begin(), h.end());
  d.censored = censored;
  return d;
}

}  // namespace

DepositMonitor::DepositMonitor(double h_i, double u_stop, double h_front)
    : h_i_(h_i), u_stop_(u_stop), h_front_(h_front) {}

void DepositMonitor::observe(const GridState& state, double max_speed) {
  if (max_speed < u_stop_) {
    if (!quiet_) candidate_ = state;
    quiet_ = true;
  } else {
    quiet_ = false;
  }
}

void DepositMonitor::on_start(const GridState& state) {
  quiet_ = false;
  observe(state, state.max_speed());
}

void DepositMonitor::on_step(const GridState& state, const StepReport& report) {
  observe(state, report.max_speed);
}

void DepositMonitor::on_finish(const GridState& state, const RunSummary& summary) {
  if (quiet_ && summary.status == RunSummary::Status::Quiescent) {
    deposit_ = candidate_;
    diagnostics_ = measure(candidate_, h_i_, h_front_, false);
  } else {
    deposit_ = state;
    diagnostics_ = measure(state, h_i_, h_front_, true);
  }
}

DepositDiagnostics deposit_diagnostics(std::span<const GridState> history, double h_i, double u_stop,
                                       double h_front) {
  if (history.empty()) throw std::invalid_argument("deposit_diagnostics: empty history");
  std::size_t first_quiet = history.size();
  for (std::size_t k = history.size(); k-- > 0;) {
    if (history[k].max_speed() >= u_stop) break;
    first_quiet = k;
  }
  if (first_quiet == history.size()) return measure(history.back(), h_i, h_front, true);
  return measure(history[first_quiet], h_i, h_front, false);
}

namespace {

double deg(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

std::optional<Preset> find_preset(std::string_view name) {
  if (name == "experiments-2010") {
    return Preset{"experiments-2010",
                  RheologyParams{std::tan(deg(25.5)), 0.74, 0.279, 7e-4, 2500.0, 0.62},
                  std::nullopt};
  }
  if (name == "analytic-bagnold") {
    return Preset{"analytic-bagnold", RheologyParams{0.363, 0.74, 0.279, 0.04, 2500.0, 0.62}, 0.43};
  }
  return std::nullopt;
}

std::vector<std::string> preset_names() { return {"experiments-2010", "analytic-bagnold"}; }

std::vector<double> experiment_slopes_deg() { return {0.0, 10.0, 16.0, 19.0, 22.0, 23.7}; }

std::vector<double> experiment_bed_thicknesses(double theta_deg) {
  if (theta_deg == 16.0) return {1.4e-3, 2.5e-3, 5e-3};
  if (theta_deg == 19.0) return {1.5e-3, 2.7e-3, 5.3e-3};
  if (theta_deg == 22.0) return {1.82e-3, 3.38e-3, 4.6e-3};
  if (theta_deg == 23.7 || theta_deg == 0.0 || theta_deg == 10.0) return {1.5e-3, 2.5e-3, 5e-3};
  throw std::invalid_argument("theta: no bed thicknesses for this slope");
}

}  // namespace msm
