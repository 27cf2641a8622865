// Runs every primary acceptance criterion and prints one PASS/FAIL line each.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "msm/scenarios.hpp"
#include "msm/solver.hpp"
#include "oracles/riemann_exact.hpp"
#include "support/dam_break.hpp"

using namespace msm;

namespace {

double deg(double d) { return d * std::numbers::pi / 180.0; }

RheologyParams bagnold_params() { return find_preset("analytic-bagnold")->rheology; }
RheologyParams experiment_params() { return find_preset("experiments-2010")->rheology; }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, a, b, c, d);
  return buffer;
}

// ------------------------------------------------------------------ uniform flow

SolverConfig steady_config() {
  SolverConfig c;
  c.t_end = 1e4;
  c.closure.regularization.mode = Regularization::Mode::Delta;
  c.closure.regularization.delta = 1e-6;
  c.boundary = {Boundary::Open, Boundary::Open};
  c.stop_on_quiescence = false;
  return c;
}

SteadyFlowResult steady(double theta, std::size_t layers) {
  return run_steady_uniform_flow(1.0, theta, bagnold_params(), LayerPartition::uniform(layers), steady_config(), 4, 1.0,
                                 1e-6);
}

Outcome analytical_accuracy() {
  const UniformFlowSpec spec{1.0, 0.43, bagnold_params()};
  std::vector<double> errors;
  double slowest = 0.0;
  std::string detail = "errors";
  for (std::size_t n : {5u, 10u, 20u, 50u}) {
    const auto start = std::chrono::steady_clock::now();
    const auto flow = steady(0.43, n);
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (!flow.converged) return {false, "N = " + std::to_string(n) + " did not reach a steady state"};
    errors.push_back(relative_error(flow.velocities, layer_average_bagnold(spec, LayerPartition::uniform(n))));
    detail += fmt(" N=%.0f:%.3e", static_cast<double>(n), errors.back());
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < errors.size(); ++k) decreasing = decreasing && errors[k] < errors[k - 1];
  detail += fmt("; slowest N %.2f s", slowest);
  return {errors[2] < 0.10 && decreasing && slowest < 60.0, detail};
}

Outcome rheology_identity() {
  const std::size_t n = 20;
  const auto part = LayerPartition::uniform(n);
  const auto flow = steady(0.43, n);
  if (!flow.converged) return {false, "no steady state"};
  const RheologyParams r = bagnold_params();
  Environment env;
  env.theta = 0.43;
  ClosureOptions options;
  options.regularization = steady_config().closure.regularization;
  const auto fields = interface_fields(flow.state, part, env, r, options);
  const std::size_t i = flow.state.cells() / 2;
  double worst = 0.0;
  for (std::size_t a = 1; a < n; ++a) {
    const double mu = friction_coefficient(inertial_number(fields.shear(i, a), fields.pressure(i, a), r), r);
    worst = std::max(worst, std::abs(mu / std::tan(0.43) - 1.0));
  }
  return {worst <= 0.05, fmt("max |mu(I)/tan(theta) - 1| = %.3e over interior interfaces", worst)};
}

Outcome slope_threshold() {
  const RheologyParams r = bagnold_params();
  std::vector<double> thetas{0.20, 0.30, 0.34, std::atan(r.mu_s), 0.36, 0.40, 0.43, 0.50, 0.55};
  bool ok = true;
  std::string detail;
  for (double theta : thetas) {
    const auto flow = steady(theta, 20);
    const double u_top = flow.velocities.back();
    const bool flowing = std::tan(theta) > r.mu_s && std::tan(theta) < r.mu_2;
    ok = ok && flow.converged && (flowing ? u_top > 0.0 : u_top == 0.0);
    detail += fmt("%.3f:%.3g ", theta, u_top);
  }
  return {ok, "theta:u_surface " + detail};
}

// ---------------------------------------------------------------------- collapse

struct CollapseRun {
  DepositDiagnostics deposit;
  double worst_step_mass = 0.0;
  double run_mass = 0.0;
  double energy0 = 0.0;
  double energy_final = 0.0;
  double energy_increases = 0.0;
  std::vector<double> stop_times;   // last time each layer moved at the station
  std::vector<double> midflow;      // station profile at t_f / 2
  bool quiescent = false;
};

struct CollapseCase {
  double theta_deg;
  double h_i;
  std::size_t layers;
  FrictionMode friction = FrictionMode::MuOfI;
  std::size_t nx = 700;
  double x_max = 1.5;
  double station = -1.0;  // x of the velocity-profile station; negative for none
};

class Watcher : public RunObserver {
 public:
  Watcher(const Solver& solver, const CollapseCase& c, CollapseRun& out)
      : solver_(solver), case_(c), out_(out), monitor_(c.h_i, solver.config().u_stop) {}

  void on_start(const GridState& s) override {
    monitor_.on_start(s);
    mass0_ = mass_ = s.mass();
    out_.energy0 = energy_ = solver_.energy(s);
    if (case_.station >= 0.0) {
      cell_ = static_cast<std::size_t>((case_.station - (s.x(0) - 0.5 * s.dx())) / s.dx());
      out_.stop_times.assign(s.layers(), 0.0);
    }
    history_.clear();
  }

  void on_step(const GridState& s, const StepReport& r) override {
    monitor_.on_step(s, r);
    out_.worst_step_mass = std::max(out_.worst_step_mass, std::abs(r.mass - mass_) / mass_);
    mass_ = r.mass;
    out_.energy_increases += std::max(0.0, r.energy - energy_);
    energy_ = r.energy;
    if (case_.station >= 0.0) {
      for (std::size_t a = 1; a <= s.layers(); ++a) {
        if (s.u(cell_, a) != 0.0) out_.stop_times[a - 1] = r.time;
      }
      const auto column = s.column(cell_);
      history_.push_back({r.time, std::vector<double>(column.begin(), column.end())});
    }
  }

  void on_finish(const GridState& s, const RunSummary& summary) override {
    monitor_.on_finish(s, summary);
    out_.deposit = monitor_.diagnostics();
    out_.quiescent = summary.status == RunSummary::Status::Quiescent;
    out_.run_mass = std::abs(s.mass() - mass0_) / mass0_;
    out_.energy_final = solver_.energy(monitor_.deposit());
    if (case_.station >= 0.0 && !history_.empty()) {
      const double half = 0.5 * out_.deposit.t_f;
      const auto it = std::find_if(history_.begin(), history_.end(), [half](const auto& e) { return e.first >= half; });
      out_.midflow = (it == history_.end() ? history_.back() : *it).second;
    }
  }

 private:
  const Solver& solver_;
  CollapseCase case_;
  CollapseRun& out_;
  DepositMonitor monitor_;
  double mass0_ = 0.0;
  double mass_ = 0.0;
  double energy_ = 0.0;
  std::size_t cell_ = 0;
  std::vector<std::pair<double, std::vector<double>>> history_;
};

std::vector<CollapseRun> g_all_runs;

CollapseRun run_collapse(const CollapseCase& c) {
  const auto part = LayerPartition::uniform(c.layers);
  Environment env;
  env.theta = deg(c.theta_deg);
  SolverConfig config;
  config.t_end = 20.0;
  config.boundary = {Boundary::Wall, Boundary::Wall};
  config.closure.friction = c.friction;
  const Solver solver(part, env, experiment_params(), config);
  CollapseSpec spec;
  spec.theta = env.theta;
  spec.h_i = c.h_i;
  spec.x_max = c.x_max;
  CollapseRun out;
  Watcher watcher(solver, c, out);
  solver.run(collapse_initial(spec, c.nx, part), &watcher);
  g_all_runs.push_back(out);
  return out;
}

std::vector<CollapseRun> bed_series(double theta_deg, std::vector<double> beds, std::size_t layers, FrictionMode mode,
                                    std::size_t nx = 700, double x_max = 1.5) {
  std::vector<CollapseRun> out;
  for (double h_i : beds) out.push_back(run_collapse({theta_deg, h_i, layers, mode, nx, x_max}));
  return out;
}

std::string runouts(const std::vector<CollapseRun>& runs) {
  std::string s;
  for (const auto& r : runs) s += fmt("%.4f ", r.deposit.r_f);
  return s;
}

bool all_settled(const std::vector<CollapseRun>& runs) {
  return std::all_of(runs.begin(), runs.end(), [](const CollapseRun& r) { return r.quiescent && !r.deposit.censored; });
}

// ------------------------------------------------------------------- oracles

Outcome well_balancing() {
  const auto part = LayerPartition::uniform(4);
  SolverConfig config;
  config.t_end = 1e9;
  config.stop_on_quiescence = false;
  const Solver solver(part, Environment{}, bagnold_params(), config);
  GridState s(64, 4, 0.0, 0.015625);
  for (std::size_t i = 0; i < 64; ++i) {
    s.z_b(i) = (i >= 20 && i < 40) ? 0.25 * static_cast<double>((i - 20) % 5) : 0.0;
    s.h(i) = 1.0 - s.z_b(i);
  }
  const GridState initial = s;
  for (int k = 0; k < 10000; ++k) s = solver.step(s).first;
  double worst = 0.0;
  for (std::size_t i = 0; i < 64; ++i) {
    worst = std::max(worst, std::abs(s.h(i) - initial.h(i)));
    for (double u : s.column(i)) worst = std::max(worst, std::abs(u));
  }
  return {worst <= 1e-14, fmt("max deviation after 1e4 steps %.3e", worst)};
}

Outcome riemann_oracle() {
  const support::DamBreak problem;
  const double coarse = support::dam_break_l1_error(problem, 200);
  const double fine = support::dam_break_l1_error(problem, 400);
  const double ratio = coarse / fine;
  return {ratio >= 1.6 && ratio <= 2.4, fmt("L1 error %.4e -> %.4e, ratio %.3f", coarse, fine, ratio)};
}

Outcome exchange_oracle() {
  const auto part = LayerPartition::uniform(2);
  const double rho = 1550.0;
  const double h = 1.0;
  const double dt = 0.01;
  const double eta = 800.0;
  const double nu = eta / (0.5 * h);
  const double a = rho * 0.5 * h / dt;
  std::vector<double> u{0.0, 1.0};
  const double visc[] = {0.0, eta, 0.0};
  const double transfer[] = {0.0, 0.0, 0.0};
  solve_column(u, h, part, Environment{}, visc, transfer, rho, dt);
  // [[a + nu, -nu], [-nu, a + nu]] u* = [0, a]
  const double det = (a + nu) * (a + nu) - nu * nu;
  const double u1 = nu * a / det;
  const double u2 = (a + nu) * a / det;
  const double error = std::max(std::abs(u[0] - u1), std::abs(u[1] - u2));
  const double momentum = std::abs(0.5 * (u[0] + u[1]) - 0.5);
  return {error <= 1e-12 && momentum <= 1e-12,
          fmt("max |u - u_hand| = %.2e, momentum drift %.2e", error, momentum)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&failures](const char* name, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s %-28s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), seconds);
    std::fflush(stdout);
  };

  report("analytical-accuracy", analytical_accuracy);
  report("rheology-identity", rheology_identity);
  report("slope-threshold", slope_threshold);
  report("well-balancing", well_balancing);
  report("riemann-first-order", riemann_oracle);
  report("exchange-2x2-oracle", exchange_oracle);

  std::vector<CollapseRun> multilayer22;
  report("erodible-bed-trend", [&] {
    multilayer22 = bed_series(22.0, experiment_bed_thicknesses(22.0), 20, FrictionMode::MuOfI);
    const double r0 = multilayer22[0].deposit.r_f;
    const double r2 = multilayer22[2].deposit.r_f;
    const bool increasing = r0 < multilayer22[1].deposit.r_f && multilayer22[1].deposit.r_f < r2;
    const double gain = (r2 - r0) / r0;
    return Outcome{all_settled(multilayer22) && increasing && gain >= 0.01 && gain <= 0.30,
                   "r_f " + runouts(multilayer22) + fmt("gain %.2f%%", 100.0 * gain)};
  });

  report("stopping-time-trend", [&] {
    if (multilayer22.size() != 3) return Outcome{false, "multilayer runs unavailable"};
    const double t0 = multilayer22[0].deposit.t_f;
    const double t1 = multilayer22[1].deposit.t_f;
    const double t2 = multilayer22[2].deposit.t_f;
    return Outcome{t0 < t1 && t1 < t2, fmt("t_f %.4f %.4f %.4f", t0, t1, t2)};
  });

  report("constant-friction-anti-trend", [&] {
    bool ok = true;
    std::string detail;
    for (double theta : {16.0, 19.0, 22.0}) {
      const auto runs = bed_series(theta, experiment_bed_thicknesses(theta), 20, FrictionMode::Constant, 1500, 3.5);
      for (std::size_t k = 1; k < runs.size(); ++k) ok = ok && runs[k].deposit.r_f <= runs[k - 1].deposit.r_f;
      ok = ok && all_settled(runs);
      detail += fmt("%.0f deg: ", theta) + runouts(runs) + "; ";
    }
    return Outcome{ok, "r_f " + detail};
  });

  report("monolayer-contrast", [&] {
    const auto mono = bed_series(19.0, experiment_bed_thicknesses(19.0), 1, FrictionMode::MuOfI);
    bool non_increasing = all_settled(mono);
    for (std::size_t k = 1; k < mono.size(); ++k) non_increasing = non_increasing && mono[k].deposit.r_f <= mono[k - 1].deposit.r_f;
    const bool multi_increasing = multilayer22.size() == 3 && multilayer22[0].deposit.r_f < multilayer22[1].deposit.r_f &&
                                  multilayer22[1].deposit.r_f < multilayer22[2].deposit.r_f;
    return Outcome{non_increasing && multi_increasing,
                   "N=1 19 deg r_f " + runouts(mono) + "; N=20 22 deg r_f " + runouts(multilayer22)};
  });

  report("velocity-profile", [&] {
    const CollapseRun run = run_collapse({22.0, 1.82e-3, 20, FrictionMode::MuOfI, 700, 1.5, 0.095});
    const auto& u = run.midflow;
    if (u.empty()) return Outcome{false, "station never sampled"};
    bool monotone = true;
    for (std::size_t a = 1; a < u.size(); ++a) monotone = monotone && u[a] >= u[a - 1];
    const bool slip = u.front() > 0.0 && u.back() > u.front();
    bool ordered = true;
    for (std::size_t a = 1; a < run.stop_times.size(); ++a) ordered = ordered && run.stop_times[a] >= run.stop_times[a - 1];
    const bool lower_first = run.stop_times.front() < run.stop_times.back();
    return Outcome{monotone && slip && ordered && lower_first,
                   fmt("x = 0.095 m at t_f/2: u_1 %.4f, u_N %.4f; layer stop times %.3f (bottom) .. %.3f (top)",
                       u.front(), u.back(), run.stop_times.front(), run.stop_times.back())};
  });

  report("energy-dissipation", [&] {
    bool ok = true;
    std::string detail;
    for (double h_i : {0.0, 2.5e-3}) {
      const CollapseRun run = run_collapse({0.0, h_i, 20, FrictionMode::MuOfI});
      const double budget = 1e-3 * std::abs(run.energy0);
      ok = ok && run.quiescent && run.energy_final <= run.energy0 && run.energy_increases <= budget;
      detail += fmt("h_i %.4f: E0 %.5g, E(t_f) %.5g, sum of increases %.3e; ", h_i, run.energy0, run.energy_final,
                    run.energy_increases);
    }
    return Outcome{ok, detail};
  });

  report("mass-conservation", [&] {
    double step = 0.0;
    double total = 0.0;
    for (const auto& r : g_all_runs) {
      step = std::max(step, r.worst_step_mass);
      total = std::max(total, r.run_mass);
    }
    return Outcome{!g_all_runs.empty() && step <= 1e-12 && total <= 1e-9,
                   fmt("%.0f collapse runs: worst per-step %.2e, worst per-run %.2e",
                       static_cast<double>(g_all_runs.size()), step, total)};
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
