#include "msm/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <ostream>

#include "msm/csv.hpp"
#include "msm/multilayer_core.hpp"
#include "msm/scenarios.hpp"

namespace msm {

namespace fs = std::filesystem;

namespace {

void write_echo(const fs::path& dir, const RunConfig& config) {
  std::ofstream out(dir / "config.ini", std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + (dir / "config.ini").string());
  out << echo_config(config);
}

fs::path prepare_directory(const std::string& directory) {
  fs::path dir(directory);
  fs::create_directories(dir);
  return dir;
}

// Compact number for directory names.
std::string short_number(double v) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, v);
  return {buffer, result.ptr};
}

double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

// ---------------------------------------------------------------- uniform flow

struct SteadyRun {
  std::vector<double> velocities;
  double seconds = 0.0;
};

SteadyRun steady_run(const RunConfig& c, double theta, std::size_t layers) {
  const auto start = std::chrono::steady_clock::now();
  const SteadyFlowResult result = run_steady_uniform_flow(c.uniform.H, theta, c.rheology, LayerPartition::uniform(layers),
                                                          c.solver, c.nx, c.uniform.dx, c.uniform.steady_tolerance);
  if (!result.converged) {
    throw SolverError("uniform flow did not reach a steady state before t_end (theta = " + format_number(theta) +
                      ", N = " + std::to_string(layers) + ")");
  }
  SteadyRun out;
  out.velocities = result.velocities;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// --------------------------------------------------------------------- collapse

// Streams every collapse output while the solver runs.
class CollapseRecorder : public RunObserver {
 public:
  CollapseRecorder(const fs::path& dir, const Solver& solver, double h_i, const OutputSettings& output,
                   bool full_output)
      : solver_(solver), output_(output), monitor_(h_i, solver.config().u_stop), h_i_(h_i),
        diagnostics_(dir / "diagnostics.csv", {"t", "x_front", "max_speed", "mass", "energy"}) {
    if (full_output) {
      std::vector<std::string> header = {"t", "x", "h"};
      for (std::size_t a = 1; a <= solver.partition().size(); ++a) header.push_back("u_" + std::to_string(a));
      snapshots_ = std::make_unique<CsvWriter>(dir / "snapshots.csv", header);
      profiles_ = std::make_unique<CsvWriter>(
          dir / "w_profiles.csv",
          std::vector<std::string>{"t", "x", "layer_index", "z_bottom", "z_top", "u", "w_bottom", "w_top"});
    }
  }

  void on_start(const GridState& state) override {
    monitor_.on_start(state);
    diagnostics_.row({state.time(), front_position(state, h_i_), state.max_speed(), state.mass(),
                      solver_.energy(state)});
    sample(state);
  }

  void on_step(const GridState& state, const StepReport& report) override {
    monitor_.on_step(state, report);
    diagnostics_.row({report.time, front_position(state, h_i_), report.max_speed, report.mass, report.energy});
    sample(state);
  }

  void on_finish(const GridState& state, const RunSummary& summary) override {
    monitor_.on_finish(state, summary);
    if (snapshots_ && last_snapshot_ != state.time()) write_snapshot(state);
    diagnostics_.flush();
  }

  [[nodiscard]] const DepositMonitor& monitor() const noexcept { return monitor_; }

 private:
  void sample(const GridState& state) {
    if (!snapshots_) return;
    const double t = state.time();
    if (t >= next_snapshot_) {
      write_snapshot(state);
      while (next_snapshot_ <= t) next_snapshot_ += output_.snapshot_interval;
    }
    if (t >= next_profile_) {
      write_profiles(state);
      while (next_profile_ <= t) next_profile_ += output_.w_interval;
    }
  }

  void write_snapshot(const GridState& state) {
    std::vector<CsvWriter::Cell> row;
    for (std::size_t i = 0; i < state.cells(); ++i) {
      row.assign({state.time(), state.x(i), state.h(i)});
      for (double u : state.column(i)) row.emplace_back(u);
      snapshots_->row(row);
    }
    last_snapshot_ = state.time();
  }

  void write_profiles(const GridState& state) {
    const LayerPartition& partition = solver_.partition();
    const VerticalVelocity w = vertical_velocity(state, partition, solver_.environment());
    const double x0 = state.x(0) - 0.5 * state.dx();
    for (double station : output_.w_stations) {
      const double offset = (station - x0) / state.dx();
      if (offset < 0.0 || offset >= static_cast<double>(state.cells())) continue;
      const auto i = static_cast<std::size_t>(offset);
      const double h = state.h(i);
      for (std::size_t a = 1; a <= partition.size(); ++a) {
        profiles_->row({state.time(), state.x(i), a, partition.cumulative(a - 1) * h, partition.cumulative(a) * h,
                        state.u(i, a), w.at_bottom(i, a), w.at_top(i, a)});
      }
    }
  }

  const Solver& solver_;
  const OutputSettings& output_;
  DepositMonitor monitor_;
  double h_i_;
  CsvWriter diagnostics_;
  std::unique_ptr<CsvWriter> snapshots_;
  std::unique_ptr<CsvWriter> profiles_;
  double next_snapshot_ = 0.0;
  double next_profile_ = 0.0;
  double last_snapshot_ = -1.0;
};

struct CollapseOutcome {
  DepositDiagnostics diagnostics;
  std::string status;  // ok, censored, step-limit or failed
  std::string message;
};

CollapseOutcome run_collapse(const RunConfig& c, const CollapseSpec& spec, const SolverConfig& solver_config,
                             std::size_t layers, const fs::path& dir, bool full_output) {
  const LayerPartition partition = LayerPartition::uniform(layers);
  Environment env;
  env.theta = spec.theta;
  const Solver solver(partition, env, c.rheology, solver_config);
  const GridState initial = collapse_initial(spec, c.nx, partition);

  CollapseOutcome outcome;
  CollapseRecorder recorder(dir, solver, spec.h_i, c.output, full_output);
  try {
    solver.run(initial, &recorder);
    outcome.diagnostics = recorder.monitor().diagnostics();
    outcome.status = outcome.diagnostics.censored ? "censored" : "ok";
  } catch (const StepLimitExceeded& e) {
    outcome.diagnostics = recorder.monitor().diagnostics();
    outcome.status = "step-limit";
    outcome.message = e.what();
  } catch (const SolverError& e) {
    outcome.diagnostics.censored = true;
    outcome.status = "failed";
    outcome.message = e.what();
    return outcome;
  }

  CsvWriter deposit(dir / "deposit.csv", {"x", "h"});
  const GridState& final_state = recorder.monitor().deposit();
  for (std::size_t i = 0; i < final_state.cells(); ++i) deposit.row({final_state.x(i), final_state.h(i)});

  CsvWriter summary(dir / "summary.csv", {"r_f", "t_f", "h_f", "censored"});
  const DepositDiagnostics& d = outcome.diagnostics;
  summary.row({d.r_f, d.t_f, d.h_f, std::string(d.censored ? "true" : "false")});
  return outcome;
}

int status_code(const CollapseOutcome& outcome) {
  if (outcome.status == "ok") return kExitOk;
  if (outcome.status == "censored") return kExitValidationFailed;
  return kExitRuntimeError;
}

}  // namespace

int cmd_uniform_flow(const RunConfig& c, std::ostream& log) {
  const UniformFlowSpec spec{c.uniform.H, c.uniform.theta, c.rheology};
  if (!spec.flowing()) {
    log << "uniform-flow: tan(theta) = " << format_number(std::tan(spec.theta))
        << " is outside (mu_s, mu_2); there is no steady flowing solution\n";
    return kExitConfigError;
  }
  const fs::path dir = prepare_directory(c.output.directory);
  write_echo(dir, c);

  try {
    CsvWriter errors(dir / "error.csv", {"N", "relative_error", "wall_time_s"});
    double main_error = 0.0;
    for (std::size_t n : c.uniform.layer_counts) {
      const LayerPartition partition = LayerPartition::uniform(n);
      const SteadyRun run = steady_run(c, spec.theta, n);
      const std::vector<double> exact = layer_average_bagnold(spec, partition);
      const double error = relative_error(run.velocities, exact);
      errors.row({n, error, run.seconds});
      log << "N = " << n << ": relative error " << format_number(error) << '\n';
      if (n != c.layers) continue;
      main_error = error;

      CsvWriter profile(dir / "profile.csv", {"layer_index", "z_mid", "u_sim", "u_exact", "p_exact", "tau_exact"});
      for (std::size_t a = 1; a <= n; ++a) {
        const double z_mid = 0.5 * (partition.cumulative(a - 1) + partition.cumulative(a)) * spec.H;
        const BagnoldPoint point = bagnold_profile(z_mid, spec);
        profile.row({a, z_mid, run.velocities[a - 1], exact[a - 1], point.p, point.tau});
      }
    }

    CsvWriter surface(dir / "surface_velocity_vs_theta.csv", {"theta", "u_surface", "u_surface_exact"});
    for (double theta : c.uniform.theta_grid) {
      const SteadyRun run = steady_run(c, theta, c.layers);
      const UniformFlowSpec at{spec.H, theta, c.rheology};
      const double exact = at.flowing() ? bagnold_profile(spec.H, at).u : 0.0;
      surface.row({theta, run.velocities.back(), exact});
    }

    const bool pass = main_error < c.uniform.error_bound;
    log << "uniform-flow: N = " << c.layers << " relative error " << format_number(main_error)
        << (pass ? " < " : " >= ") << "bound " << format_number(c.uniform.error_bound) << '\n';
    return pass ? kExitOk : kExitValidationFailed;
  } catch (const SolverError& e) {
    log << "uniform-flow: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

int cmd_collapse(const RunConfig& c, std::ostream& log) {
  const fs::path dir = prepare_directory(c.output.directory);
  write_echo(dir, c);
  const CollapseOutcome outcome = run_collapse(c, c.collapse, c.solver, c.layers, dir, true);
  const DepositDiagnostics& d = outcome.diagnostics;
  log << "collapse: r_f = " << format_number(d.r_f) << " m, t_f = " << format_number(d.t_f)
      << " s, h_f = " << format_number(d.h_f) << " m (" << outcome.status << ")\n";
  if (!outcome.message.empty()) log << "collapse: " << outcome.message << '\n';
  return status_code(outcome);
}

int cmd_sweep(const RunConfig& c, std::ostream& log) {
  const fs::path dir = prepare_directory(c.output.directory);
  write_echo(dir, c);

  CsvWriter table(dir / "runout_vs_hi.csv",
                  {"theta", "h_i", "friction_mode", "layers", "shear_order", "r_f", "t_f", "h_f", "r_f_over_h0",
                   "t_f_over_tau_c", "status"});
  int worst = kExitOk;
  for (double theta_deg : c.sweep.thetas_deg) {
    const std::vector<double> beds =
        c.sweep.experiment_beds ? experiment_bed_thicknesses(theta_deg) : c.sweep.bed_thicknesses;
    for (FrictionMode mode : c.sweep.friction_modes) {
      for (std::size_t layers : c.sweep.layer_counts) {
        for (ShearOrder order : c.sweep.shear_orders) {
          for (double h_i : beds) {
            CollapseSpec spec = c.collapse;
            spec.theta = to_radians(theta_deg);
            spec.h_i = h_i;
            SolverConfig solver = c.solver;
            solver.closure.friction = mode;
            solver.closure.shear_order = order;
            const std::string order_text = order == ShearOrder::First ? "1" : "2";
            const fs::path sub = dir / ("theta" + short_number(theta_deg) + "_hi" + short_number(h_i) + "_" +
                                        std::string(friction_name(mode)) + "_N" + std::to_string(layers) +
                                        "_order" + order_text);
            fs::create_directories(sub);

            const CollapseOutcome outcome = run_collapse(c, spec, solver, layers, sub, false);
            const DepositDiagnostics& d = outcome.diagnostics;
            const double tau_c = std::sqrt(spec.h0 / (kGravity * std::cos(spec.theta)));
            table.row({theta_deg, h_i, std::string(friction_name(mode)), layers, order_text, d.r_f, d.t_f, d.h_f,
                       d.r_f / spec.h0, d.t_f / tau_c, outcome.status});
            table.flush();
            log << "sweep: theta " << short_number(theta_deg) << " deg, h_i " << short_number(h_i) << " m, "
                << friction_name(mode) << ", N " << layers << ", order " << order_text << ": r_f "
                << format_number(d.r_f) << " m (" << outcome.status << ")\n";
            worst = std::max(worst, status_code(outcome));
          }
        }
      }
    }
  }
  return worst;
}

int run_command(const RunConfig& config, std::ostream& log) {
  switch (config.command) {
    case Command::UniformFlow: return cmd_uniform_flow(config, log);
    case Command::Collapse: return cmd_collapse(config, log);
    case Command::Sweep: return cmd_sweep(config, log);
  }
  return kExitConfigError;
}

}  // namespace msm
