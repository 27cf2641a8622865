#include <algorithm>
#include <cmath>
#include <vector>
#include <string>

#include "msm/solver.hpp"

namespace msm {

namespace {

// Depth below which a negative update is treated as roundoff and clamped.
constexpr double kNegativeDepthTolerance = 1e-12;

struct CellView {
  double h = 0.0;
  double z = 0.0;
  const double* u = nullptr;
  double sign = 1.0;  // -1 for a wall ghost
};

CellView cell_view(const GridState& s, std::ptrdiff_t i, const BoundaryConditions& bc) {
  const auto n = static_cast<std::ptrdiff_t>(s.cells());
  CellView v;
  std::size_t src = 0;
  if (i < 0) {
    src = 0;
    if (bc.left == Boundary::Wall) v.sign = -1.0;
  } else if (i >= n) {
    src = static_cast<std::size_t>(n - 1);
    if (bc.right == Boundary::Wall) v.sign = -1.0;
  } else {
    src = static_cast<std::size_t>(i);
  }
  v.h = s.h(src);
  v.z = s.z_b(src);
  v.u = s.column(src).data();
  return v;
}

double velocity(const CellView& c, std::size_t a) { return c.h >= kDryThreshold ? c.sign * c.u[a] : 0.0; }

bool at_rest(const CellView& c, std::size_t layers) {
  for (std::size_t a = 0; a < layers; ++a) {
    if (velocity(c, a) != 0.0) return false;
  }
  return true;
}

}  // namespace

double stable_dt(const GridState& state, const Environment& env, double cfl, double t_end) {
  const double remaining = std::max(0.0, t_end - state.time());
  const double gn = env.g_normal();
  double speed = 0.0;
  for (std::size_t i = 0; i < state.cells(); ++i) {
    if (!state.wet(i)) continue;
    const double c = std::sqrt(gn * state.h(i));
    for (double u : state.column(i)) speed = std::max(speed, std::abs(u) + c);
  }
  if (speed == 0.0) return remaining;
  return std::min(cfl * state.dx() / speed, remaining);
}

HyperbolicResult hyperbolic_step(const GridState& state, const Environment& env,
                                 const LayerPartition& partition, double dt,
                                 const BoundaryConditions& bc, Execution exec, double static_friction) {
  const std::size_t n = state.cells();
  const std::size_t layers = partition.size();
  if (state.layers() != layers) throw std::invalid_argument("hyperbolic_step: layer count mismatch");
  const double gn = env.g_normal();
  const double gt = env.g_tangential();
  const double ratio = dt / state.dx();
  auto pressure = [gn](double h) { return 0.5 * gn * h * h; };

  // Per interface j (between cells j-1 and j) and layer: mass flux, and the
  // momentum flux seen from the left (flux_left) and from the right (flux_right).
  std::vector<double> mass_flux((n + 1) * layers);
  std::vector<double> flux_left((n + 1) * layers);
  std::vector<double> flux_right((n + 1) * layers);

  for_each_index(exec, n + 1, [&](std::size_t j) {
    const CellView left = cell_view(state, static_cast<std::ptrdiff_t>(j) - 1, bc);
    const CellView right = cell_view(state, static_cast<std::ptrdiff_t>(j), bc);
    const double z_face = std::max(left.z, right.z);
    const double hl = std::max(0.0, left.h + left.z - z_face);
    const double hr = std::max(0.0, right.h + right.z - z_face);
    const double pl = pressure(hl);
    const double pr = pressure(hr);

    double lambda = 0.0;
    const double cl = std::sqrt(gn * left.h);
    const double cr = std::sqrt(gn * right.h);
    for (std::size_t a = 0; a < layers; ++a) {
      lambda = std::max(lambda, std::abs(velocity(left, a)) + cl);
      lambda = std::max(lambda, std::abs(velocity(right, a)) + cr);
    }
    // Two resting cells whose free-surface slope the static friction can hold
    // exchange no mass: the Rusanov diffusion would otherwise let a deposit creep.
    const double drive = gt - gn * ((right.h + right.z) - (left.h + left.z)) / state.dx();
    const bool held = at_rest(left, layers) && at_rest(right, layers) && std::abs(drive) <= static_friction * gn;

    for (std::size_t a = 0; a < layers; ++a) {
      const double ul = velocity(left, a);
      const double ur = velocity(right, a);
      const double ql = hl * ul;
      const double qr = hr * ur;
      const double fh = 0.5 * (ql + qr) - 0.5 * lambda * (hr - hl);
      const double fq = 0.5 * ((ql * ul + pl) + (qr * ur + pr)) - 0.5 * lambda * (qr - ql);
      mass_flux[j * layers + a] = held ? 0.0 : fh;
      flux_left[j * layers + a] = fq - pl;
      flux_right[j * layers + a] = fq - pr;
    }
  });

  HyperbolicResult result{state, InterfaceArray(n, layers)};
  GridState& next = result.state;
  next.set_time(state.time() + dt);

  // 0 ok, 1 negative depth, 2 non-finite depth; reported after the loop.
  std::vector<unsigned char> failure(n, 0);

  for_each_index(exec, n, [&](std::size_t i) {
    const double h = state.h(i);
    // Thickness each layer would reach on its own fluxes; the interface
    // transfers redistribute the difference so that every layer keeps l_a h.
    auto layer_mass = [&](std::size_t a) {
      return h - ratio * (mass_flux[(i + 1) * layers + a] - mass_flux[i * layers + a]);
    };
    double h_new = -dt * env.basal_mass_flux;
    for (std::size_t a = 0; a < layers; ++a) h_new += partition.fraction(a + 1) * layer_mass(a);

    if (!std::isfinite(h_new)) {
      failure[i] = 2;
      return;
    }
    if (h_new < 0.0) {
      if (h_new < -kNegativeDepthTolerance) {
        failure[i] = 1;
        return;
      }
      h_new = 0.0;
    }
    next.h(i) = h_new;

    const bool wet = h_new >= kDryThreshold;
    double transfer = env.basal_mass_flux;
    result.mass_transfer(i, 0) = wet ? transfer : 0.0;
    for (std::size_t a = 0; a < layers; ++a) {
      const double u = state.wet(i) ? state.u(i, a + 1) : 0.0;
      const double q =
          h * u - ratio * (flux_left[(i + 1) * layers + a] - flux_right[i * layers + a]) + dt * gt * h;
      next.u(i, a + 1) = wet ? q / h_new : 0.0;
      if (a + 1 < layers) {
        transfer += partition.fraction(a + 1) * (h_new - layer_mass(a)) / dt;
        result.mass_transfer(i, a + 1) = wet ? transfer : 0.0;
      }
    }
    result.mass_transfer(i, layers) = 0.0;
  });

  for (std::size_t i = 0; i < n; ++i) {
    if (failure[i] == 1) throw SolverError("hyperbolic_step: negative depth at cell " + std::to_string(i));
    if (failure[i] == 2) throw SolverError("hyperbolic_step: non-finite depth at cell " + std::to_string(i));
  }
  for (double u : next.velocities()) {
    if (!std::isfinite(u)) throw SolverError("hyperbolic_step: non-finite velocity");
  }
  return result;
}

}  // namespace msm
