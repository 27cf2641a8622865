#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "msm/solver.hpp"

namespace msm {

namespace {

struct ColumnSystem {
  std::vector<double> lower, diag, upper, rhs;
  std::vector<double> offset, gain;  // top-down elimination: u_k = offset_k + gain_k u_{k-1}
  std::vector<double> rhs_sum;       // rhs_sum[k] = rhs[0] + ... + rhs[k-1]

  void resize(std::size_t n) {
    for (auto* v : {&lower, &diag, &upper, &rhs, &offset, &gain}) v->assign(n, 0.0);
    rhs_sum.assign(n + 1, 0.0);
  }

  // Eliminates from the surface down so that each layer is expressed through
  // the one below it; pinning any bottom block then costs nothing extra.
  void eliminate() {
    const std::size_t n = diag.size();
    for (std::size_t k = n; k-- > 0;) {
      double pivot = diag[k];
      double r = rhs[k];
      if (k + 1 < n) {
        pivot += upper[k] * gain[k + 1];
        r -= upper[k] * offset[k + 1];
      }
      if (pivot == 0.0 || !std::isfinite(pivot)) throw std::runtime_error("column system: singular pivot");
      offset[k] = r / pivot;
      gain[k] = -lower[k] / pivot;
    }
  }

  // Layers below `pinned` are held at zero; the rest follow by substitution.
  void substitute(std::size_t pinned, std::span<double> u) const {
    double below = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      u[k] = k < pinned ? 0.0 : offset[k] + gain[k] * below;
      below = u[k];
    }
  }
};

ColumnSystem& workspace(std::size_t n) {
  thread_local ColumnSystem system;
  system.resize(n);
  return system;
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

// Relative slack on the stick test: at tan(theta) = mu_s the driving force and
// the yield stress agree only up to the rounding of the layer sums.
constexpr double kStickRounding = 64.0 * std::numeric_limits<double>::epsilon();

ColumnState solve_column(std::span<double> u, double h, const LayerPartition& partition,
                         const Environment& env, std::span<const double> viscosity,
                         std::span<const double> transfer, double rho, double dt,
                         const BasalContact* basal) {
  const std::size_t n = partition.size();
  if (u.size() != n) throw std::invalid_argument("solve_column: velocity size must equal layer count");
  if (h < kDryThreshold) {
    std::fill(u.begin(), u.end(), 0.0);
    return ColumnState::Dry;
  }

  ColumnSystem& sys = workspace(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double inertia = rho * partition.fraction(k + 1) * h / dt;
    const double nu_below = k > 0 ? viscosity[k] / (partition.midpoint_gap(k) * h) : 0.0;
    const double nu_above = k + 1 < n ? viscosity[k + 1] / (partition.midpoint_gap(k + 1) * h) : 0.0;
    const double g_below = transfer[k];
    const double g_above = k + 1 < n ? transfer[k + 1] : 0.0;
    sys.diag[k] = inertia + nu_below + nu_above + 0.5 * rho * (g_below - g_above);
    sys.upper[k] = -nu_above - 0.5 * rho * g_above;
    sys.lower[k] = -nu_below + 0.5 * rho * g_below;
    sys.rhs[k] = inertia * u[k];
    sys.rhs_sum[k + 1] = sys.rhs_sum[k] + sys.rhs[k];
  }
  sys.eliminate();

  if (basal == nullptr) {
    sys.substitute(0, u);
    return ColumnState::Free;
  }

  const RheologyParams& rheology = *basal->rheology;
  const double weight = rho * env.g_normal() * h;
  const double static_bound = rheology.mu_s * weight;

  // Largest bottom block 1..k that can be held at rest: with the layers above
  // moving freely, the force each interface of the block (and the bed) must
  // carry stays within its static yield stress.
  for (std::size_t k = n; k >= 1; --k) {
    const double from_above = k < n ? sys.upper[k - 1] * sys.offset[k] : 0.0;
    bool holds = true;
    for (std::size_t j = k; j >= 1 && holds; --j) {
      const double force = from_above - (sys.rhs_sum[k] - sys.rhs_sum[j - 1]);
      const double limit =
          j > 1 ? rheology.mu_s * interface_pressure(h, partition, env, rho, j - 1) : static_bound;
      holds = std::abs(force) <= limit * (1.0 + kStickRounding);
    }
    if (holds) {
      sys.substitute(k, u);
      return k == n ? ColumnState::Rigid : ColumnState::Stuck;
    }
  }

  // Sliding. The bed force F on layer 1 moves u_1 linearly, u_1(F) = (F - required) / pivot,
  // and opposes the slip with magnitude mu(I_b(|u_1|)) rho g_n h. Solve for the slip speed.
  const double required = (n > 1 ? sys.upper[0] * sys.offset[1] : 0.0) - sys.rhs[0];
  const double first_pivot = sys.diag[0] + (n > 1 ? sys.upper[0] * sys.gain[1] : 0.0);
  auto bed_force = [&](double speed) {
    return basal_friction_coefficient(speed, h, partition, env, rheology, basal->friction) * weight;
  };
  double speed = 0.0;
  if (basal->friction == FrictionMode::Constant) {
    speed = (std::abs(required) - static_bound) / first_pivot;
  } else {
    auto residual = [&](double v) { return v * first_pivot - std::abs(required) + bed_force(v); };
    const double upper_speed = std::abs(required) / first_pivot;
    std::uintmax_t iterations = 100;
    const auto root = boost::math::tools::toms748_solve(residual, 0.0, upper_speed, residual(0.0),
                                                        residual(upper_speed),
                                                        boost::math::tools::eps_tolerance<double>(50), iterations);
    speed = 0.5 * (root.first + root.second);
  }
  sys.rhs[0] += sign(required) * (std::abs(required) - speed * first_pivot);
  sys.eliminate();
  sys.substitute(0, u);
  return ColumnState::Sliding;
}

ExchangeCoefficients exchange_coefficients(const GridState& state, const InterfaceArray& mass_transfer,
                                           const LayerPartition& partition, const Environment& env,
                                           const RheologyParams& rheology, const ClosureOptions& closure,
                                           Execution exec) {
  const std::size_t n = state.cells();
  const std::size_t layers = partition.size();
  ExchangeCoefficients out{InterfaceArray(n, layers), mass_transfer};
  for_each_index(exec, n, [&](std::size_t i) {
    if (!state.wet(i)) return;
    const double h = state.h(i);
    for (std::size_t a = 1; a < layers; ++a) {
      double stretching = 0.0;
      if (closure.shear_order == ShearOrder::Second) {
        stretching = cell_derivative(i, n, state.dx(),
                                     [&](std::size_t j) { return state.u(j, a + 1) + state.u(j, a); });
      }
      const double shear = shear_estimate(state.column(i), h, partition, a, closure.shear_order, stretching);
      const double pressure = interface_pressure(h, partition, env, rheology.rho(), a);
      out.viscosity(i, a) =
          effective_viscosity(shear, pressure, rheology, closure.regularization, h, closure.friction);
    }
  });
  return out;
}

namespace {

GridState exchange_impl(const GridState& state, const ExchangeCoefficients& coefficients,
                        const Environment& env, const LayerPartition& partition,
                        const RheologyParams& rheology, const BasalContact* basal, double dt,
                        Execution exec) {
  if (!(dt > 0.0)) throw std::invalid_argument("exchange: dt must be positive");
  GridState next = state;
  const double rho = rheology.rho();
  std::vector<unsigned char> failed(state.cells(), 0);
  for_each_index(exec, state.cells(), [&](std::size_t i) {
    try {
      solve_column(next.column(i), state.h(i), partition, env, coefficients.viscosity.column(i),
                   coefficients.mass_transfer.column(i), rho, dt, basal);
    } catch (const std::exception&) {
      failed[i] = 1;
    }
  });
  for (std::size_t i = 0; i < state.cells(); ++i) {
    if (failed[i]) throw SolverError("exchange: singular column system at cell " + std::to_string(i));
  }
  return next;
}

}  // namespace

GridState exchange_step(const GridState& state, const ExchangeCoefficients& coefficients,
                        const Environment& env, const LayerPartition& partition,
                        const RheologyParams& rheology, double dt, Execution exec) {
  return exchange_impl(state, coefficients, env, partition, rheology, nullptr, dt, exec);
}

GridState exchange_with_friction(const GridState& state, const ExchangeCoefficients& coefficients,
                                 const Environment& env, const LayerPartition& partition,
                                 const RheologyParams& rheology, FrictionMode friction, double dt,
                                 Execution exec) {
  const BasalContact basal{&rheology, friction};
  return exchange_impl(state, coefficients, env, partition, rheology, &basal, dt, exec);
}

GridState friction_step(const GridState& state, const Environment& env, const LayerPartition& partition,
                        const RheologyParams& rheology, FrictionMode friction, double dt) {
  GridState next = state;
  const double rho = rheology.rho();
  const double l1 = partition.fraction(1);
  for (std::size_t i = 0; i < state.cells(); ++i) {
    if (!state.wet(i)) continue;
    const double h = state.h(i);
    const double u1 = state.u(i, 1);
    const double mu = basal_friction_coefficient(u1, h, partition, env, rheology, friction);
    const double impulse = dt * mu * rho * env.g_normal() * h;
    if (rho * l1 * h * std::abs(u1) <= impulse) {
      next.u(i, 1) = 0.0;
    } else {
      next.u(i, 1) = u1 - sign(u1) * impulse / (rho * l1 * h);
    }
  }
  return next;
}

}  // namespace msm
