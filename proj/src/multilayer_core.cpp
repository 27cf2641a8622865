#include "msm/multilayer_core.hpp"

#include <cmath>
#include <stdexcept>

namespace msm {

double interface_pressure(double h, const LayerPartition& partition, const Environment& env,
                          double rho, std::size_t alpha) {
  if (alpha > partition.size()) throw std::out_of_range("interface_pressure: alpha must lie in 0..N");
  return env.p_surface + rho * env.g_normal() * h * (1.0 - partition.cumulative(alpha));
}

double shear_estimate(std::span<const double> column, double h, const LayerPartition& partition,
                      std::size_t alpha, ShearOrder order, double stretching) {
  if (alpha == 0 || alpha >= partition.size()) {
    throw std::out_of_range("shear_estimate: interface must be interior");
  }
  if (h < kDryThreshold) return 0.0;
  const double q = (column[alpha] - column[alpha - 1]) / (partition.midpoint_gap(alpha) * h);
  if (order == ShearOrder::First) return std::abs(q);
  return std::sqrt(q * q + stretching * stretching);
}

InterfaceArray shear_estimates(const GridState& state, const LayerPartition& partition,
                               ShearOrder order) {
  const std::size_t n = state.cells();
  const std::size_t layers = partition.size();
  InterfaceArray out(n, layers);
  for (std::size_t i = 0; i < n; ++i) {
    if (!state.wet(i)) continue;
    for (std::size_t a = 1; a < layers; ++a) {
      double stretching = 0.0;
      if (order == ShearOrder::Second) {
        stretching = cell_derivative(i, n, state.dx(),
                                     [&](std::size_t j) { return state.u(j, a + 1) + state.u(j, a); });
      }
      out(i, a) = shear_estimate(state.column(i), state.h(i), partition, a, order, stretching);
    }
  }
  return out;
}

InterfaceArray mass_transfer(const GridState& state, const LayerPartition& partition,
                             const Environment& env) {
  const std::size_t n = state.cells();
  const std::size_t layers = partition.size();
  InterfaceArray out(n, layers);
  std::vector<double> divergence(layers);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t g = 1; g <= layers; ++g) {
      divergence[g - 1] =
          cell_derivative(i, n, state.dx(), [&](std::size_t j) { return state.h(j) * state.u(j, g); });
    }
    out(i, 0) = env.basal_mass_flux;
    for (std::size_t a = 1; a < layers; ++a) {
      double sum = (1.0 - partition.cumulative(a)) * env.basal_mass_flux;
      for (std::size_t g = 1; g <= layers; ++g) {
        sum += xi_coefficient(partition, a, g) * divergence[g - 1];
      }
      out(i, a) = sum;
    }
    out(i, layers) = 0.0;
  }
  return out;
}

double basal_shear_rate(double u1, double h, const LayerPartition& partition) {
  if (h < kDryThreshold) return 0.0;
  if (partition.size() == 1) return std::abs(u1) / h;
  return 2.0 * std::abs(u1) / (partition.fraction(1) * h);
}

double bottom_friction_bound(double h, const Environment& env, const RheologyParams& rheology,
                             double basal_inertial, FrictionMode mode) {
  if (h <= 0.0) return 0.0;
  const double mu = friction_for_mode(mode, basal_inertial, rheology);
  return mu * rheology.rho() * env.g_normal() * h;
}

double basal_friction_coefficient(double u1, double h, const LayerPartition& partition,
                                  const Environment& env, const RheologyParams& rheology,
                                  FrictionMode mode) {
  if (mode == FrictionMode::Constant) return constant_friction_coefficient(rheology);
  const double p = interface_pressure(h, partition, env, rheology.rho(), 0);
  if (p <= 0.0) return rheology.mu_s;
  return friction_coefficient(inertial_number(basal_shear_rate(u1, h, partition), p, rheology), rheology);
}

void fill_viscosity(const GridState& state, const LayerPartition& partition, const RheologyParams& rheology,
                    const ClosureOptions& options, InterfaceFields& fields) {
  const std::size_t layers = partition.size();
  fields.viscosity = InterfaceArray(state.cells(), layers);
  for (std::size_t i = 0; i < state.cells(); ++i) {
    if (!state.wet(i)) continue;
    for (std::size_t a = 1; a < layers; ++a) {
      fields.viscosity(i, a) = effective_viscosity(fields.shear(i, a), fields.pressure(i, a), rheology,
                                                   options.regularization, state.h(i), options.friction);
    }
  }
}

InterfaceArray viscous_coupling(const GridState& state, const LayerPartition& partition,
                                const Environment& env, const RheologyParams& rheology,
                                const InterfaceFields& fields, FrictionMode mode) {
  const std::size_t layers = partition.size();
  InterfaceArray out(state.cells(), layers);
  for (std::size_t i = 0; i < state.cells(); ++i) {
    if (!state.wet(i)) continue;
    const double h = state.h(i);
    const double u1 = state.u(i, 1);
    if (u1 != 0.0) {
      const double mu = basal_friction_coefficient(u1, h, partition, env, rheology, mode);
      out(i, 0) = -mu * rheology.rho() * env.g_normal() * h * (u1 > 0.0 ? 1.0 : -1.0);
    }
    for (std::size_t a = 1; a < layers; ++a) {
      const double gap = partition.midpoint_gap(a) * h;
      out(i, a) = -fields.viscosity(i, a) * (state.u(i, a + 1) - state.u(i, a)) / gap;
    }
  }
  return out;
}

InterfaceFields interface_fields(const GridState& state, const LayerPartition& partition,
                                 const Environment& env, const RheologyParams& rheology,
                                 const ClosureOptions& options) {
  const std::size_t n = state.cells();
  const std::size_t layers = partition.size();
  InterfaceFields fields;
  fields.pressure = InterfaceArray(n, layers);
  for (std::size_t i = 0; i < n; ++i) {
    if (!state.wet(i)) continue;
    for (std::size_t a = 0; a <= layers; ++a) {
      fields.pressure(i, a) = interface_pressure(state.h(i), partition, env, rheology.rho(), a);
    }
  }
  fields.shear = shear_estimates(state, partition, options.shear_order);
  fill_viscosity(state, partition, rheology, options, fields);
  fields.mass_transfer = mass_transfer(state, partition, env);
  fields.coupling = viscous_coupling(state, partition, env, rheology, fields, options.friction);
  return fields;
}

VerticalVelocity vertical_velocity(const GridState& state, const LayerPartition& partition,
                                   const Environment& env) {
  const std::size_t n = state.cells();
  const std::size_t layers = partition.size();
  VerticalVelocity out;
  out.layers = layers;
  out.bottom.assign(n * layers, 0.0);
  out.top.assign(n * layers, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    if (!state.wet(i)) continue;
    const double dzb = cell_derivative(i, n, state.dx(), [&](std::size_t j) { return state.z_b(j); });
    const double dh = cell_derivative(i, n, state.dx(), [&](std::size_t j) { return state.h(j); });
    const double h = state.h(i);

    double w = state.u(i, 1) * dzb - env.basal_mass_flux;
    for (std::size_t a = 1; a <= layers; ++a) {
      const double divergence = cell_derivative(i, n, state.dx(), [&](std::size_t j) { return state.u(j, a); });
      out.bottom[i * layers + a - 1] = w;
      w -= partition.fraction(a) * h * divergence;
      out.top[i * layers + a - 1] = w;
      if (a < layers) {
        const double interface_slope = dzb + partition.cumulative(a) * dh;
        w += (state.u(i, a + 1) - state.u(i, a)) * interface_slope;
      }
    }
  }
  return out;
}

double total_energy(const GridState& state, const LayerPartition& partition, const Environment& env,
                    double rho) {
  const double gn = env.g_normal();
  const double gt = env.g_tangential();
  double total = 0.0;
  for (std::size_t i = 0; i < state.cells(); ++i) {
    const double h = state.h(i);
    if (h <= 0.0) continue;
    const double potential = env.p_surface / rho + gn * (state.z_b(i) + 0.5 * h) - gt * state.x(i);
    double column = 0.0;
    for (std::size_t a = 1; a <= partition.size(); ++a) {
      const double u = state.u(i, a);
      column += partition.fraction(a) * h * (0.5 * u * u + potential);
    }
    total += column;
  }
  return rho * total * state.dx();
}

}  // namespace msm
