#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "msm/grid_state.hpp"
#include "msm/layers.hpp"
#include "msm/rheology.hpp"

namespace msm {

enum class ShearOrder { First = 1, Second = 2 };

/// A value per cell and per interface 0..N, cell-major.
class InterfaceArray {
 public:
  InterfaceArray() = default;
  InterfaceArray(std::size_t cells, std::size_t layers)
      : stride_(layers + 1), values_(cells * (layers + 1), 0.0) {}

  [[nodiscard]] double operator()(std::size_t i, std::size_t alpha) const {
    return values_[i * stride_ + alpha];
  }
  double& operator()(std::size_t i, std::size_t alpha) { return values_[i * stride_ + alpha]; }

  [[nodiscard]] std::span<const double> column(std::size_t i) const {
    return {values_.data() + i * stride_, stride_};
  }
  [[nodiscard]] std::span<double> column(std::size_t i) { return {values_.data() + i * stride_, stride_}; }

  [[nodiscard]] std::size_t cells() const noexcept { return stride_ ? values_.size() / stride_ : 0; }

  friend bool operator==(const InterfaceArray&, const InterfaceArray&) = default;

 private:
  std::size_t stride_ = 0;
  std::vector<double> values_;
};

/// Everything the inter-layer exchange needs at each interface.
struct InterfaceFields {
  InterfaceArray pressure;       ///< p_{alpha+1/2} [Pa]
  InterfaceArray shear;          ///< |D| estimate [1/s] (interior interfaces only)
  InterfaceArray viscosity;      ///< eta_{alpha+1/2} [Pa s] (interior interfaces only)
  InterfaceArray mass_transfer;  ///< G_{alpha+1/2} [m/s]
  InterfaceArray coupling;       ///< K_{alpha+1/2} [Pa]; index 0 holds the basal Coulomb stress
};

/// Settings that select how the closure terms are evaluated.
struct ClosureOptions {
  Regularization regularization{};
  FrictionMode friction = FrictionMode::MuOfI;
  ShearOrder shear_order = ShearOrder::First;

  friend bool operator==(const ClosureOptions&, const ClosureOptions&) = default;
};

/// Hydrostatic pressure at interface alpha: p_S + rho g_n h (1 - L_alpha).
double interface_pressure(double h, const LayerPartition& partition, const Environment& env,
                          double rho, std::size_t alpha);

/// Shear estimate at interior interface alpha of one column.
///
/// First order: |Q| with Q = (u_{alpha+1} - u_alpha) / h_{alpha+1/2}.
/// Second order adds the downslope stretching: sqrt(Q^2 + (d/dx (u_{alpha+1} + u_alpha))^2);
/// pass that derivative as `stretching` (ignored for first order). Dry columns give 0.
double shear_estimate(std::span<const double> column, double h, const LayerPartition& partition,
                      std::size_t alpha, ShearOrder order, double stretching = 0.0);

/// Shear estimates for all interior interfaces of a grid; entries 0 and N are left at 0.
InterfaceArray shear_estimates(const GridState& state, const LayerPartition& partition,
                               ShearOrder order);

/// Interface mass transfer G_{alpha+1/2} = (1 - L_alpha) G_{1/2} + sum_gamma xi_{alpha,gamma} d/dx(h u_gamma),
/// with centered differences (one-sided at the ends). G_{N+1/2} = 0.
InterfaceArray mass_transfer(const GridState& state, const LayerPartition& partition,
                             const Environment& env);

/// Basal shear rate used for the basal inertial number: |u_1| * 2 / (l_1 h) for N > 1, |u_1| / h for N = 1.
double basal_shear_rate(double u1, double h, const LayerPartition& partition);

/// Coulomb bound mu rho g_n h, mu evaluated at the basal inertial number (or mu_s).
double bottom_friction_bound(double h, const Environment& env, const RheologyParams& rheology,
                             double basal_inertial, FrictionMode mode);

/// Basal friction coefficient of a column, using basal_shear_rate for I.
double basal_friction_coefficient(double u1, double h, const LayerPartition& partition,
                                  const Environment& env, const RheologyParams& rheology,
                                  FrictionMode mode);

/// K_{alpha+1/2} = -eta (u_{alpha+1} - u_alpha) / h_{alpha+1/2} for interior interfaces,
/// 0 at the surface, and the basal Coulomb stress -bound * sign(u_1) at index 0.
InterfaceArray viscous_coupling(const GridState& state, const LayerPartition& partition,
                                const Environment& env, const RheologyParams& rheology,
                                const InterfaceFields& fields, FrictionMode mode);

/// Pressure, shear, viscosity, centered mass transfer and couplings for a state.
InterfaceFields interface_fields(const GridState& state, const LayerPartition& partition,
                                 const Environment& env, const RheologyParams& rheology,
                                 const ClosureOptions& options);

/// Interface viscosities from precomputed pressure and shear.
void fill_viscosity(const GridState& state, const LayerPartition& partition, const RheologyParams& rheology,
                    const ClosureOptions& options, InterfaceFields& fields);

/// End values of the piecewise-linear normal velocity inside each layer.
struct VerticalVelocity {
  std::size_t layers = 0;
  std::vector<double> bottom;  ///< w just above z_{alpha-1/2}, cell-major
  std::vector<double> top;     ///< w just below z_{alpha+1/2}, cell-major

  [[nodiscard]] double at_bottom(std::size_t i, std::size_t alpha) const { return bottom[i * layers + alpha - 1]; }
  [[nodiscard]] double at_top(std::size_t i, std::size_t alpha) const { return top[i * layers + alpha - 1]; }
};

/// Normal velocity recovered layer by layer from the bottom:
/// w+_{1/2} = u_1 dz_b/dx - G_{1/2}; inside layer alpha w decreases by h_alpha du_alpha/dx;
/// crossing interface alpha+1/2 adds (u_{alpha+1} - u_alpha) dz_{alpha+1/2}/dx.
VerticalVelocity vertical_velocity(const GridState& state, const LayerPartition& partition,
                                   const Environment& env);

/// rho * sum_cells sum_layers E_alpha dx with
/// E_alpha = h_alpha (u_alpha^2 / 2 + p_S / rho + g_n (z_b + h / 2) - g_t x).
/// The -g_t x term is the downslope part of the potential in the tilted frame; it vanishes for theta = 0.
double total_energy(const GridState& state, const LayerPartition& partition, const Environment& env,
                    double rho);

/// Derivative of a cell field at cell i: centered inside, one-sided at the two ends.
template <class Field>
double cell_derivative(std::size_t i, std::size_t cells, double dx, Field&& field) {
  if (cells < 2) return 0.0;
  if (i == 0) return (field(1) - field(0)) / dx;
  if (i + 1 == cells) return (field(cells - 1) - field(cells - 2)) / dx;
  return (field(i + 1) - field(i - 1)) / (2.0 * dx);
}

}  // namespace msm
