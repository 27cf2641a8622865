#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "msm/rheology.hpp"

namespace msm {

/// Cells thinner than this are dry: velocities are forced to zero and no
/// shear or pressure is evaluated there.
inline constexpr double kDryThreshold = 1e-8;

/// Gravity split for a slope-aligned frame: x runs downslope, z normal to the bed.
struct Environment {
  double g = kGravity;
  double theta = 0.0;   ///< slope angle [rad], 0 <= theta < pi/2
  double p_surface = 0.0;
  double basal_mass_flux = 0.0;  ///< G_{1/2} [m/s]

  [[nodiscard]] double g_normal() const noexcept { return g * std::cos(theta); }
  [[nodiscard]] double g_tangential() const noexcept { return g * std::sin(theta); }

  void validate() const;
};

/// Total thickness and per-layer downslope velocities on a uniform 1D mesh.
///
/// Velocities are stored cell-major (u[i * N + alpha - 1]) so that one column is contiguous.
class GridState {
 public:
  GridState() = default;
  GridState(std::size_t cells, std::size_t layers, double x_min, double dx);

  [[nodiscard]] std::size_t cells() const noexcept { return h_.size(); }
  [[nodiscard]] std::size_t layers() const noexcept { return layers_; }
  [[nodiscard]] double dx() const noexcept { return dx_; }
  [[nodiscard]] double time() const noexcept { return t_; }
  void set_time(double t) noexcept { t_ = t; }

  [[nodiscard]] double x(std::size_t i) const { return x_[i]; }
  [[nodiscard]] double h(std::size_t i) const { return h_[i]; }
  [[nodiscard]] double& h(std::size_t i) { return h_[i]; }
  [[nodiscard]] double z_b(std::size_t i) const { return z_b_[i]; }
  [[nodiscard]] double& z_b(std::size_t i) { return z_b_[i]; }

  /// alpha is 1-based.
  [[nodiscard]] double u(std::size_t i, std::size_t alpha) const { return u_[i * layers_ + alpha - 1]; }
  [[nodiscard]] double& u(std::size_t i, std::size_t alpha) { return u_[i * layers_ + alpha - 1]; }

  [[nodiscard]] std::span<const double> column(std::size_t i) const {
    return {u_.data() + i * layers_, layers_};
  }
  [[nodiscard]] std::span<double> column(std::size_t i) { return {u_.data() + i * layers_, layers_}; }

  [[nodiscard]] std::span<const double> x_centers() const noexcept { return x_; }
  [[nodiscard]] std::span<const double> thickness() const noexcept { return h_; }
  [[nodiscard]] std::span<double> thickness() noexcept { return h_; }
  [[nodiscard]] std::span<const double> bed() const noexcept { return z_b_; }
  [[nodiscard]] std::span<const double> velocities() const noexcept { return u_; }
  [[nodiscard]] std::span<double> velocities() noexcept { return u_; }

  [[nodiscard]] bool wet(std::size_t i) const { return h_[i] >= kDryThreshold; }

  /// Total mass per unit width and density, sum h * dx in fixed cell order.
  [[nodiscard]] double mass() const;

  /// Largest |u_alpha| over wet cells.
  [[nodiscard]] double max_speed() const;

  friend bool operator==(const GridState&, const GridState&) = default;

 private:
  std::size_t layers_ = 0;
  double dx_ = 0.0;
  double t_ = 0.0;
  std::vector<double> x_;
  std::vector<double> h_;
  std::vector<double> z_b_;
  std::vector<double> u_;
};

}  // namespace msm
