#pragma once

namespace msm {

inline constexpr double kGravity = 9.81;

/// Material constants of the mu(I) friction law for a dry granular medium.
///
/// The apparent flow density is not stored: it is always phi_s * rho_s.
struct RheologyParams {
  double mu_s = 0.0;   ///< static friction coefficient
  double mu_2 = 0.0;   ///< limiting friction coefficient at large I
  double I0 = 0.0;     ///< reference inertial number
  double d_s = 0.0;    ///< particle diameter [m]
  double rho_s = 0.0;  ///< particle density [kg/m^3]
  double phi_s = 0.0;  ///< solid volume fraction

  [[nodiscard]] double rho() const noexcept { return phi_s * rho_s; }

  /// Throws std::invalid_argument naming the first violated field.
  void validate() const;

  friend bool operator==(const RheologyParams&, const RheologyParams&) = default;
};

/// Which friction law feeds the stresses: full mu(I) or mu frozen at mu_s.
enum class FrictionMode { MuOfI, Constant };

struct Regularization {
  enum class Mode { MaxBound, Delta };

  Mode mode = Mode::MaxBound;
  double delta = 1e-6;                ///< shear floor [1/s], Delta mode
  double eta_cap_coefficient = 250.0; ///< eta_M = coef * rho * sqrt(g h^3), MaxBound mode

  void validate() const;

  friend bool operator==(const Regularization&, const Regularization&) = default;
};

/// mu(I) = mu_s + (mu_2 - mu_s) I / (I0 + I). Throws std::domain_error for I < 0.
double friction_coefficient(double inertial, const RheologyParams& p);

/// mu_s, used wherever mu(I) appears when running with constant friction.
double constant_friction_coefficient(const RheologyParams& p) noexcept;

/// Friction coefficient for the selected mode.
double friction_for_mode(FrictionMode mode, double inertial, const RheologyParams& p);

/// I = d_s |D| / sqrt(p / rho_s). Throws std::domain_error unless pressure > 0.
double inertial_number(double shear_norm, double pressure, const RheologyParams& p);

/// Viscosity cap eta_M = coef * rho * sqrt(g h_ref^3).
double viscosity_cap(const RheologyParams& p, const Regularization& reg, double h_ref,
                     double g = kGravity);

/// Regularized mu(I) viscosity.
///
/// MaxBound: mu p / max(|D|, mu p / eta_M).  Delta: mu p / sqrt(|D|^2 + delta^2).
/// Zero pressure (free surface) gives zero viscosity in both modes.
double effective_viscosity(double shear_norm, double pressure, const RheologyParams& p,
                           const Regularization& reg, double h_ref,
                           FrictionMode mode = FrictionMode::MuOfI, double g = kGravity);

}  // namespace msm
