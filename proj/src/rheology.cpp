#include "msm/rheology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace msm {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) {
    throw std::invalid_argument(std::string(field) + ": " + what);
  }
}

}  // namespace

void RheologyParams::validate() const {
  require(mu_s > 0.0, "mu_s", "must be positive");
  require(mu_2 > mu_s, "mu_2", "must exceed mu_s");
  require(I0 > 0.0, "I0", "must be positive");
  require(d_s > 0.0, "d_s", "must be positive");
  require(rho_s > 0.0, "rho_s", "must be positive");
  require(phi_s > 0.0 && phi_s <= 1.0, "phi_s", "must lie in (0, 1]");
}

void Regularization::validate() const {
  if (mode == Mode::Delta) {
    require(delta > 0.0, "delta", "must be positive in delta mode");
  } else {
    require(eta_cap_coefficient > 0.0, "eta_cap_coefficient", "must be positive");
  }
}

double friction_coefficient(double inertial, const RheologyParams& p) {
  if (!(inertial >= 0.0)) {
    throw std::domain_error("friction_coefficient: inertial number must be >= 0");
  }
  if (std::isinf(inertial)) return p.mu_2;
  return p.mu_s + (p.mu_2 - p.mu_s) * inertial / (p.I0 + inertial);
}

double constant_friction_coefficient(const RheologyParams& p) noexcept { return p.mu_s; }

double friction_for_mode(FrictionMode mode, double inertial, const RheologyParams& p) {
  return mode == FrictionMode::Constant ? constant_friction_coefficient(p)
                                        : friction_coefficient(inertial, p);
}

double inertial_number(double shear_norm, double pressure, const RheologyParams& p) {
  if (!(pressure > 0.0)) {
    throw std::domain_error("inertial_number: pressure must be > 0");
  }
  return p.d_s * shear_norm / std::sqrt(pressure / p.rho_s);
}

double viscosity_cap(const RheologyParams& p, const Regularization& reg, double h_ref, double g) {
  return reg.eta_cap_coefficient * p.rho() * std::sqrt(g * h_ref * h_ref * h_ref);
}

double effective_viscosity(double shear_norm, double pressure, const RheologyParams& p,
                           const Regularization& reg, double h_ref, FrictionMode mode, double g) {
  if (pressure <= 0.0) return 0.0;

  const double mu = friction_for_mode(mode, inertial_number(shear_norm, pressure, p), p);
  const double yield = mu * pressure;

  if (reg.mode == Regularization::Mode::Delta) {
    return yield / std::sqrt(shear_norm * shear_norm + reg.delta * reg.delta);
  }

  const double eta_max = viscosity_cap(p, reg, h_ref, g);
  if (eta_max <= 0.0) return 0.0;
  // Below the switch point the cap is returned verbatim (no yield / (yield / eta_M) round trip).
  if (shear_norm * eta_max <= yield) return eta_max;
  return yield / std::max(shear_norm, yield / eta_max);
}

}  // namespace msm
