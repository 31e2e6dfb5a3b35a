#include "squidharm/squid.hpp"

#include <cmath>
#include <string>

#include "squidharm/constants.hpp"
#include "squidharm/error.hpp"

namespace squidharm {

void SquidParams::validate() const {
  const bool finite = std::isfinite(E_C) && std::isfinite(E_J1_L) && std::isfinite(dE_J) &&
                      std::isfinite(alpha) && std::isfinite(n_g) && std::isfinite(phi_ext) &&
                      std::isfinite(alpha_R());
  require(finite, "SQUID parameters must be finite");
  require(E_C > 0.0, "E_C must be positive, got " + std::to_string(E_C));
  require(E_J1_L >= 0.0, "E_J1_L must be nonnegative, got " + std::to_string(E_J1_L));
  require(std::abs(dE_J) < 1.0, "|dE_J| must be < 1, got " + std::to_string(dE_J));
  require(std::abs(alpha) < 0.25 && std::abs(alpha_R()) < 0.25,
          "|alpha| must be < 0.25, got " + std::to_string(alpha));
}

SquidParams SquidParams::with_flux(double flux_phi0) const {
  SquidParams p = *this;
  p.phi_ext = constants::reduced_flux(flux_phi0);
  return p;
}

SquidParams SquidParams::with_gate(double gate_charge) const {
  SquidParams p = *this;
  p.n_g = gate_charge;
  return p;
}

double asymmetry_to_dEJ(double asymmetry) { return 2.0 * asymmetry / (1.0 + asymmetry); }

double dEJ_to_asymmetry(double dE_J) { return dE_J / (2.0 - dE_J); }

double right_arm_alpha(double alpha_left, double E_J1_L, double dE_J, double E_L) {
  require(E_L > 0.0, "E_L must be positive");
  return alpha_left - E_J1_L / (4.0 * E_L) * dE_J;
}

HarmonicPotential build_squid_potential(const SquidParams& params) {
  params.validate();
  const double left = params.E_J1_L;
  const double right = params.E_J1_R();
  HarmonicPotential u;
  u.add(1, -left, 0.0);
  u.add(1, -right, params.phi_ext);
  u.add(2, params.alpha * left, 0.0);
  u.add(2, params.alpha_R() * right, params.phi_ext);
  return u;
}

}  // namespace squidharm
