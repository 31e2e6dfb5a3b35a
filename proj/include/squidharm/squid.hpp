#pragma once

#include <optional>

#include "squidharm/potential.hpp"

namespace squidharm {

// Fit parameterization of the capacitively shunted SQUID:
//   H = 4 E_C (n - n_g)^2 - E_J1^L [cos(phi) - a cos 2phi]
//       - E_J1^L (1 - dE_J) [cos(phi - phi_ext) - a cos 2(phi - phi_ext)]
// with a shared second-harmonic ratio a = alpha for both arms.
struct SquidParams {
  double E_C = 0.0;     // GHz
  double E_J1_L = 0.0;  // GHz
  double dE_J = 0.0;    // E_J1^R = E_J1^L (1 - dE_J)
  double alpha = 0.0;   // E_J2 / E_J1, main-text sign (positive = cos 2phi raises U)
  double n_g = 0.0;     // Cooper pairs
  double phi_ext = 0.0; // reduced flux, radians

  // Per-arm refinement: overrides alpha on the right arm when set.
  std::optional<double> alpha_right;

  double E_J1_R() const { return E_J1_L * (1.0 - dE_J); }
  double alpha_R() const { return alpha_right.value_or(alpha); }
  double E_J_sum() const { return E_J1_L + E_J1_R(); }
  double delta_E_J1() const { return E_J1_L - E_J1_R(); }
  double sigma_E_J2() const { return alpha * E_J1_L + alpha_R() * E_J1_R(); }

  // alpha < 0 is allowed but worth flagging in reports.
  bool alpha_flagged() const { return alpha < 0.0 || alpha_R() < 0.0; }

  // Throws InvalidArgument on non-finite values or violated bounds
  // (E_C > 0, E_J1_L >= 0, |dE_J| < 1, |alpha| < 0.25).
  void validate() const;

  SquidParams with_flux(double flux_phi0) const;
  SquidParams with_gate(double gate_charge) const;
};

// JJ asymmetry a = (E_L - E_R) / (E_L + E_R)  ->  dE_J = 2a / (1 + a).
double asymmetry_to_dEJ(double asymmetry);
double dEJ_to_asymmetry(double dE_J);

// alpha^(R) = alpha^(L) - (E_J1^L / 4 E_L) dE_J for a purely inductive ratio.
double right_arm_alpha(double alpha_left, double E_J1_L, double dE_J, double E_L);

// Left arm at offset 0, right arm at offset phi_ext; four terms.
HarmonicPotential build_squid_potential(const SquidParams& params);

}  // namespace squidharm
