#pragma once

#include <numbers>

// Unit conventions: energies are E/h in GHz, flux in units of the flux quantum,
// capacitances in fF, inductances in pH, currents in uA.
namespace squidharm::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double planck = 6.62607015e-34;            // J s
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double flux_quantum = planck / (2.0 * elementary_charge);

// E_C = e^2 / (2 C h): E_C[GHz] = charging_ghz_ff / C[fF]  (~19.3703)
inline constexpr double charging_ghz_ff =
    elementary_charge * elementary_charge / (2.0 * planck) / 1e9 / 1e-15;

// E_L = (Phi_0 / 2 pi)^2 / (L h): E_L[GHz] = inductive_ghz_ph / L[pH]  (~163462)
inline constexpr double inductive_ghz_ph =
    (flux_quantum / two_pi) * (flux_quantum / two_pi) / planck / 1e9 / 1e-12;

// I = (2 pi / Phi_0) dU/dphi with U = h * E[GHz] * 1e9, in uA per GHz  (~2.0134e-3)
inline constexpr double current_ua_per_ghz = two_pi * planck * 1e9 / flux_quantum * 1e6;

constexpr double charging_energy_ghz(double capacitance_ff) { return charging_ghz_ff / capacitance_ff; }
constexpr double capacitance_ff(double charging_energy_ghz) { return charging_ghz_ff / charging_energy_ghz; }
constexpr double inductive_energy_ghz(double inductance_ph) { return inductive_ghz_ph / inductance_ph; }
constexpr double inductance_ph(double inductive_energy_ghz) { return inductive_ghz_ph / inductive_energy_ghz; }

// Reduced external flux phi_ext = 2 pi Phi_ext / Phi_0.
constexpr double reduced_flux(double flux_phi0) { return two_pi * flux_phi0; }

}  // namespace squidharm::constants
