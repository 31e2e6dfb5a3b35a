#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "squidharm/block_tridiag.hpp"
#include "squidharm/eigen.hpp"
#include "squidharm/parallel.hpp"
#include "squidharm/squid.hpp"

namespace squidharm {

// SQUID with a series inductor in each arm, three modes: theta and phi
// oscillators plus the junction phase in the charge basis. Capacitances in fF,
// inductance per arm in pH, energies in GHz.
struct FullSquidCircuit {
  double C_J_L = 0.0;
  double C_J_R = 0.0;
  double C_sh = 0.0;
  double L = 0.0;
  double E_J_L = 0.0;
  double E_J_R = 0.0;

  // Positive capacitances and inductance, nonnegative E_J, |C_J_L - C_J_R| < 5% of the mean.
  void validate() const;

  double C_J() const { return 0.5 * (C_J_L + C_J_R); }
  double E_C_theta() const;
  double E_C_phi() const;
  double E_C_varphi() const;
  double J() const;
  double E_L() const;
  // e^2 / 2 (C_sh + C_J_L + C_J_R): the single-mode charging energy.
  double E_C_total() const;

  // C_J_L + C_J_R = e^2 / (2 E_C h) - C_sh; the sum is split by `left_fraction`.
  static FullSquidCircuit from_device(double E_C, double E_J_L, double E_J_R, double L_pH, double C_sh_fF,
                                      double left_fraction = 0.5);
};

struct FullSquidDims {
  int d_theta = 6;
  int d_phi = 10;
  int charge_cutoff = 0;  // 0 selects cutoff_rule(E_J_L + E_J_R, E_C_total)
  bool theta_major = true; // oscillator product order inside a charge block
};

// Two-mode transmon with a series inductor: charge mode plus an inductor
// oscillator. C, C_J in fF, L in pH, E_J in GHz.
struct TransmonInductorCircuit {
  double C = 0.0;
  double C_J = 0.0;
  double L = 0.0;
  double E_J = 0.0;
  double n_g = 0.0;

  void validate() const;
  double E_C() const;
  double E_CJ() const;
  double E_L() const;
  // e^2 / 2 (C + C_J)
  double E_C_effective() const;
};

struct TransmonInductorDims {
  int d_L = 40;
  int charge_cutoff = 0;  // 0 selects cutoff_rule(E_J, E_C_effective)
};

inline constexpr double default_dimension_cap = 2e5;

// Block-tridiagonal in the charge index; blocks are the oscillator product.
BlockTridiagonalHermitian full_squid_hamiltonian(const FullSquidCircuit& circuit, double phi_ext, double n_g,
                                                 const FullSquidDims& dims = {},
                                                 double dimension_cap = default_dimension_cap);

BlockTridiagonalHermitian transmon_inductor_hamiltonian(const TransmonInductorCircuit& circuit,
                                                        const TransmonInductorDims& dims = {},
                                                        double dimension_cap = default_dimension_cap);

// Second-harmonic single-mode counterparts used for comparison: per-arm
// ratio E_J / 4 E_L and the total charging energy.
SquidParams second_harmonic_model(const FullSquidCircuit& circuit);

struct SingleModeModel {
  HarmonicPotential potential;
  double E_C = 0.0;
  double n_g = 0.0;
};
// -E_J cos(phi) + (E_J^2 / 4 E_L) cos(2 phi) with E_C = e^2 / 2 (C + C_J).
SingleModeModel second_harmonic_model(const TransmonInductorCircuit& circuit);

// Device eigenbasis (x) Fock space, index = level * (photon_cutoff + 1) + photons.
struct CoupledSystem {
  Eigen::MatrixXcd hamiltonian;
  EigenSystem device;
  Eigen::MatrixXcd n_matrix;  // <i| n |j> in the device eigenbasis
  int device_levels = 0;
  int photon_cutoff = 0;
  double omega_r = 0.0;
  double g_c = 0.0;

  int index(int level, int photons) const { return level * (photon_cutoff + 1) + photons; }
};

struct CoupledDims {
  int device_levels = 10;
  int photon_cutoff = 6;
};

// diag(E_i) + omega_r a^dag a + g_c n (a + a^dag). `device` must carry states
// in the charge basis `basis`.
CoupledSystem coupled_resonator_hamiltonian(const EigenSystem& device, const ChargeBasisSpec& basis,
                                            double omega_r, double g_c, int photon_cutoff);
CoupledSystem coupled_resonator_hamiltonian(const SquidParams& params, double omega_r, double g_c,
                                            const CoupledDims& dims = {});

// argmax_k |<k| (|level>_q (x) |photons>_r)|^2; throws SolverError when the
// best weight does not exceed 1/2 + margin.
inline constexpr double default_assignment_margin = 0.05;
int identify_dressed_state(const EigenSystem& dressed, const CoupledSystem& system, int level, int photons = 0,
                           double margin = default_assignment_margin);

struct DressedSpectrum {
  Eigen::VectorXd bare;     // device energies E_i
  Eigen::VectorXd dressed;  // energies of the states identified with |i>_q |0>_r
  double resonator_ground = 0.0;  // dressed |0>_q |0>_r
  double resonator_one = 0.0;     // dressed |0>_q |1>_r
  double max_top_photon_population = 0.0;
  std::vector<std::string> warnings;
};

// Diagonalizes the coupled system and assigns the lowest `levels` device states.
DressedSpectrum dressed_spectrum(const CoupledSystem& system, int levels);

// Per flux point: lowest transitions of both models and their largest difference.
struct DiscrepancyTable {
  std::vector<double> flux;             // Phi_0
  int transitions = 0;                  // omega_10 .. omega_{transitions,0}
  std::vector<Eigen::VectorXd> full;    // GHz
  std::vector<Eigen::VectorXd> approx;  // GHz
  std::vector<double> max_abs;          // GHz

  double overall_max() const;
};

struct MultimodeOptions {
  FullSquidDims full_dims{};
  TransmonInductorDims transmon_dims{};
  double dimension_cap = default_dimension_cap;
  Execution execution = Execution::parallel;
};

DiscrepancyTable model_discrepancy(const FullSquidCircuit& circuit, const std::vector<double>& flux_phi0,
                                   double n_g, int transitions, const MultimodeOptions& options = {});

// Single point (no external flux).
DiscrepancyTable model_discrepancy(const TransmonInductorCircuit& circuit, int transitions,
                                   const MultimodeOptions& options = {});

}  // namespace squidharm
