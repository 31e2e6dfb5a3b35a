#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "squidharm/eigen.hpp"
#include "squidharm/parallel.hpp"
#include "squidharm/potential.hpp"
#include "squidharm/squid.hpp"

namespace squidharm {

// ---- dispersive shift ----------------------------------------------------

enum class DispersiveMethod { perturbative, exact_dressed };
std::string to_string(DispersiveMethod m);

// Second-order resonator pull for device state `state`:
//   g^2 sum_{i != s} |<i|n|s>|^2 (-2 w_is) / (w_is^2 - w_r^2),  w_is = E_i - E_s.
// `device` must carry eigenvectors in `basis`; the sum runs over its levels.
// A warning is appended when some |w_is - w_r| < 10 g.
double dispersive_shift(const EigenSystem& device, const ChargeBasisSpec& basis, double omega_r, double g_c,
                        int state = 0, std::vector<std::string>* warnings = nullptr);

struct DispersiveReport {
  std::vector<double> flux;  // Phi_0
  double omega_r = 0.0;      // GHz
  double g_c = 0.0;          // GHz
  int state = 0;
  DispersiveMethod method = DispersiveMethod::perturbative;
  std::vector<double> shift;  // GHz
  // exact-dressed only: max_i |dressed w_i0 - bare w_i0| over the tracked levels
  std::vector<double> device_shift;
  std::vector<std::string> warnings;
};

struct DispersiveOptions {
  int level_cap = 15;
  int state = 0;
  int photon_cutoff = 6;
  int tracked_levels = 2;  // device levels compared bare vs dressed (2: only omega_10)
  std::optional<ChargeBasisSpec> basis;
  Execution execution = Execution::parallel;
};

struct DispersiveComparison {
  DispersiveReport perturbative;
  DispersiveReport exact;
};

// Both methods on one flux grid from shared device eigensystems (gate charge from params).
DispersiveComparison dispersive_sweep(const SquidParams& params, const std::vector<double>& flux_phi0,
                                      double omega_r, double g_c, const DispersiveOptions& options = {});

// ---- charge dispersion ---------------------------------------------------

// |w_i0(n_g = 0.5) - w_i0(n_g = 0)| at the given flux.
double charge_dispersion(const SquidParams& params, double flux_phi0, int level,
                         std::optional<ChargeBasisSpec> basis = std::nullopt);

// ---- supercurrent and diode ----------------------------------------------

// m-th derivative of U with respect to phi.
double potential_derivative(const HarmonicPotential& u, double phi, int order);

// I(phi) = (2 pi / Phi_0) dU/dphi in uA.
std::vector<double> supercurrent(const HarmonicPotential& u, const std::vector<double>& phi);

struct CurrentExtrema {
  double I_max = 0.0;  // uA
  double I_min = 0.0;  // uA
  double phi_max = 0.0;
  double phi_min = 0.0;
  double eta = 0.0;
};

// Grid argmax/argmin of I, three-point parabolic refinement, then Newton on
// d^2U/dphi^2 = 0. Throws InvalidArgument for a flat potential.
CurrentExtrema rectification_efficiency(const HarmonicPotential& u, int grid_points = 2048);

struct DiodeReport {
  std::vector<double> flux;  // Phi_0
  std::vector<double> I_max, I_min, eta;
  int grid_points = 0;
};

DiodeReport diode_scan(const SquidParams& params, const std::vector<double>& flux_phi0, int grid_points = 2048,
                       Execution execution = Execution::parallel);

// ---- phase-space exports ---------------------------------------------------

struct PhaseExport {
  std::vector<double> phi;
  std::vector<double> potential;          // GHz
  Eigen::VectorXd energies;               // GHz
  std::vector<std::vector<double>> density;  // density[i][k] = |psi_i(phi_k)|^2
  std::vector<double> normalization;      // integral of |psi_i|^2 over one period
};

// psi_i(phi) = sum_n <n|psi_i> e^{i n phi} / sqrt(2 pi) sampled on `phi`.
PhaseExport export_potential_and_wavefunctions(const SquidParams& params, const std::vector<double>& phi,
                                               int levels, std::optional<ChargeBasisSpec> basis = std::nullopt);

// Uniform periodic grid of `points` samples on [start, start + 2 pi).
std::vector<double> periodic_grid(int points, double start = 0.0);

// ---- double-well diagnostics -----------------------------------------------

// Local minima of U on a uniform periodic grid.
int count_wells(const HarmonicPotential& u, int grid_points = 4096);

// -dE cos(phi) + S cos(2 phi) has two wells iff 4 S > dE > 0 (dE = Delta E_J1, S = Sigma E_J2).
bool double_well_expected(double delta_E_J1, double sigma_E_J2);

// Fraction of |psi|^2 in each well basin (basins split at the local maxima of U).
// `phi` must be a uniform periodic grid.
std::vector<double> well_weights(const std::vector<double>& phi, const std::vector<double>& potential,
                                 const std::vector<double>& density);

struct AvoidedCrossing {
  double flux_phi0 = 0.0;
  int lower = 0;     // gap between levels lower and lower + 1
  double gap = 0.0;  // GHz
};

// Interior strict local minima of E_{k+1} - E_k along the flux grid, for the
// gaps adjacent to `level`.
std::vector<AvoidedCrossing> avoided_crossings(const SquidParams& params, const std::vector<double>& flux_phi0,
                                               int level, std::optional<ChargeBasisSpec> basis = std::nullopt,
                                               Execution execution = Execution::parallel);

}  // namespace squidharm
