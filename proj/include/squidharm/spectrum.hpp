#pragma once

#include <optional>
#include <vector>

#include "squidharm/eigen.hpp"
#include "squidharm/parallel.hpp"
#include "squidharm/squid.hpp"

namespace squidharm {

// N = max(24, ceil(4 sqrt(E_J_sum / E_C))).
int cutoff_rule(double E_J_sum, double E_C);

struct CutoffOptions {
  double tolerance = 1e-6;  // GHz, on every omega_i0
  int max_cutoff = 4096;
};

// Starts from cutoff_rule and doubles until the lowest `levels` transitions
// change by less than the tolerance, probed at zero and half flux.
// The returned spec has `converged = true`.
ChargeBasisSpec select_cutoff(const SquidParams& params, int levels, const CutoffOptions& options = {});

// Diagonalizes the SQUID Hamiltonian at params.phi_ext / params.n_g.
EigenSystem squid_eigensystem(const SquidParams& params, const ChargeBasisSpec& basis, int levels,
                              bool vectors = false);

// Transition table over a flux x gate-charge grid.
struct Spectrum {
  struct Row {
    double flux_phi0;
    double n_g;
    int i;
    int j;
    double omega;  // GHz
  };

  std::vector<double> flux;  // Phi_0
  std::vector<double> gate;  // n_g values
  int levels = 0;
  ChargeBasisSpec basis;
  std::vector<Eigen::VectorXd> energies;  // index = flux_index * gate.size() + gate_index

  const Eigen::VectorXd& at(std::size_t flux_index, std::size_t gate_index) const {
    return energies[flux_index * gate.size() + gate_index];
  }
  // omega_ij = E_i - E_j
  double omega(std::size_t flux_index, std::size_t gate_index, int i, int j) const;

  // omega_i0 for i >= 1 and omega_j1 for j >= 2, ordered by flux, gate, source, target.
  std::vector<Row> rows() const;
};

struct SpectrumOptions {
  Execution execution = Execution::parallel;
  std::optional<ChargeBasisSpec> basis;  // auto-selected when empty
};

// `params.phi_ext` and `params.n_g` are ignored; the grid supplies them.
Spectrum transition_spectrum(const SquidParams& params, const std::vector<double>& flux_phi0,
                             const std::vector<double>& gate_charges, int levels,
                             const SpectrumOptions& options = {});

}  // namespace squidharm
