#include "squidharm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "squidharm/constants.hpp"
#include "squidharm/error.hpp"

namespace squidharm {

int cutoff_rule(double E_J_sum, double E_C) {
  require(E_C > 0.0, "E_C must be positive");
  const double ratio = std::max(E_J_sum, 0.0) / E_C;
  return std::max(24, static_cast<int>(std::ceil(4.0 * std::sqrt(ratio))));
}

EigenSystem squid_eigensystem(const SquidParams& params, const ChargeBasisSpec& basis, int levels,
                              bool vectors) {
  const auto band = hamiltonian_band(build_squid_potential(params), params.E_C, params.n_g, basis);
  return eigensolve(band, levels, vectors);
}

ChargeBasisSpec select_cutoff(const SquidParams& params, int levels, const CutoffOptions& options) {
  params.validate();
  require(levels >= 2, "need at least two levels");
  ChargeBasisSpec basis{cutoff_rule(params.E_J_sum(), params.E_C), false};
  const SquidParams probes[] = {params.with_flux(0.0).with_gate(0.0), params.with_flux(0.5).with_gate(0.5)};

  auto transitions = [&](const SquidParams& p, const ChargeBasisSpec& b) {
    const auto e = squid_eigensystem(p, b, levels).energies;
    return Eigen::VectorXd(e.tail(levels - 1).array() - e(0));
  };

  while (true) {
    const ChargeBasisSpec doubled{2 * basis.cutoff, false};
    if (doubled.cutoff > options.max_cutoff) {
      throw SolverError("charge cutoff did not converge below " + std::to_string(options.max_cutoff));
    }
    double change = 0.0;
    for (const auto& p : probes)
      change = std::max(change, (transitions(p, basis) - transitions(p, doubled)).cwiseAbs().maxCoeff());
    if (change < options.tolerance) {
      basis.converged = true;
      return basis;
    }
    basis = doubled;
  }
}

double Spectrum::omega(std::size_t flux_index, std::size_t gate_index, int i, int j) const {
  const auto& e = at(flux_index, gate_index);
  return e(i) - e(j);
}

std::vector<Spectrum::Row> Spectrum::rows() const {
  std::vector<Row> out;
  for (std::size_t f = 0; f < flux.size(); ++f)
    for (std::size_t g = 0; g < gate.size(); ++g)
      for (int j = 0; j <= 1; ++j)
        for (int i = j + 1; i < levels; ++i) out.push_back({flux[f], gate[g], i, j, omega(f, g, i, j)});
  return out;
}

Spectrum transition_spectrum(const SquidParams& params, const std::vector<double>& flux_phi0,
                             const std::vector<double>& gate_charges, int levels,
                             const SpectrumOptions& options) {
  require(!flux_phi0.empty(), "flux grid must be non-empty");
  require(!gate_charges.empty(), "gate-charge list must be non-empty");
  require(levels >= 2, "need at least two levels");
  for (double f : flux_phi0) require(std::isfinite(f), "flux grid must be finite");

  Spectrum s;
  s.flux = flux_phi0;
  s.gate = gate_charges;
  s.levels = levels;
  s.basis = options.basis ? *options.basis : select_cutoff(params, levels);
  require(levels <= s.basis.dimension(), "more levels requested than basis states");

  const std::size_t n_gate = gate_charges.size();
  s.energies = indexed_map(
      flux_phi0.size() * n_gate,
      [&](std::size_t k) -> Eigen::VectorXd {
        const double flux = flux_phi0[k / n_gate];
        const double ng = gate_charges[k % n_gate];
        try {
          return squid_eigensystem(params.with_flux(flux).with_gate(ng), s.basis, levels).energies;
        } catch (const SolverError& e) {
          std::ostringstream msg;
          msg << e.what() << " (at flux_phi0=" << flux << ", n_g=" << ng << ")";
          throw SolverError(msg.str());
        }
      },
      options.execution);
  return s;
}

}  // namespace squidharm
