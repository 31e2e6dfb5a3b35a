#include "squidharm/multimode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "squidharm/constants.hpp"
#include "squidharm/error.hpp"
#include "squidharm/modes.hpp"
#include "squidharm/spectrum.hpp"

namespace squidharm {

using Eigen::MatrixXcd;
namespace c = constants;

namespace {

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

void check_dimension(double dimension, double cap) {
  if (dimension > cap) {
    std::ostringstream msg;
    msg << "Hilbert-space dimension " << dimension << " exceeds the cap " << cap;
    throw InvalidArgument(msg.str());
  }
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void FullSquidCircuit::validate() const {
  require(finite_positive(C_J_L) && finite_positive(C_J_R), "junction capacitances must be positive");
  require(finite_positive(C_sh), "shunt capacitance must be positive");
  require(finite_positive(L), "arm inductance must be positive");
  require(std::isfinite(E_J_L) && std::isfinite(E_J_R) && E_J_L >= 0.0 && E_J_R >= 0.0,
          "Josephson energies must be finite and nonnegative");
  require(std::abs(C_J_L - C_J_R) < 0.05 * C_J(), "junction capacitances must agree within 5%");
}

double FullSquidCircuit::E_C_theta() const { return c::charging_ghz_ff * (1.0 / C_sh + 1.0 / (2.0 * C_J())); }
double FullSquidCircuit::E_C_phi() const { return 2.0 * c::charging_ghz_ff / C_J(); }
double FullSquidCircuit::E_C_varphi() const { return 0.5 * c::charging_ghz_ff / C_J(); }
double FullSquidCircuit::J() const { return 4.0 * c::charging_ghz_ff / C_J(); }
double FullSquidCircuit::E_L() const { return c::inductive_energy_ghz(L); }
double FullSquidCircuit::E_C_total() const { return c::charging_ghz_ff / (C_sh + C_J_L + C_J_R); }

FullSquidCircuit FullSquidCircuit::from_device(double E_C, double E_J_L, double E_J_R, double L_pH, double C_sh_fF,
                                               double left_fraction) {
  require(finite_positive(E_C), "E_C must be positive");
  require(left_fraction > 0.0 && left_fraction < 1.0, "left fraction must lie in (0, 1)");
  const double total = c::capacitance_ff(E_C) - C_sh_fF;
  require(total > 0.0, "shunt capacitance exceeds the total capacitance implied by E_C");
  FullSquidCircuit circuit{left_fraction * total, (1.0 - left_fraction) * total, C_sh_fF, L_pH, E_J_L, E_J_R};
  circuit.validate();
  return circuit;
}

void TransmonInductorCircuit::validate() const {
  require(finite_positive(C) && finite_positive(C_J), "capacitances must be positive");
  require(finite_positive(L), "inductance must be positive");
  require(finite_positive(E_J), "E_J must be positive");
  require(std::isfinite(n_g), "n_g must be finite");
}

double TransmonInductorCircuit::E_C() const { return c::charging_energy_ghz(C); }
double TransmonInductorCircuit::E_CJ() const { return c::charging_energy_ghz(C_J); }
double TransmonInductorCircuit::E_L() const { return c::inductive_energy_ghz(L); }
double TransmonInductorCircuit::E_C_effective() const { return c::charging_energy_ghz(C + C_J); }

BlockTridiagonalHermitian full_squid_hamiltonian(const FullSquidCircuit& circuit, double phi_ext, double n_g,
                                                 const FullSquidDims& dims, double dimension_cap) {
  circuit.validate();
  require(std::isfinite(phi_ext) && std::isfinite(n_g), "flux and gate charge must be finite");
  const int cutoff =
      dims.charge_cutoff > 0 ? dims.charge_cutoff : cutoff_rule(circuit.E_J_L + circuit.E_J_R, circuit.E_C_total());
  check_dimension(static_cast<double>(dims.d_theta) * dims.d_phi * (2.0 * cutoff + 1.0), dimension_cap);

  const ModeOperators theta = mode_operators(circuit.E_C_theta(), 2.0 * circuit.E_L(), dims.d_theta);
  const ModeOperators phi = mode_operators(circuit.E_C_phi(), 0.5 * circuit.E_L(), dims.d_phi);
  const MatrixXcd id_t = MatrixXcd::Identity(dims.d_theta, dims.d_theta);
  const MatrixXcd id_p = MatrixXcd::Identity(dims.d_phi, dims.d_phi);
  auto product = [&](const MatrixXcd& t, const MatrixXcd& p) {
    return dims.theta_major ? kron(t, p) : kron(p, t);
  };

  const MatrixXcd shifted = phi.position + phi_ext * id_p;
  const MatrixXcd ch = trig_of_position(shifted, Trig::cos, 0.5);
  const MatrixXcd sh = trig_of_position(shifted, Trig::sin, 0.5);
  const std::complex<double> i(0.0, 1.0);
  // Coefficient of e^{i varphi}: -(E_R / 2) e^{-i phi / 2} - (E_L / 2) e^{i phi / 2}.
  const MatrixXcd hop = -0.5 * circuit.E_J_R * (ch - i * sh) - 0.5 * circuit.E_J_L * (ch + i * sh);

  const MatrixXcd oscillators =
      product(theta.quadratic_hamiltonian(), id_p) + product(id_t, phi.quadratic_hamiltonian());
  const MatrixXcd n_theta = product(theta.number, id_p);
  const MatrixXcd lower = product(id_t, hop);
  const int b = dims.d_theta * dims.d_phi;
  const MatrixXcd id = MatrixXcd::Identity(b, b);

  BlockTridiagonalHermitian H;
  H.block_size = b;
  for (int n = -cutoff; n <= cutoff; ++n) {
    const double q = n - n_g;
    MatrixXcd d = oscillators + 4.0 * circuit.E_C_varphi() * q * q * id - circuit.J() * q * n_theta;
    H.diagonal.push_back((d + d.adjoint()) / 2.0);
    if (n < cutoff) H.lower.push_back(lower);
  }
  return H;
}

BlockTridiagonalHermitian transmon_inductor_hamiltonian(const TransmonInductorCircuit& circuit,
                                                        const TransmonInductorDims& dims, double dimension_cap) {
  circuit.validate();
  const int cutoff = dims.charge_cutoff > 0 ? dims.charge_cutoff : cutoff_rule(circuit.E_J, circuit.E_C_effective());
  check_dimension(static_cast<double>(dims.d_L) * (2.0 * cutoff + 1.0), dimension_cap);

  const ModeOperators mode = mode_operators(circuit.E_C() + circuit.E_CJ(), circuit.E_L(), dims.d_L);
  const MatrixXcd cl = trig_of_position(mode.position, Trig::cos, 1.0);
  const MatrixXcd sl = trig_of_position(mode.position, Trig::sin, 1.0);
  const std::complex<double> i(0.0, 1.0);
  // Coefficient of e^{i phi}: -(E_J / 2) e^{-i phi_L}.
  const MatrixXcd hop = -0.5 * circuit.E_J * (cl - i * sl);
  const MatrixXcd id = MatrixXcd::Identity(dims.d_L, dims.d_L);
  const MatrixXcd quad = mode.quadratic_hamiltonian();

  BlockTridiagonalHermitian H;
  H.block_size = dims.d_L;
  for (int n = -cutoff; n <= cutoff; ++n) {
    const double q = n - circuit.n_g;
    MatrixXcd d = quad + 4.0 * circuit.E_C() * q * q * id + 8.0 * circuit.E_C() * q * mode.number;
    H.diagonal.push_back((d + d.adjoint()) / 2.0);
    if (n < cutoff) H.lower.push_back(hop);
  }
  return H;
}

SquidParams second_harmonic_model(const FullSquidCircuit& circuit) {
  circuit.validate();
  SquidParams p;
  p.E_C = circuit.E_C_total();
  p.E_J1_L = circuit.E_J_L;
  p.dE_J = circuit.E_J_L > 0.0 ? 1.0 - circuit.E_J_R / circuit.E_J_L : 0.0;
  p.alpha = circuit.E_J_L / (4.0 * circuit.E_L());
  p.alpha_right = circuit.E_J_R / (4.0 * circuit.E_L());
  p.validate();
  return p;
}

SingleModeModel second_harmonic_model(const TransmonInductorCircuit& circuit) {
  circuit.validate();
  SingleModeModel m;
  m.potential.add(1, -circuit.E_J);
  m.potential.add(2, circuit.E_J * circuit.E_J / (4.0 * circuit.E_L()));
  m.E_C = circuit.E_C_effective();
  m.n_g = circuit.n_g;
  return m;
}

CoupledSystem coupled_resonator_hamiltonian(const EigenSystem& device, const ChargeBasisSpec& basis,
                                            double omega_r, double g_c, int photon_cutoff) {
  require(device.has_states(), "device eigensystem must carry eigenvectors");
  require(device.states.rows() == basis.dimension(), "device states do not match the charge basis");
  require(photon_cutoff >= 3, "photon cutoff must be at least 3");
  require(std::isfinite(omega_r) && omega_r > 0.0, "resonator frequency must be positive");
  require(std::isfinite(g_c), "coupling must be finite");

  CoupledSystem s;
  s.device = device;
  s.device_levels = device.size();
  s.photon_cutoff = photon_cutoff;
  s.omega_r = omega_r;
  s.g_c = g_c;
  const Eigen::VectorXd n = charge_diagonal(basis);
  s.n_matrix = device.states.adjoint() * n.cast<std::complex<double>>().asDiagonal() * device.states;

  const int p = photon_cutoff + 1;
  MatrixXcd a = MatrixXcd::Zero(p, p);
  for (int k = 1; k < p; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  MatrixXcd number = MatrixXcd::Zero(p, p);
  for (int k = 0; k < p; ++k) number(k, k) = k;
  const MatrixXcd id_r = MatrixXcd::Identity(p, p);
  const MatrixXcd id_q = MatrixXcd::Identity(s.device_levels, s.device_levels);
  const MatrixXcd e = device.energies.cast<std::complex<double>>().asDiagonal();

  s.hamiltonian = kron(e, id_r) + omega_r * kron(id_q, number) + g_c * kron(s.n_matrix, a + a.adjoint());
  s.hamiltonian = (s.hamiltonian + s.hamiltonian.adjoint()).eval() / 2.0;
  return s;
}

CoupledSystem coupled_resonator_hamiltonian(const SquidParams& params, double omega_r, double g_c,
                                            const CoupledDims& dims) {
  params.validate();
  require(dims.device_levels >= 2, "need at least two device levels");
  const ChargeBasisSpec basis = select_cutoff(params, std::min(dims.device_levels, 8));
  const EigenSystem device = squid_eigensystem(params, basis, dims.device_levels, true);
  return coupled_resonator_hamiltonian(device, basis, omega_r, g_c, dims.photon_cutoff);
}

int identify_dressed_state(const EigenSystem& dressed, const CoupledSystem& system, int level, int photons,
                           double margin) {
  require(dressed.has_states(), "dressed eigensystem must carry eigenvectors");
  require(level >= 0 && level < system.device_levels, "device level out of range");
  require(photons >= 0 && photons <= system.photon_cutoff, "photon number out of range");
  const int row = system.index(level, photons);
  Eigen::Index best = 0;
  const double weight = dressed.states.row(row).cwiseAbs2().maxCoeff(&best);
  if (weight <= 0.5 + margin) {
    std::ostringstream msg;
    msg << "ambiguous dressed-state assignment for |" << level << ">_q|" << photons << ">_r (best weight " << weight
        << ")";
    throw SolverError(msg.str());
  }
  return static_cast<int>(best);
}

DressedSpectrum dressed_spectrum(const CoupledSystem& system, int levels) {
  require(levels >= 1 && levels <= system.device_levels, "level count out of range");
  const EigenSystem dressed = eigensolve_dense(system.hamiltonian, static_cast<int>(system.hamiltonian.rows()));
  DressedSpectrum out;
  out.bare = system.device.energies.head(levels);
  out.dressed.resize(levels);

  auto top_population = [&](int k) {
    double pop = 0.0;
    for (int q = 0; q < system.device_levels; ++q) pop += std::norm(dressed.states(system.index(q, system.photon_cutoff), k));
    return pop;
  };
  auto record = [&](int k) { out.max_top_photon_population = std::max(out.max_top_photon_population, top_population(k)); };

  for (int i = 0; i < levels; ++i) {
    const int k = identify_dressed_state(dressed, system, i, 0);
    out.dressed(i) = dressed.energies(k);
    record(k);
  }
  const int g = identify_dressed_state(dressed, system, 0, 0);
  const int one = identify_dressed_state(dressed, system, 0, 1);
  out.resonator_ground = dressed.energies(g);
  out.resonator_one = dressed.energies(one);
  record(one);
  if (out.max_top_photon_population > 1e-6) {
    std::ostringstream msg;
    msg << "photon cutoff " << system.photon_cutoff << " too small: top-level population "
        << out.max_top_photon_population;
    out.warnings.push_back(msg.str());
  }
  return out;
}

double DiscrepancyTable::overall_max() const {
  return max_abs.empty() ? 0.0 : *std::max_element(max_abs.begin(), max_abs.end());
}

namespace {

Eigen::VectorXd transitions_of(const Eigen::VectorXd& energies, int count) {
  return energies.segment(1, count).array() - energies(0);
}

}  // namespace

DiscrepancyTable model_discrepancy(const FullSquidCircuit& circuit, const std::vector<double>& flux_phi0, double n_g,
                                   int transitions, const MultimodeOptions& options) {
  require(!flux_phi0.empty(), "flux grid must be non-empty");
  require(transitions >= 1, "need at least one transition");
  const SquidParams approx = second_harmonic_model(circuit);
  const ChargeBasisSpec basis = select_cutoff(approx, transitions + 1);

  struct Point {
    Eigen::VectorXd full, approx;
  };
  auto evaluate = [&](std::size_t k) {
    const double f = flux_phi0[k];
    try {
      const auto H = full_squid_hamiltonian(circuit, c::reduced_flux(f), n_g, options.full_dims, options.dimension_cap);
      LanczosOptions lo;
      const auto full = lowest_eigenpairs(H, transitions + 1, lo);
      const auto single = squid_eigensystem(approx.with_flux(f).with_gate(n_g), basis, transitions + 1);
      return Point{transitions_of(full.energies, transitions), transitions_of(single.energies, transitions)};
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << e.what() << " (at flux_phi0=" << f << ", n_g=" << n_g << ")";
      if (e.kind() == ErrorKind::no_convergence) throw ConvergenceError(msg.str());
      if (e.kind() == ErrorKind::invalid_argument) throw InvalidArgument(msg.str());
      throw SolverError(msg.str());
    }
  };
  const auto points = indexed_map(flux_phi0.size(), evaluate, options.execution);

  DiscrepancyTable table;
  table.flux = flux_phi0;
  table.transitions = transitions;
  for (const auto& p : points) {
    table.full.push_back(p.full);
    table.approx.push_back(p.approx);
    table.max_abs.push_back((p.full - p.approx).cwiseAbs().maxCoeff());
  }
  return table;
}

DiscrepancyTable model_discrepancy(const TransmonInductorCircuit& circuit, int transitions,
                                   const MultimodeOptions& options) {
  require(transitions >= 1, "need at least one transition");
  const auto H = transmon_inductor_hamiltonian(circuit, options.transmon_dims, options.dimension_cap);
  const auto full = lowest_eigenpairs(H, transitions + 1);

  const SingleModeModel model = second_harmonic_model(circuit);
  int cutoff = cutoff_rule(circuit.E_J, model.E_C);
  Eigen::VectorXd single;
  for (;; cutoff *= 2) {
    const ChargeBasisSpec basis{cutoff, false};
    const ChargeBasisSpec doubled{2 * cutoff, false};
    const auto a = eigensolve(hamiltonian_band(model.potential, model.E_C, model.n_g, basis), transitions + 1, false);
    const auto b = eigensolve(hamiltonian_band(model.potential, model.E_C, model.n_g, doubled), transitions + 1, false);
    single = b.energies;
    if ((transitions_of(a.energies, transitions) - transitions_of(b.energies, transitions)).cwiseAbs().maxCoeff() < 1e-9)
      break;
    if (cutoff > 4096) throw ConvergenceError("charge cutoff did not converge for the single-mode model");
  }

  DiscrepancyTable table;
  table.flux = {0.0};
  table.transitions = transitions;
  table.full.push_back(transitions_of(full.energies, transitions));
  table.approx.push_back(transitions_of(single, transitions));
  table.max_abs.push_back((table.full[0] - table.approx[0]).cwiseAbs().maxCoeff());
  return table;
}

}  // namespace squidharm
