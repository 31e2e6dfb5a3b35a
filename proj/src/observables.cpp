#include "squidharm/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "squidharm/constants.hpp"
#include "squidharm/error.hpp"
#include "squidharm/multimode.hpp"
#include "squidharm/spectrum.hpp"

namespace squidharm {

namespace c = constants;

std::string to_string(DispersiveMethod m) {
  return m == DispersiveMethod::perturbative ? "perturbative" : "exact-dressed";
}

namespace {

Eigen::MatrixXcd charge_matrix(const EigenSystem& device, const ChargeBasisSpec& basis) {
  const Eigen::VectorXd n = charge_diagonal(basis);
  return device.states.adjoint() * n.cast<std::complex<double>>().asDiagonal() * device.states;
}

double pull(const Eigen::MatrixXcd& n, const Eigen::VectorXd& energies, double omega_r, double g_c, int state) {
  double sum = 0.0;
  for (int i = 0; i < energies.size(); ++i) {
    if (i == state) continue;
    const double w = energies(i) - energies(state);
    sum += std::norm(n(i, state)) * (-2.0 * w) / (w * w - omega_r * omega_r);
  }
  return g_c * g_c * sum;
}

void resonance_guard(const Eigen::VectorXd& energies, double omega_r, double g_c, int state,
                     std::vector<std::string>* warnings, double flux_phi0 = std::nan("")) {
  if (!warnings) return;
  for (int i = 0; i < energies.size(); ++i) {
    if (i == state) continue;
    const double w = std::abs(energies(i) - energies(state));
    if (std::abs(w - omega_r) < 10.0 * std::abs(g_c)) {
      std::ostringstream msg;
      msg << "transition " << i << "<->" << state << " at " << w << " GHz lies within 10 g_c of the resonator";
      if (!std::isnan(flux_phi0)) msg << " (flux_phi0=" << flux_phi0 << ")";
      warnings->push_back(msg.str());
    }
  }
}

}  // namespace

double dispersive_shift(const EigenSystem& device, const ChargeBasisSpec& basis, double omega_r, double g_c,
                        int state, std::vector<std::string>* warnings) {
  require(device.has_states(), "device eigensystem must carry eigenvectors");
  require(state >= 0 && state < device.size(), "state index out of range");
  require(std::isfinite(omega_r) && omega_r > 0.0 && std::isfinite(g_c), "invalid resonator parameters");
  resonance_guard(device.energies, omega_r, g_c, state, warnings);
  return pull(charge_matrix(device, basis), device.energies, omega_r, g_c, state);
}

DispersiveComparison dispersive_sweep(const SquidParams& params, const std::vector<double>& flux_phi0,
                                      double omega_r, double g_c, const DispersiveOptions& options) {
  params.validate();
  require(!flux_phi0.empty(), "flux grid must be non-empty");
  require(options.level_cap >= 2, "level cap must be at least 2");
  require(options.state >= 0 && options.state < options.level_cap, "state outside the level cap");
  require(options.tracked_levels >= 1 && options.tracked_levels <= options.level_cap, "tracked levels out of range");
  const ChargeBasisSpec basis = options.basis ? *options.basis : select_cutoff(params, std::min(options.level_cap, 8));

  struct Point {
    double perturbative, exact, device_shift;
    std::vector<std::string> warnings;
  };
  auto evaluate = [&](std::size_t k) {
    Point p;
    const SquidParams at = params.with_flux(flux_phi0[k]);
    const EigenSystem device = squid_eigensystem(at, basis, options.level_cap, true);
    resonance_guard(device.energies, omega_r, g_c, options.state, &p.warnings, flux_phi0[k]);
    const Eigen::MatrixXcd n = charge_matrix(device, basis);
    p.perturbative = pull(n, device.energies, omega_r, g_c, options.state);

    const CoupledSystem system = coupled_resonator_hamiltonian(device, basis, omega_r, g_c, options.photon_cutoff);
    const EigenSystem dressed = eigensolve_dense(system.hamiltonian, static_cast<int>(system.hamiltonian.rows()));
    const int s0 = identify_dressed_state(dressed, system, options.state, 0);
    const int s1 = identify_dressed_state(dressed, system, options.state, 1);
    p.exact = dressed.energies(s1) - dressed.energies(s0) - omega_r;

    const int g0 = identify_dressed_state(dressed, system, 0, 0);
    double worst = 0.0;
    for (int i = 1; i < options.tracked_levels; ++i) {
      const int di = identify_dressed_state(dressed, system, i, 0);
      const double dressed_w = dressed.energies(di) - dressed.energies(g0);
      worst = std::max(worst, std::abs(dressed_w - (device.energies(i) - device.energies(0))));
    }
    p.device_shift = worst;
    return p;
  };
  const auto points = indexed_map(flux_phi0.size(), evaluate, options.execution);

  DispersiveComparison out;
  for (auto* r : {&out.perturbative, &out.exact}) {
    r->flux = flux_phi0;
    r->omega_r = omega_r;
    r->g_c = g_c;
    r->state = options.state;
  }
  out.perturbative.method = DispersiveMethod::perturbative;
  out.exact.method = DispersiveMethod::exact_dressed;
  for (const auto& p : points) {
    out.perturbative.shift.push_back(p.perturbative);
    out.exact.shift.push_back(p.exact);
    out.exact.device_shift.push_back(p.device_shift);
    out.perturbative.warnings.insert(out.perturbative.warnings.end(), p.warnings.begin(), p.warnings.end());
  }
  return out;
}

double charge_dispersion(const SquidParams& params, double flux_phi0, int level, std::optional<ChargeBasisSpec> basis) {
  params.validate();
  require(level >= 1, "level must be at least 1");
  const ChargeBasisSpec b = basis ? *basis : select_cutoff(params, level + 1);
  const SquidParams at = params.with_flux(flux_phi0);
  const auto e0 = squid_eigensystem(at.with_gate(0.0), b, level + 1).energies;
  const auto e5 = squid_eigensystem(at.with_gate(0.5), b, level + 1).energies;
  return std::abs((e5(level) - e5(0)) - (e0(level) - e0(0)));
}

double potential_derivative(const HarmonicPotential& u, double phi, int order) {
  require(order >= 0, "derivative order must be nonnegative");
  double sum = 0.0;
  for (const auto& t : u.terms()) {
    const double k = t.order;
    sum += t.coefficient * std::pow(k, order) * std::cos(k * (phi - t.offset) + order * c::pi / 2.0);
  }
  return sum;
}

std::vector<double> supercurrent(const HarmonicPotential& u, const std::vector<double>& phi) {
  std::vector<double> out;
  out.reserve(phi.size());
  for (double p : phi) out.push_back(c::current_ua_per_ghz * potential_derivative(u, p, 1));
  return out;
}

namespace {

// Refines an extremum of dU/dphi near grid point `k`.
double refine_extremum(const HarmonicPotential& u, const std::vector<double>& grid, const std::vector<double>& values,
                       std::size_t k) {
  const std::size_t n = grid.size();
  const double h = grid[1] - grid[0];
  const double ym = values[(k + n - 1) % n], y0 = values[k], yp = values[(k + 1) % n];
  const double denom = ym - 2.0 * y0 + yp;
  double x = grid[k];
  if (denom != 0.0) x += 0.5 * h * (ym - yp) / denom;
  for (int it = 0; it < 50; ++it) {
    const double f = potential_derivative(u, x, 2);
    const double fp = potential_derivative(u, x, 3);
    if (fp == 0.0) break;
    const double step = f / fp;
    if (std::abs(step) > h) break;
    x -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return x;
}

}  // namespace

CurrentExtrema rectification_efficiency(const HarmonicPotential& u, int grid_points) {
  require(grid_points >= 1024, "grid needs at least 1024 points over one period");
  double scale = 0.0;
  for (const auto& t : u.terms()) scale += std::abs(t.coefficient) * t.order;
  if (scale == 0.0) throw InvalidArgument("flat potential carries no supercurrent");

  const std::vector<double> grid = periodic_grid(grid_points);
  std::vector<double> i(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) i[k] = potential_derivative(u, grid[k], 1);
  const auto kmax = static_cast<std::size_t>(std::max_element(i.begin(), i.end()) - i.begin());
  const auto kmin = static_cast<std::size_t>(std::min_element(i.begin(), i.end()) - i.begin());

  CurrentExtrema out;
  out.phi_max = refine_extremum(u, grid, i, kmax);
  out.phi_min = refine_extremum(u, grid, i, kmin);
  out.I_max = std::max(c::current_ua_per_ghz * potential_derivative(u, out.phi_max, 1),
                       c::current_ua_per_ghz * i[kmax]);
  out.I_min = std::min(c::current_ua_per_ghz * potential_derivative(u, out.phi_min, 1),
                       c::current_ua_per_ghz * i[kmin]);
  if (out.I_max <= 0.0 && out.I_min >= 0.0) throw InvalidArgument("flat potential carries no supercurrent");
  out.eta = (std::abs(out.I_max) - std::abs(out.I_min)) / (std::abs(out.I_max) + std::abs(out.I_min));
  return out;
}

DiodeReport diode_scan(const SquidParams& params, const std::vector<double>& flux_phi0, int grid_points,
                       Execution execution) {
  params.validate();
  require(!flux_phi0.empty(), "flux grid must be non-empty");
  const auto results = indexed_map(
      flux_phi0.size(),
      [&](std::size_t k) { return rectification_efficiency(build_squid_potential(params.with_flux(flux_phi0[k])), grid_points); },
      execution);
  DiodeReport r;
  r.flux = flux_phi0;
  r.grid_points = grid_points;
  for (const auto& e : results) {
    r.I_max.push_back(e.I_max);
    r.I_min.push_back(e.I_min);
    r.eta.push_back(e.eta);
  }
  return r;
}

std::vector<double> periodic_grid(int points, double start) {
  require(points >= 2, "grid needs at least two points");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = start + c::two_pi * k / points;
  return g;
}

namespace {

bool uniform_periodic(const std::vector<double>& phi) {
  if (phi.size() < 3) return false;
  const double h = c::two_pi / static_cast<double>(phi.size());
  for (std::size_t k = 1; k < phi.size(); ++k)
    if (std::abs(phi[k] - phi[k - 1] - h) > 1e-9 * h) return false;
  return true;
}

}  // namespace

PhaseExport export_potential_and_wavefunctions(const SquidParams& params, const std::vector<double>& phi, int levels,
                                               std::optional<ChargeBasisSpec> basis) {
  params.validate();
  require(!phi.empty(), "phase grid must be non-empty");
  require(levels >= 1, "need at least one level");
  const ChargeBasisSpec b = basis ? *basis : select_cutoff(params, std::max(levels, 2));
  const EigenSystem sys = squid_eigensystem(params, b, levels, true);
  const HarmonicPotential u = build_squid_potential(params);

  PhaseExport out;
  out.phi = phi;
  out.energies = sys.energies;
  for (double p : phi) out.potential.push_back(u.value(p));

  const double norm = 1.0 / std::sqrt(c::two_pi);
  const bool periodic = uniform_periodic(phi);
  for (int i = 0; i < levels; ++i) {
    std::vector<double> rho;
    rho.reserve(phi.size());
    for (double p : phi) {
      std::complex<double> psi = 0.0;
      for (int idx = 0; idx < b.dimension(); ++idx)
        psi += sys.states(idx, i) * std::polar(1.0, b.charge(idx) * p);
      rho.push_back(std::norm(psi * norm));
    }
    double integral = 0.0;
    if (periodic) {
      for (double r : rho) integral += r;
      integral *= c::two_pi / static_cast<double>(phi.size());
    } else {
      integral = sys.states.col(i).squaredNorm();
    }
    out.density.push_back(std::move(rho));
    out.normalization.push_back(integral);
  }
  return out;
}

int count_wells(const HarmonicPotential& u, int grid_points) {
  require(grid_points >= 8, "grid too coarse");
  const auto g = periodic_grid(grid_points);
  std::vector<double> v;
  for (double p : g) v.push_back(u.value(p));
  const std::size_t n = v.size();
  int wells = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (v[k] < v[(k + n - 1) % n] && v[k] < v[(k + 1) % n]) ++wells;
  return wells;
}

bool double_well_expected(double delta_E_J1, double sigma_E_J2) {
  return delta_E_J1 > 0.0 && 4.0 * sigma_E_J2 > delta_E_J1;
}

std::vector<double> well_weights(const std::vector<double>& phi, const std::vector<double>& potential,
                                 const std::vector<double>& density) {
  require(phi.size() == potential.size() && phi.size() == density.size(), "sample vectors must match");
  require(uniform_periodic(phi), "well weights need a uniform periodic grid");
  const std::size_t n = phi.size();
  std::vector<std::size_t> maxima;
  for (std::size_t k = 0; k < n; ++k)
    if (potential[k] >= potential[(k + n - 1) % n] && potential[k] > potential[(k + 1) % n]) maxima.push_back(k);
  double total = 0.0;
  for (double d : density) total += d;
  if (maxima.size() < 2) return {1.0};

  std::vector<double> weights;
  for (std::size_t m = 0; m < maxima.size(); ++m) {
    const std::size_t start = maxima[m];
    const std::size_t stop = maxima[(m + 1) % maxima.size()];
    double sum = 0.0;
    for (std::size_t k = (start + 1) % n; k != stop; k = (k + 1) % n) sum += density[k];
    sum += 0.5 * (density[start] + density[stop]);
    weights.push_back(sum / total);
  }
  return weights;
}

std::vector<AvoidedCrossing> avoided_crossings(const SquidParams& params, const std::vector<double>& flux_phi0,
                                               int level, std::optional<ChargeBasisSpec> basis, Execution execution) {
  require(level >= 1, "level must be at least 1");
  require(flux_phi0.size() >= 3, "need at least three flux points");
  SpectrumOptions opts;
  opts.execution = execution;
  opts.basis = basis;
  const Spectrum s = transition_spectrum(params, flux_phi0, {params.n_g}, level + 2, opts);

  std::vector<AvoidedCrossing> out;
  for (int lower : {level - 1, level}) {
    std::vector<double> gap;
    for (std::size_t f = 0; f < flux_phi0.size(); ++f) gap.push_back(s.omega(f, 0, lower + 1, lower));
    for (std::size_t f = 1; f + 1 < gap.size(); ++f)
      if (gap[f] < gap[f - 1] && gap[f] < gap[f + 1]) out.push_back({flux_phi0[f], lower, gap[f]});
  }
  return out;
}

}  // namespace squidharm
