#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "squidharm/constants.hpp"
#include "squidharm/error.hpp"
#include "squidharm/observables.hpp"
#include "squidharm/spectrum.hpp"

using namespace squidharm;
namespace c = squidharm::constants;

namespace {

// Chip A rows with the inductive ratio E_J1 / 4 E_L.
SquidParams device(double E_C, double E_J1, double asym_percent) {
  SquidParams p;
  p.E_C = E_C;
  p.E_J1_L = E_J1;
  p.dE_J = asymmetry_to_dEJ(asym_percent / 100.0);
  p.alpha = E_J1 / (4.0 * c::inductive_energy_ghz(10.0));
  return p;
}
SquidParams two_micron() { return device(0.161, 84.0, 0.74); }
SquidParams six_micron() { return device(0.0956, 231.0, 0.33); }

// Second-order pull from an independently built charge-basis Hamiltonian.
double pull_oracle(const SquidParams& p, int cutoff, int levels, double w_r, double g) {
  const auto U = build_squid_potential(p);
  const Eigen::MatrixXcd H =
      oracle::grid_fourier_hamiltonian([&](double phi) { return U.value(phi); }, p.E_C, p.n_g, cutoff);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  Eigen::VectorXd n(2 * cutoff + 1);
  for (int k = 0; k < n.size(); ++k) n(k) = k - cutoff;
  const Eigen::MatrixXcd N = es.eigenvectors().adjoint() * n.cast<std::complex<double>>().asDiagonal() * es.eigenvectors();
  double s = 0.0;
  for (int i = 1; i < levels; ++i) {
    const double w = es.eigenvalues()(i) - es.eigenvalues()(0);
    s += std::norm(N(i, 0)) * (-2.0 * w) / (w * w - w_r * w_r);
  }
  return g * g * s;
}

}  // namespace

TEST(Dispersive, ZeroCouplingGivesZeroShift) {
  const auto cmp = dispersive_sweep(two_micron(), {0.45, 0.48}, 7.5657, 0.0);
  for (double s : cmp.perturbative.shift) EXPECT_NEAR(s, 0.0, 1e-12);
  for (double s : cmp.exact.shift) EXPECT_NEAR(s, 0.0, 1e-12);
  for (double s : cmp.exact.device_shift) EXPECT_NEAR(s, 0.0, 1e-12);
}

TEST(Dispersive, PerturbativeMatchesIndependentSum) {
  const auto p = two_micron().with_flux(0.46);
  const ChargeBasisSpec basis{30, false};
  const auto dev = squid_eigensystem(p, basis, 12, true);
  const double lib = dispersive_shift(dev, basis, 7.5657, 0.052);
  EXPECT_NEAR(lib / pull_oracle(p, 30, 12, 7.5657, 0.052), 1.0, 1e-9);
}

TEST(Dispersive, ExactAgreesAtWeakCoupling) {
  const auto cmp = dispersive_sweep(two_micron(), {0.44, 0.46}, 7.5657, 0.002);
  for (std::size_t k = 0; k < 2; ++k)
    EXPECT_NEAR(cmp.exact.shift[k] / cmp.perturbative.shift[k], 1.0, 0.02) << k;
}

TEST(Dispersive, LevelCapConverged) {
  DispersiveOptions a, b;
  a.level_cap = 10;
  b.level_cap = 20;
  const auto x = dispersive_sweep(two_micron(), {0.45}, 7.5657, 0.052, a);
  const auto y = dispersive_sweep(two_micron(), {0.45}, 7.5657, 0.052, b);
  EXPECT_NEAR(x.perturbative.shift[0] / y.perturbative.shift[0], 1.0, 0.01);
}

TEST(Dispersive, WarnsNearResonance) {
  const auto p = two_micron().with_flux(0.45);
  const ChargeBasisSpec basis{30, false};
  const auto dev = squid_eigensystem(p, basis, 6, true);
  std::vector<std::string> w;
  dispersive_shift(dev, basis, dev.energies(1) - dev.energies(0) + 0.1, 0.052, 0, &w);
  EXPECT_FALSE(w.empty());
}

TEST(ChargeDispersion, VanishesDeepInTransmonRegime) {
  EXPECT_LT(charge_dispersion(six_micron(), 0.0, 1), 1e-6);
}

TEST(ChargeDispersion, FreeRotorIsAnalytic) {
  SquidParams p;
  p.E_C = 0.2;
  const auto at0 = oracle::rotor_levels(0.2, 0.0, 4), at_half = oracle::rotor_levels(0.2, 0.5, 4);
  for (int level = 1; level <= 3; ++level) {
    const double ref = std::abs((at_half[level] - at_half[0]) - (at0[level] - at0[0]));
    EXPECT_NEAR(charge_dispersion(p, 0.0, level, ChargeBasisSpec{24, false}), ref, 1e-12) << level;
  }
}

TEST(ChargeDispersion, HigherLevelsMoreSensitiveNearHalfFlux) {
  const auto p = two_micron();
  EXPECT_GT(charge_dispersion(p, 0.5, 3), charge_dispersion(p, 0.5, 1));
}

TEST(Supercurrent, CriticalCurrentOfSingleCosine) {
  HarmonicPotential u;
  u.add(1, -244.0);
  const auto I = supercurrent(u, {c::pi / 2});
  EXPECT_NEAR(I[0], 244.0 * c::current_ua_per_ghz, 1e-12);
  EXPECT_NEAR(I[0], 0.4913, 1e-3);
}

TEST(Supercurrent, ZeroPotentialCarriesNoCurrent) {
  HarmonicPotential u;
  for (double i : supercurrent(u, {0.3, 1.0, 2.0})) EXPECT_EQ(i, 0.0);
  EXPECT_THROW(rectification_efficiency(u), InvalidArgument);
}

TEST(Supercurrent, DerivativesMatchFiniteDifferences) {
  const auto U = build_squid_potential(six_micron().with_flux(0.47));
  auto f = [&](double x) { return U.value(x); };
  auto d1 = [&](double x) { return potential_derivative(U, x, 1); };
  for (double phi : {0.1, 1.3, 2.9, 4.4}) {
    EXPECT_NEAR(potential_derivative(U, phi, 1), oracle::derivative(f, phi, 1e-3), 1e-8 * 462.0);
    EXPECT_NEAR(potential_derivative(U, phi, 2), oracle::derivative(d1, phi, 1e-3), 1e-8 * 462.0);
  }
}

TEST(Supercurrent, AveragesToZeroOverPeriod) {
  const auto U = build_squid_potential(six_micron().with_flux(0.43));
  const auto I = supercurrent(U, periodic_grid(256));
  EXPECT_NEAR(std::accumulate(I.begin(), I.end(), 0.0) / 256.0, 0.0, 1e-12);
}

TEST(Diode, PureCosineHasNoRectification) {
  HarmonicPotential u;
  u.add(1, -100.0);
  const auto e = rectification_efficiency(u);
  EXPECT_NEAR(e.eta, 0.0, 1e-12);
  EXPECT_NEAR(e.I_max, 100.0 * c::current_ua_per_ghz, 1e-10);
}

TEST(Diode, VanishesAtHalfFluxAndFlipsSign) {
  const auto p = six_micron();
  EXPECT_NEAR(rectification_efficiency(build_squid_potential(p.with_flux(0.5))).eta, 0.0, 1e-10);
  const double a = rectification_efficiency(build_squid_potential(p.with_flux(0.48))).eta;
  const double b = rectification_efficiency(build_squid_potential(p.with_flux(-0.48))).eta;
  EXPECT_GT(std::abs(a), 1e-3);
  EXPECT_NEAR(a, -b, 1e-10);
}

TEST(Diode, ExtremaAgreeWithDenseGrid) {
  const auto U = build_squid_potential(six_micron().with_flux(0.495));
  const auto e = rectification_efficiency(U, 1024);
  const auto I = supercurrent(U, periodic_grid(1 << 18));
  EXPECT_NEAR(e.I_max, *std::max_element(I.begin(), I.end()), 1e-9);
  EXPECT_NEAR(e.I_min, *std::min_element(I.begin(), I.end()), 1e-9);
}

TEST(Diode, ScanShapes) {
  const auto r = diode_scan(six_micron(), {0.49, 0.499, 0.5}, 1024);
  ASSERT_EQ(r.eta.size(), 3u);
  EXPECT_GT(std::abs(r.eta[1]), 0.2);
  EXPECT_NEAR(r.eta[2], 0.0, 1e-10);
}

TEST(PhaseExport, FreeRotorDensityIsUniform) {
  SquidParams p;
  p.E_C = 0.2;
  const auto ex = export_potential_and_wavefunctions(p, periodic_grid(64), 1, ChargeBasisSpec{8, false});
  for (double d : ex.density[0]) EXPECT_NEAR(d, 1.0 / (2.0 * c::pi), 1e-12);
  EXPECT_NEAR(ex.normalization[0], 1.0, 1e-12);
}

TEST(PhaseExport, NormalizedAndPotentialSampled) {
  const auto p = two_micron().with_flux(0.47);
  const auto phi = periodic_grid(512, -c::pi);
  const auto ex = export_potential_and_wavefunctions(p, phi, 3);
  const auto U = build_squid_potential(p);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(ex.normalization[k], 1.0, 1e-9);
  EXPECT_NEAR(ex.potential[100], U.value(phi[100]), 1e-12);
}

TEST(PhaseExport, DeepWellGroundStateIsUnimodal) {
  const auto phi = periodic_grid(512, -c::pi);
  const auto ex = export_potential_and_wavefunctions(six_micron().with_flux(0.0), phi, 1);
  int peaks = 0;
  const auto& d = ex.density[0];
  const double floor = 1e-6 * *std::max_element(d.begin(), d.end());
  for (std::size_t k = 0; k < d.size(); ++k)
    if (d[k] > floor && d[k] > d[(k + 1) % d.size()] && d[k] > d[(k + d.size() - 1) % d.size()]) ++peaks;
  EXPECT_EQ(peaks, 1);
}

TEST(PhaseExport, HalfFluxGroundStateSharesBothWells) {
  const auto p = six_micron().with_flux(0.5);
  ASSERT_TRUE(double_well_expected(p.delta_E_J1(), p.sigma_E_J2()));
  ASSERT_EQ(count_wells(build_squid_potential(p)), 2);
  const auto phi = periodic_grid(1024, -c::pi);
  const auto ex = export_potential_and_wavefunctions(p, phi, 1);
  const auto w = well_weights(phi, ex.potential, ex.density[0]);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_NEAR(w[0] + w[1], 1.0, 1e-9);
  EXPECT_NEAR(w[0], 0.5, 1e-6);
}

TEST(DoubleWell, Criterion) {
  EXPECT_TRUE(double_well_expected(1.52, 1.63));
  EXPECT_FALSE(double_well_expected(7.0, 1.63));
  EXPECT_FALSE(double_well_expected(0.0, 1.63));
}

TEST(AvoidedCrossings, ReportedGapsAreLocalMinima) {
  auto p = two_micron();
  p.n_g = 0.5;
  std::vector<double> flux;
  for (int k = 0; k <= 40; ++k) flux.push_back(0.4 + 0.005 * k);
  const auto found = avoided_crossings(p, flux, 1);
  EXPECT_FALSE(found.empty());
  const ChargeBasisSpec basis = select_cutoff(p, 4);
  auto gap = [&](double f, int lower) {
    const auto e = squid_eigensystem(p.with_flux(f), basis, 4).energies;
    return e(lower + 1) - e(lower);
  };
  for (const auto& a : found) {
    EXPECT_NEAR(a.gap, gap(a.flux_phi0, a.lower), 1e-9);
    EXPECT_LE(a.gap, gap(a.flux_phi0 - 0.005, a.lower));
    EXPECT_LE(a.gap, gap(a.flux_phi0 + 0.005, a.lower));
  }
}
