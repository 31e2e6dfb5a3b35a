#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "squidharm/constants.hpp"
#include "squidharm/eigen.hpp"
#include "squidharm/error.hpp"
#include "squidharm/hamiltonian.hpp"
#include "squidharm/observables.hpp"
#include "squidharm/spectrum.hpp"
#include "squidharm/squid.hpp"

using namespace squidharm;
namespace c = squidharm::constants;

namespace {

SquidParams chip_a_6um() {
  SquidParams p;
  p.E_C = 0.0956;
  p.E_J1_L = 231.0;
  p.dE_J = asymmetry_to_dEJ(0.0033);
  p.alpha = 231.0 / (4.0 * c::inductive_energy_ghz(10.0));
  return p;
}

Eigen::VectorXd levels_of(const HarmonicPotential& u, double E_C, double n_g, int cutoff, int count) {
  return eigensolve(hamiltonian_band(u, E_C, n_g, {cutoff, false}), count, false).energies;
}

}  // namespace

TEST(Potential, MergesEqualOrderAndOffset) {
  HarmonicPotential u;
  u.add(1, -2.0, 0.3);
  u.add(1, -1.0, 0.3 + 2.0 * c::pi);
  u.add(2, 0.5, 0.0);
  u.add(2, 0.25, c::pi);  // cos 2(phi - pi) = cos 2 phi
  ASSERT_EQ(u.terms().size(), 2u);
  for (double phi : {0.0, 0.7, 2.1, -1.3})
    EXPECT_NEAR(u.value(phi), -3.0 * std::cos(phi - 0.3) + 0.75 * std::cos(2 * phi), 1e-13);
}

TEST(Potential, MergeIsCommutativeAndAssociative) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto random_potential = [&] {
    HarmonicPotential u;
    for (int k = 0; k < 3; ++k) u.add(1 + k % 3, U(rng), 3.0 * U(rng));
    return u;
  };
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_potential(), b = random_potential(), d = random_potential();
    const auto ab = merge(a, b), ba = merge(b, a);
    const auto left = merge(merge(a, b), d), right = merge(a, merge(b, d));
    for (double phi = 0.0; phi < 6.3; phi += 0.37) {
      EXPECT_NEAR(ab.value(phi), ba.value(phi), 1e-12);
      EXPECT_NEAR(left.value(phi), right.value(phi), 1e-12);
      EXPECT_NEAR(ab.value(phi), a.value(phi) + b.value(phi), 1e-12);
    }
  }
}

TEST(Potential, EmptySeriesIsFreeRotor) {
  HarmonicPotential u;
  EXPECT_TRUE(u.empty());
  EXPECT_EQ(u.value(1.2), 0.0);
  EXPECT_EQ(u.derivative(1.2), 0.0);
}

TEST(SquidPotential, BalancedHalfFluxCancelsFundamental) {
  SquidParams p;
  p.E_C = 0.1;
  p.E_J1_L = 50.0;
  p = p.with_flux(0.5);
  const auto u = build_squid_potential(p);
  for (double phi = 0.0; phi < 6.3; phi += 0.1) EXPECT_NEAR(u.value(phi), 0.0, 1e-12);
}

TEST(SquidPotential, HalfFluxFormUsesDeltaAndSigma) {
  const SquidParams p = chip_a_6um().with_flux(0.5);
  const auto u = build_squid_potential(p);
  const double dE = p.delta_E_J1(), S = p.sigma_E_J2();
  for (double phi = 0.0; phi < 6.3; phi += 0.1)
    EXPECT_NEAR(u.value(phi), -dE * std::cos(phi) + S * std::cos(2 * phi), 1e-10);
}

TEST(SquidPotential, ChipA6umDerivedHarmonics) {
  const SquidParams p = chip_a_6um();
  EXPECT_NEAR(p.dE_J, 0.00657829, 1e-8);
  EXPECT_NEAR(p.alpha, 3.5329e-3, 1e-7);
  EXPECT_NEAR(p.delta_E_J1(), 1.52, 0.005);
  EXPECT_NEAR(p.sigma_E_J2(), 1.63, 0.005);
}

TEST(SquidParams, ValidationRejectsOutOfRange) {
  SquidParams p = chip_a_6um();
  p.E_C = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = chip_a_6um();
  p.dE_J = 1.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = chip_a_6um();
  p.alpha = 0.3;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = chip_a_6um();
  p.E_J1_L = std::nan("");
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(SquidParams, AsymmetryConversionRoundTrips) {
  for (double a : {0.0, 0.0033, 0.0102, -0.02, 0.3}) EXPECT_NEAR(dEJ_to_asymmetry(asymmetry_to_dEJ(a)), a, 1e-15);
  // a = (E_L - E_R) / (E_L + E_R) with E_R = E_L (1 - dE_J)
  const double dE = asymmetry_to_dEJ(0.0102);
  EXPECT_NEAR((1.0 - (1.0 - dE)) / (1.0 + (1.0 - dE)), 0.0102, 1e-15);
}

TEST(Hamiltonian, FreeRotorDiagonal) {
  const ChargeBasisSpec basis{5, false};
  const auto H = hamiltonian_matrix(HarmonicPotential{}, 0.2, 0.0, basis);
  for (int r = 0; r < basis.dimension(); ++r)
    for (int col = 0; col < basis.dimension(); ++col) {
      const double n = basis.charge(r);
      EXPECT_EQ(H(r, col), r == col ? std::complex<double>(0.8 * n * n) : std::complex<double>(0.0));
    }
}

TEST(Hamiltonian, SingleCosineBand) {
  HarmonicPotential u;
  u.add(1, -30.0, 0.0);
  const auto H = hamiltonian_matrix(u, 0.2, 0.0, {6, false});
  for (int r = 0; r < H.rows(); ++r)
    for (int col = 0; col < H.cols(); ++col) {
      if (std::abs(r - col) == 1) {
        EXPECT_EQ(H(r, col), std::complex<double>(-15.0));
      } else if (r != col) {
        EXPECT_EQ(H(r, col), std::complex<double>(0.0));
      }
    }
}

TEST(Hamiltonian, MatchesGridFourierOracle) {
  HarmonicPotential u;
  const double ext = c::pi / 3.0;
  u.add(1, -40.0, 0.0);
  u.add(2, 0.3, 0.0);
  u.add(1, -37.0, ext);
  u.add(2, 0.25, ext);
  u.add(3, -0.05, 0.4);
  const double E_C = 0.12, n_g = 0.31;
  const int cutoff = 12;
  const auto H = hamiltonian_matrix(u, E_C, n_g, {cutoff, false});
  const auto ref = oracle::grid_fourier_hamiltonian([&](double phi) { return u.value(phi); }, E_C, n_g, cutoff);
  EXPECT_LT((H - ref).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_LT(hermiticity_defect(H), 1e-15);
  EXPECT_GT(H.imag().cwiseAbs().maxCoeff(), 1.0);
}

TEST(Hamiltonian, BandMatchesDense) {
  const SquidParams p = chip_a_6um().with_flux(0.47).with_gate(0.5);
  const auto u = build_squid_potential(p);
  const ChargeBasisSpec basis{30, false};
  const auto band = hamiltonian_band(u, p.E_C, p.n_g, basis);
  EXPECT_EQ(band.bandwidth, 2);
  EXPECT_LT((band.to_dense() - hamiltonian_matrix(u, p.E_C, p.n_g, basis)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Eigensolve, DiagonalInput) {
  Eigen::VectorXd d(5);
  d << 3.0, -1.0, 2.5, 0.0, 7.0;
  const Eigen::MatrixXcd H = d.cast<std::complex<double>>().asDiagonal();
  const auto es = eigensolve(H, 5);
  const double expected[] = {-1.0, 0.0, 2.5, 3.0, 7.0};
  const int position[] = {1, 3, 2, 0, 4};
  for (int k = 0; k < 5; ++k) {
    EXPECT_NEAR(es.energies(k), expected[k], 1e-14);
    EXPECT_NEAR(std::abs(es.states(position[k], k)), 1.0, 1e-14);
  }
}

TEST(Eigensolve, PauliX) {
  Eigen::MatrixXcd H(2, 2);
  H << 0.0, 1.0, 1.0, 0.0;
  const auto es = eigensolve(H, 2);
  EXPECT_NEAR(es.energies(0), -1.0, 1e-15);
  EXPECT_NEAR(es.energies(1), 1.0, 1e-15);
}

TEST(Eigensolve, RejectsNonHermitian) {
  Eigen::MatrixXcd H(2, 2);
  H << 0.0, 1.0, 2.0, 0.0;
  EXPECT_THROW(eigensolve(H, 2), InvalidArgument);
}

TEST(Eigensolve, BandedAgreesWithDenseReference) {
  const SquidParams p = chip_a_6um().with_flux(0.493).with_gate(0.5);
  const ChargeBasisSpec basis{40, false};
  const auto H = hamiltonian_matrix(build_squid_potential(p), p.E_C, p.n_g, basis);
  const auto a = eigensolve(hamiltonian_band(build_squid_potential(p), p.E_C, p.n_g, basis), 8);
  const auto b = eigensolve_dense(H, 8);
  EXPECT_LT((a.energies - b.energies).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(max_residual(H, a), 1e-9);
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(a.states.col(k).norm(), 1.0, 1e-12);
}

TEST(Spectrum, FreeRotorTransition) {
  SquidParams p;
  p.E_C = 0.0956;
  p.E_J1_L = 231.0;
  const Spectrum s = transition_spectrum(p, {0.5}, {0.0}, 3, {Execution::serial, ChargeBasisSpec{24, false}});
  EXPECT_NEAR(s.omega(0, 0, 1, 0), 0.3824, 1e-9);
}

TEST(Spectrum, FreeRotorMatchesAnalyticLevels) {
  SquidParams p;
  p.E_C = 0.17;
  p.E_J1_L = 0.0;
  for (double ng : {0.0, 0.2, 0.5}) {
    const auto e = squid_eigensystem(p.with_gate(ng), {20, false}, 6).energies;
    const auto ref = oracle::rotor_levels(p.E_C, ng, 6);
    for (int k = 0; k < 6; ++k) EXPECT_NEAR(e(k), ref[static_cast<std::size_t>(k)], 1e-11);
  }
}

TEST(Spectrum, TransmonAsymptoteAtZeroFlux) {
  const SquidParams p = chip_a_6um();
  const auto basis = select_cutoff(p, 3);
  const auto e = squid_eigensystem(p.with_flux(0.0), {2 * basis.cutoff, false}, 2).energies;
  const double asymptote = std::sqrt(8.0 * p.E_J_sum() * p.E_C) - p.E_C;
  EXPECT_LT(std::abs((e(1) - e(0)) / asymptote - 1.0), 0.02);
}

TEST(Spectrum, GaugeInvariance) {
  const SquidParams p = chip_a_6um().with_gate(0.2);
  const ChargeBasisSpec basis{40, false};
  for (double f : {0.1, 0.37, 0.5, 0.493}) {
    const SquidParams q = p.with_flux(f);
    // Flux phase on the left arm instead of the right.
    HarmonicPotential left;
    const double E_R = q.E_J1_R();
    left.add(1, -q.E_J1_L, -q.phi_ext);
    left.add(2, q.E_J1_L * q.alpha, -q.phi_ext);
    left.add(1, -E_R, 0.0);
    left.add(2, E_R * q.alpha_R(), 0.0);
    const auto a = levels_of(build_squid_potential(q), q.E_C, q.n_g, basis.cutoff, 6);
    const auto b = levels_of(left, q.E_C, q.n_g, basis.cutoff, 6);
    for (int k = 0; k < 6; ++k) EXPECT_LT(std::abs(a(k) - b(k)), 1e-9 * std::max(1.0, std::abs(a(k))));
  }
}

TEST(Spectrum, GateChargePeriodicityAndParity) {
  const SquidParams p = chip_a_6um().with_flux(0.49);
  const ChargeBasisSpec basis{40, false};
  for (double ng : {0.13, 0.5, 0.77}) {
    const auto a = squid_eigensystem(p.with_gate(ng), basis, 5).energies;
    const auto b = squid_eigensystem(p.with_gate(ng + 1.0), basis, 5).energies;
    const auto d = squid_eigensystem(p.with_gate(-ng), basis, 5).energies;
    for (int k = 0; k < 5; ++k) {
      EXPECT_LT(std::abs(a(k) - b(k)), 1e-9 * std::max(1.0, std::abs(a(k))));
      EXPECT_LT(std::abs(a(k) - d(k)), 1e-9 * std::max(1.0, std::abs(a(k))));
    }
  }
}

TEST(Spectrum, FluxPeriodicity) {
  const SquidParams p = chip_a_6um();
  const ChargeBasisSpec basis{40, false};
  for (double f : {0.0, 0.21, 0.495}) {
    const auto a = squid_eigensystem(p.with_flux(f), basis, 5).energies;
    const auto b = squid_eigensystem(p.with_flux(f + 1.0), basis, 5).energies;
    const auto d = squid_eigensystem(p.with_flux(f - 3.0), basis, 5).energies;
    for (int k = 0; k < 5; ++k) {
      EXPECT_LT(std::abs(a(k) - b(k)), 1e-9 * std::max(1.0, std::abs(a(k))));
      EXPECT_LT(std::abs(a(k) - d(k)), 1e-9 * std::max(1.0, std::abs(a(k))));
    }
  }
}

TEST(Spectrum, IdenticalArmsAreSymmetricAboutHalfFlux) {
  SquidParams p = chip_a_6um();
  p.dE_J = 0.0;
  const ChargeBasisSpec basis{40, false};
  for (double f : {0.45, 0.48, 0.499}) {
    const auto a = squid_eigensystem(p.with_flux(f), basis, 4).energies;
    const auto b = squid_eigensystem(p.with_flux(1.0 - f), basis, 4).energies;
    for (int k = 0; k < 4; ++k) EXPECT_LT(std::abs(a(k) - b(k)), 1e-9 * std::max(1.0, std::abs(a(k))));
  }
}

TEST(Spectrum, LowestTransitionHasMinimumAtHalfFlux) {
  const SquidParams p = chip_a_6um();
  std::vector<double> flux;
  for (int k = 0; k <= 40; ++k) flux.push_back(0.48 + 0.001 * k);
  const Spectrum s = transition_spectrum(p, flux, {0.0}, 3);
  std::size_t best = 0;
  for (std::size_t k = 0; k < flux.size(); ++k)
    if (s.omega(k, 0, 1, 0) < s.omega(best, 0, 1, 0)) best = k;
  EXPECT_NEAR(flux[best], 0.5, 1e-12);
  EXPECT_GT(s.omega(0, 0, 1, 0), 3.0 * s.omega(best, 0, 1, 0));
}

TEST(Spectrum, RowsCoverGroundAndFirstExcitedTransitions) {
  const SquidParams p = chip_a_6um();
  const Spectrum s = transition_spectrum(p, {0.49, 0.5}, {0.0, 0.5}, 4);
  const auto rows = s.rows();
  EXPECT_EQ(rows.size(), 2u * 2u * 5u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.j == 0 || r.j == 1);
    EXPECT_GT(r.i, r.j);
    EXPECT_GT(r.omega, 0.0);
  }
}

TEST(Spectrum, AutoCutoffIsConverged) {
  for (double ej : {84.0, 231.0}) {
    SquidParams p = chip_a_6um();
    p.E_J1_L = ej;
    const ChargeBasisSpec basis = select_cutoff(p, 4);
    EXPECT_TRUE(basis.converged);
    for (double f : {0.0, 0.3, 0.5})
      for (double ng : {0.0, 0.5}) {
        const auto a = squid_eigensystem(p.with_flux(f).with_gate(ng), basis, 4).energies;
        const auto b = squid_eigensystem(p.with_flux(f).with_gate(ng), {2 * basis.cutoff, false}, 4).energies;
        for (int k = 1; k < 4; ++k) EXPECT_LT(std::abs((a(k) - a(0)) - (b(k) - b(0))), 1e-6);
      }
  }
}

TEST(DoubleWell, CurvatureCriterionMatchesWellCount) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  int checked = 0;
  while (checked < 100) {
    const double dE = 2.0 * dist(rng) + 1e-3;
    const double S = dist(rng);
    if (std::abs(4.0 * S - dE) < 1e-2) continue;
    HarmonicPotential u;
    u.add(1, -dE);
    u.add(2, S);
    // Curvature at phi = 0 is dE - 4 S.
    EXPECT_NEAR(u.second_derivative(0.0), dE - 4.0 * S, 1e-12);
    EXPECT_EQ(count_wells(u) == 2, double_well_expected(dE, S)) << "dE=" << dE << " S=" << S;
    ++checked;
  }
}

TEST(DoubleWell, ChipA6umHalfFluxHasTwoWells) {
  const SquidParams p = chip_a_6um().with_flux(0.5);
  EXPECT_TRUE(double_well_expected(p.delta_E_J1(), p.sigma_E_J2()));
  EXPECT_EQ(count_wells(build_squid_potential(p)), 2);
}
