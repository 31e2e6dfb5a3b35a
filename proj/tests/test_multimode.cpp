#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "squidharm/block_tridiag.hpp"
#include "squidharm/constants.hpp"
#include "squidharm/error.hpp"
#include "squidharm/modes.hpp"
#include "squidharm/multimode.hpp"
#include "squidharm/spectrum.hpp"

using namespace squidharm;
namespace c = squidharm::constants;
using Eigen::MatrixXcd;
using cd = std::complex<double>;

namespace {

FullSquidCircuit six_micron() { return FullSquidCircuit::from_device(0.0956, 231.0, 231.0 * (1 - 0.00657829), 10.0, 73.0); }

Eigen::VectorXd dense_lowest(const BlockTridiagonalHermitian& H, int k) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H.to_dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().head(k);
}

BlockTridiagonalHermitian random_block_tridiagonal(int block, int blocks, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  auto random = [&] {
    MatrixXcd m(block, block);
    for (int r = 0; r < block; ++r)
      for (int col = 0; col < block; ++col) m(r, col) = cd(g(rng), g(rng));
    return m;
  };
  BlockTridiagonalHermitian H;
  H.block_size = block;
  for (int k = 0; k < blocks; ++k) {
    const MatrixXcd d = random();
    H.diagonal.push_back((d + d.adjoint()) / 2.0);
    if (k + 1 < blocks) H.lower.push_back(random());
  }
  return H;
}

}  // namespace

TEST(Modes, ZeroPointScalesAtBalancedEnergies) {
  const auto m = mode_operators(0.5, 1.0, 10);
  EXPECT_NEAR(m.phi_zpf(), 1.0, 1e-14);
  EXPECT_NEAR(m.n_zpf(), 0.5, 1e-14);
  EXPECT_NEAR(m.frequency(), 2.0, 1e-14);
}

TEST(Modes, QuadraticHamiltonianMatchesOperatorForm) {
  const double Ec = 0.7, El = 30.0;
  const auto m = mode_operators(Ec, El, 60);
  const MatrixXcd H = 4.0 * Ec * m.number * m.number + 0.5 * El * m.position * m.position;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  EXPECT_NEAR(es.eigenvalues()(1) - es.eigenvalues()(0), m.frequency(), 1e-8);
  EXPECT_NEAR(es.eigenvalues()(0), 0.5 * m.frequency(), 1e-8);
  const MatrixXcd q = m.quadratic_hamiltonian();
  for (int k = 0; k < 10; ++k) EXPECT_NEAR(q(k, k).real(), m.frequency() * (k + 0.5), 1e-12);
}

TEST(Modes, CanonicalCommutatorAwayFromTruncationEdge) {
  const auto m = mode_operators(0.3, 12.0, 20);
  EXPECT_LT(commutator_defect(m), 1e-12);
}

TEST(Modes, TrigFunctionsOfPosition) {
  const auto m = mode_operators(0.4, 3.0, 40);
  const MatrixXcd zero = MatrixXcd::Zero(40, 40);
  const MatrixXcd id = MatrixXcd::Identity(40, 40);
  EXPECT_LT((trig_of_position(zero, Trig::cos, 1.0) - id).norm(), 1e-14);
  EXPECT_LT(trig_of_position(zero, Trig::sin, 1.0).norm(), 1e-14);

  const MatrixXcd cs = trig_of_position(m.position, Trig::cos, 0.5);
  const MatrixXcd sn = trig_of_position(m.position, Trig::sin, 0.5);
  EXPECT_LT((cs * cs + sn * sn - id).cwiseAbs().maxCoeff(), 1e-12);
  // Ground-state expectation of a displacement: <0| cos(s phi) |0> = exp(-s^2 phi_zpf^2 / 2).
  const double s = 0.5 * m.phi_zpf();
  EXPECT_NEAR(cs(0, 0).real(), std::exp(-0.5 * s * s), 1e-10);
  EXPECT_NEAR(sn(0, 0).real(), 0.0, 1e-12);
}

TEST(BlockTridiagonal, MultiplyMatchesDense) {
  const auto H = random_block_tridiagonal(3, 5, 7);
  Eigen::VectorXcd x = Eigen::VectorXcd::Random(H.dimension());
  EXPECT_LT((H.multiply(x) - H.to_dense() * x).norm(), 1e-12);
  EXPECT_LT(hermiticity_defect(H.to_dense()), 1e-14);
}

TEST(BlockTridiagonal, LanczosAgreesWithDense) {
  const auto H = random_block_tridiagonal(4, 30, 11);
  const auto lz = lowest_eigenpairs(H, 6, LanczosOptions{.vectors = true});
  const auto ref = dense_lowest(H, 6);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(lz.energies(k), ref(k), 1e-9 * std::max(1.0, std::abs(ref(k))));
  const MatrixXcd D = H.to_dense();
  for (int k = 0; k < 6; ++k)
    EXPECT_LT((D * lz.states.col(k) - lz.energies(k) * lz.states.col(k)).norm(), 1e-7);
}

TEST(BlockTridiagonal, LanczosFindsDegenerateCopies) {
  // Two decoupled identical copies: every level is doubly degenerate.
  const auto base = random_block_tridiagonal(2, 20, 3);
  BlockTridiagonalHermitian H;
  H.block_size = 4;
  for (int k = 0; k < base.blocks(); ++k) {
    MatrixXcd d = MatrixXcd::Zero(4, 4);
    d.topLeftCorner(2, 2) = base.diagonal[k];
    d.bottomRightCorner(2, 2) = base.diagonal[k];
    H.diagonal.push_back(d);
    if (k + 1 < base.blocks()) {
      MatrixXcd l = MatrixXcd::Zero(4, 4);
      l.topLeftCorner(2, 2) = base.lower[k];
      l.bottomRightCorner(2, 2) = base.lower[k];
      H.lower.push_back(l);
    }
  }
  const auto lz = lowest_eigenpairs(H, 4);
  const auto ref = dense_lowest(H, 4);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(lz.energies(k), ref(k), 1e-9);
  EXPECT_NEAR(lz.energies(0), lz.energies(1), 1e-9);
}

TEST(BlockTridiagonal, CholeskyInertia) {
  const auto H = random_block_tridiagonal(3, 10, 5);
  const auto ref = dense_lowest(H, 1);
  ShiftedBlockCholesky chol;
  EXPECT_TRUE(chol.factor(H, ref(0) - 0.1));
  EXPECT_FALSE(chol.factor(H, ref(0) + 0.1));
  ASSERT_TRUE(chol.factor(H, ref(0) - 1.0));
  Eigen::VectorXcd b = Eigen::VectorXcd::Random(H.dimension());
  const MatrixXcd A = H.to_dense() - (ref(0) - 1.0) * MatrixXcd::Identity(H.dimension(), H.dimension());
  EXPECT_LT((A * chol.solve(b) - b).norm(), 1e-9 * b.norm());
}

TEST(FullSquid, HamiltonianIsHermitian) {
  const auto H = full_squid_hamiltonian(six_micron(), 0.3, 0.2, {4, 6, 8});
  EXPECT_LT(H.hermiticity_defect(), 1e-10);
  EXPECT_LT(hermiticity_defect(H.to_dense()), 1e-10);
}

TEST(FullSquid, NoJunctionsGivesOscillatorsPlusRotor) {
  FullSquidCircuit cir{64.8, 64.8, 73.0, 10.0, 0.0, 0.0};
  const double n_g = 0.2;
  const auto H = full_squid_hamiltonian(cir, 1.1, n_g, {24, 8, 4});
  const auto e = lowest_eigenpairs(H, 5);
  // The theta-charge coupling shifts the theta momentum and renormalizes the rotor.
  const double wt = std::sqrt(8.0 * cir.E_C_theta() * 2.0 * cir.E_L());
  const double wp = std::sqrt(8.0 * cir.E_C_phi() * 0.5 * cir.E_L());
  const double rotor = cir.E_C_varphi() - cir.J() * cir.J() / (64.0 * cir.E_C_theta());
  const auto r = oracle::rotor_levels(rotor, n_g, 5);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(e.energies(k), 0.5 * (wt + wp) + r[k], 1e-7) << k;
  // The renormalized rotor is the single-mode charging energy.
  EXPECT_NEAR(rotor, cir.E_C_total(), 1e-12);
}

TEST(FullSquid, TensorOrderDoesNotChangeSpectrum) {
  const auto cir = six_micron();
  FullSquidDims a{5, 7, 30, true}, b{5, 7, 30, false};
  const auto ea = lowest_eigenpairs(full_squid_hamiltonian(cir, 2.0, 0.1, a), 4);
  const auto eb = lowest_eigenpairs(full_squid_hamiltonian(cir, 2.0, 0.1, b), 4);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(ea.energies(k), eb.energies(k), 1e-9 * std::abs(ea.energies(k)));
}

TEST(FullSquid, LanczosMatchesDenseOnSmallTruncation) {
  const auto H = full_squid_hamiltonian(six_micron(), c::reduced_flux(0.47), 0.0, {3, 4, 14});
  const auto lz = lowest_eigenpairs(H, 4);
  const auto ref = dense_lowest(H, 4);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(lz.energies(k), ref(k), 1e-8 * std::abs(ref(k)));
}

TEST(FullSquid, StiffInductorRecoversSingleMode) {
  auto cir = FullSquidCircuit::from_device(0.0956, 231.0, 231.0 * (1 - 0.00657829), 0.01, 73.0);
  const auto t = model_discrepancy(cir, {0.47, 0.5}, 0.0, 2);
  EXPECT_LT(t.overall_max(), 1e-3);
}

TEST(FullSquid, OscillatorTruncationConverged) {
  const auto cir = six_micron();
  const int N = cutoff_rule(cir.E_J_L + cir.E_J_R, cir.E_C_total());
  auto transitions = [&](FullSquidDims d) {
    const auto e = lowest_eigenpairs(full_squid_hamiltonian(cir, c::reduced_flux(0.5), 0.0, d), 3).energies;
    return Eigen::Vector2d(e(1) - e(0), e(2) - e(0));
  };
  const auto base = transitions({6, 10, N});
  const auto more = transitions({9, 15, N});
  EXPECT_LT((base - more).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(FullSquid, DimensionCapRejectsOversizedBasis) {
  EXPECT_THROW(full_squid_hamiltonian(six_micron(), 0.0, 0.0, {6, 10, 0}, 1e3), InvalidArgument);
  FullSquidCircuit bad{60.0, 70.0, 73.0, 10.0, 1.0, 1.0};
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(TransmonInductor, MatchesPhaseGridOracle) {
  TransmonInductorCircuit cir{73.0, 2.0, 10.0, 20.0, 0.1};
  const auto lib = lowest_eigenpairs(transmon_inductor_hamiltonian(cir, {40, 12}), 4).energies;
  const auto ref = oracle::transmon_inductor_grid(73.0, 2.0, 10.0, 20.0, 0.1, 12, 48, 6.0, 4);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(lib(k) - lib(0), ref(k) - ref(0), 1e-4) << k;
}

TEST(TransmonInductor, HamiltonianIsHermitian) {
  TransmonInductorCircuit cir{73.0, 2.0, 10.0, 20.0, 0.3};
  EXPECT_LT(transmon_inductor_hamiltonian(cir, {20, 10}).hermiticity_defect(), 1e-10);
}

TEST(TransmonInductor, StiffInductorRecoversTransmon) {
  TransmonInductorCircuit cir{73.0, 20.0, 0.01, 20.0, 0.0};
  const auto t = model_discrepancy(cir, 2);
  EXPECT_LT(t.overall_max(), 1e-3);
}

TEST(TransmonInductor, DiscrepancyGrowsAsJunctionCapacitanceShrinks) {
  double previous = 0.0;
  for (double cj : {20.0, 2.0, 0.5}) {
    TransmonInductorCircuit cir{73.0, cj, 10.0, 20.0, 0.0};
    const double d = model_discrepancy(cir, 3).overall_max();
    EXPECT_GT(d, previous) << cj;
    previous = d;
  }
}

TEST(Resonator, ZeroCouplingIsBareSum) {
  SquidParams p{0.138, 125.0, 0.02, 0.0, 0.0, c::reduced_flux(0.49)};
  const auto sys = coupled_resonator_hamiltonian(p, 7.5891, 0.0, {6, 5});
  const auto d = dressed_spectrum(sys, 4);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(d.dressed(k), d.bare(k), 1e-12);
  EXPECT_NEAR(d.resonator_one - d.resonator_ground, 7.5891, 1e-12);
}

TEST(Resonator, TwoLevelPullMatchesPerturbation) {
  SquidParams p{0.138, 125.0, 0.02, 0.0, 0.0, c::reduced_flux(0.49)};
  const double g = 0.005;
  const auto sys = coupled_resonator_hamiltonian(p, 7.5891, g, {2, 6});
  const auto d = dressed_spectrum(sys, 2);
  const double w01 = d.bare(1) - d.bare(0);
  const double n01 = std::norm(sys.n_matrix(0, 1));
  const double delta = w01 - 7.5891, sigma = w01 + 7.5891;
  const double pull = (d.resonator_one - d.resonator_ground) - 7.5891;
  const double expected = -g * g * n01 * (1.0 / delta + 1.0 / sigma);
  EXPECT_NEAR(pull / expected, 1.0, 0.05);
}

TEST(Resonator, AssignmentIsABijection) {
  SquidParams p{0.138, 125.0, 0.02, 0.0, 0.0, c::reduced_flux(0.45)};
  const auto sys = coupled_resonator_hamiltonian(p, 7.5891, 0.0436, {8, 6});
  const auto dressed = eigensolve_dense(sys.hamiltonian, static_cast<int>(sys.hamiltonian.rows()));
  std::vector<int> seen;
  for (int k = 0; k < 5; ++k) seen.push_back(identify_dressed_state(dressed, sys, k, 0));
  std::sort(seen.begin(), seen.end());
  EXPECT_EQ(std::adjacent_find(seen.begin(), seen.end()), seen.end());
}

TEST(Resonator, ResonantHybridizationIsRejected) {
  SquidParams p{0.138, 125.0, 0.0, 0.0};
  const auto bare = squid_eigensystem(p, select_cutoff(p, 2), 2);
  const double w01 = bare.energies(1) - bare.energies(0);
  const auto sys = coupled_resonator_hamiltonian(p, w01, 0.05, {4, 5});
  EXPECT_THROW(dressed_spectrum(sys, 2), SolverError);
}
