#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "squidharm/constants.hpp"
#include "squidharm/error.hpp"
#include "squidharm/harmonics.hpp"

using namespace squidharm;
using namespace squidharm::harmonics;
namespace c = squidharm::constants;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const double E_L_10pH = c::inductive_energy_ghz(10.0);

}  // namespace

TEST(Andreev, SeriesSingleChannelTermByTerm) {
  const auto d = andreev_series(TransparencyDistribution::channels({0.1}, 1.0), 3);
  EXPECT_NEAR(d.E_J(1), 0.025 + 6.25e-4 + 15.0 * 1e-3 / 512.0, 1e-15);
  EXPECT_NEAR(d.E_J(1), 0.0256543, 1e-7);
  EXPECT_NEAR(d.E_J(2), -(1e-2 / 64 + 3e-3 / 256 + 35e-4 / 4096), 1e-16);
  EXPECT_NEAR(d.E_J(3), 1e-3 / 512 + 5e-4 / 2048 + 315e-5 / 131072, 1e-16);
  EXPECT_EQ(d.provenance, Provenance::andreev_series);
}

TEST(Andreev, ExactMatchesQuadratureOracle) {
  for (double T : {0.05, 0.3, 0.8, 0.99}) {
    const auto d = andreev_exact(TransparencyDistribution::channels({T}, 2.0), 4);
    for (int n = 1; n <= 4; ++n) {
      const double ref = oracle::andreev_coefficient(T, 2.0, n);
      EXPECT_LT(std::abs(d.E_J(n) - ref), 1e-10 * std::abs(ref) + 1e-14) << "T=" << T << " n=" << n;
    }
  }
}

TEST(Andreev, SeriesVersusExactAtSmallTransparency) {
  const auto dist = TransparencyDistribution::channels({0.1}, 1.0);
  const auto s = andreev_series(dist, 3);
  const auto e = andreev_exact(dist, 3);
  EXPECT_LT(rel(s.E_J(2), e.E_J(2)), 1e-3);
  // The E_J1 gap is dominated by the first omitted term, (35 / 2048) T^4.
  const double omitted = 35.0 / 2048.0 * 1e-4;
  EXPECT_NEAR(e.E_J(1) - s.E_J(1), omitted, 0.1 * omitted);
}

TEST(Andreev, SeriesFailsNearUnitTransparency) {
  const auto dist = TransparencyDistribution::channels({0.99}, 1.0);
  EXPECT_GT(rel(andreev_series(dist, 3).E_J(1), andreev_exact(dist, 3).E_J(1)), 0.01);
}

TEST(Andreev, TunnelLimitRatio) {
  const double T = 1e-4;
  const auto d = andreev_series(TransparencyDistribution::channels({T}, 1.0), 3);
  EXPECT_NEAR(d.second_harmonic_ratio() / (T / 16.0), 1.0, 1e-3);
  const auto tiny = andreev_exact(TransparencyDistribution::channels({1e-12}, 1.0), 3);
  for (int n = 1; n <= 3; ++n) EXPECT_LT(std::abs(tiny.E_J(n)), 1e-12);
}

TEST(Andreev, RatioIndependentOfChannelCount) {
  const auto one = andreev_series(TransparencyDistribution::channels(std::vector<double>(3, 0.2), 1.0), 3);
  const auto two = andreev_series(TransparencyDistribution::channels(std::vector<double>(6, 0.2), 1.0), 3);
  EXPECT_NEAR(one.second_harmonic_ratio(), two.second_harmonic_ratio(), 1e-12);

  auto rho = [](double T) { return 2.0 * (1.0 - T); };
  const auto d3 = andreev_series(TransparencyDistribution::density(rho, 3.0, 1.0), 3);
  const auto d6 = andreev_series(TransparencyDistribution::density(rho, 6.0, 1.0), 3);
  EXPECT_NEAR(d3.second_harmonic_ratio(), d6.second_harmonic_ratio(), 1e-12);
  EXPECT_NEAR(d6.E_J(1), 2.0 * d3.E_J(1), 1e-12);
}

TEST(Andreev, DensityChannelSumMatchesAnalyticMoments) {
  // rho = 2 (1 - T): <T> = 1/3, <T^2> = 1/6.
  const auto dist = TransparencyDistribution::density([](double T) { return 2.0 * (1.0 - T); }, 10.0, 1.0);
  EXPECT_NEAR(dist.channel_sum([](double T) { return T; }), 10.0 / 3.0, 1e-10);
  EXPECT_NEAR(andreev_leading_ratio(dist), (1.0 / 16.0) * (1.0 / 6.0) / (1.0 / 3.0), 1e-10);
}

TEST(Andreev, RejectsInvalidDistribution) {
  EXPECT_THROW(TransparencyDistribution::channels({1.2}, 1.0), InvalidArgument);
  EXPECT_THROW(TransparencyDistribution::channels({0.5}, -1.0), InvalidArgument);
  EXPECT_THROW(TransparencyDistribution::channels({}, 1.0), InvalidArgument);
}

TEST(Inductive, ZeroRatioLeavesPureCosine) {
  const auto d = inductive_series({2.0, 1e300, 7});
  EXPECT_DOUBLE_EQ(d.E_J(1), 2.0);
  for (int n = 2; n <= 4; ++n) EXPECT_LT(std::abs(d.E_J(n)), 1e-290);
}

TEST(Inductive, SecondHarmonicTermByTerm) {
  const auto d = inductive_series({1.0, 10.0, 7});
  EXPECT_NEAR(d.E_J(2), -0.025 + 1e-3 / 12.0 - 1e-5 / 96.0, 1e-15);
  EXPECT_NEAR(d.E_J(2), -0.0249168, 1e-7);
  EXPECT_NEAR(d.E_J(1), 1.0 - 0.01 / 8.0 + 1e-4 / 192.0, 1e-15);
}

TEST(Inductive, MainTextSign) {
  const auto d = inductive_series({231.0, E_L_10pH, 7});
  EXPECT_NEAR(d.main_text_second_harmonic() / (231.0 * 231.0 / (4.0 * E_L_10pH)), 1.0, 1e-3);
  EXPECT_GT(d.main_text_second_harmonic(), 0.0);
}

TEST(Inductive, WarnsOutsideSeriesRange) {
  EXPECT_TRUE(inductive_series({1.0, 10.0, 7}).warnings.empty());
  EXPECT_FALSE(inductive_series({3.0, 10.0, 7}).warnings.empty());
}

TEST(Reduction, MatchesSeriesAtChipAInductance) {
  const auto o = reduction_oracle(231.0, 16346.0, 0.0, 4);
  const auto s = inductive_series({231.0, 16346.0, 7});
  EXPECT_LT(rel(s.E_J(2), o.E_J(2)), 1e-6);
  EXPECT_LT(rel(s.E_J(1), o.E_J(1)), 1e-6);
}

TEST(Reduction, SeriesErrorShrinksWithNextOrder) {
  // Keeping terms through x^4 leaves an x^5 error in E_J2.
  auto err = [](double x) {
    const auto o = reduction_oracle(1.0, 1.0 / x, 0.0, 3);
    return std::abs(inductive_series({1.0, 1.0 / x, 4}).E_J(2) - o.E_J(2));
  };
  EXPECT_GE(err(0.04) / err(0.02), 16.0);
}

TEST(Reduction, ZeroJosephsonEnergyGivesNoHarmonics) {
  const auto o = reduction_oracle(0.0, 100.0, 0.0, 3);
  for (int n = 1; n <= 3; ++n) EXPECT_EQ(o.E_J(n), 0.0);
  EXPECT_EQ(reduced_potential(1.0, 0.0, 100.0, 0.0), 0.0);
}

TEST(Reduction, StiffInductorLeavesIntrinsicRatio) {
  const auto o = reduction_oracle(1.0, 1e6, 0.01, 3);
  EXPECT_NEAR(o.second_harmonic_ratio(), 0.01, 1e-5);
}

TEST(Reduction, ReducedPotentialIsMinimumOverInductorPhase) {
  const double E_J = 50.0, E_L = 400.0, beta = 0.003;
  for (double phi : {0.0, 0.8, 2.0, 3.1}) {
    double best = 1e300;
    for (int k = -20000; k <= 20000; ++k) {
      const double pl = 1e-4 * k;
      const double d = phi - pl;
      best = std::min(best, -E_J * (std::cos(d) - beta * std::cos(2 * d)) + 0.5 * E_L * pl * pl);
    }
    EXPECT_NEAR(reduced_potential(phi, E_J, E_L, beta), best, 1e-5);
    EXPECT_LE(reduced_potential(phi, E_J, E_L, beta), best + 1e-12);
  }
}

TEST(Reduction, RatioLinearInJosephsonEnergy) {
  const double beta = 0.002;
  std::vector<double> x, y;
  for (double ej = 80.0; ej <= 0.05 * E_L_10pH; ej += 90.0) {
    x.push_back(ej);
    y.push_back(reduction_oracle(ej, E_L_10pH, beta, 3).second_harmonic_ratio());
  }
  const double n = double(x.size());
  double mx = 0, my = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) mx += x[k] / n, my += y[k] / n;
  for (std::size_t k = 0; k < x.size(); ++k) sxx += (x[k] - mx) * (x[k] - mx), sxy += (x[k] - mx) * (y[k] - my);
  const double slope = sxy / sxx;
  EXPECT_NEAR(slope * 4.0 * E_L_10pH, 1.0, 0.01);
  EXPECT_NEAR(my - slope * mx, beta, 1e-4);
}

TEST(Effective, SecondHarmonicValues) {
  EXPECT_EQ(effective_second_harmonic(0.0, E_L_10pH, 0.01), 0.0);
  EXPECT_NEAR(effective_second_harmonic(231.0, E_L_10pH, 0.0), 0.816, 0.816e-3);
  EXPECT_NEAR(effective_second_harmonic(231.0, E_L_10pH, 0.0) / 231.0, 3.53e-3, 1e-5);
  EXPECT_NEAR(effective_second_harmonic(84.0, E_L_10pH, 1e-3) / 84.0, 2.285e-3, 1e-6);
}

TEST(Effective, CombinedSeriesLeadingOrder) {
  const auto d = combined_series(231.0, E_L_10pH, 1e-3);
  EXPECT_NEAR(d.main_text_second_harmonic() / effective_second_harmonic(231.0, E_L_10pH, 1e-3), 1.0, 1e-2);
  const auto o = reduction_oracle(231.0, E_L_10pH, 1e-3, 3);
  EXPECT_NEAR(d.E_J(2) / o.E_J(2), 1.0, 1e-2);
}

TEST(Decomposition, PotentialRoundTrip) {
  HarmonicDecomposition d;
  d.coefficients = {231.0, -0.816, 0.01, -2e-4};
  const auto back = from_potential(to_potential(d), 4);
  ASSERT_EQ(back.n_max(), 4);
  for (int n = 1; n <= 4; ++n) EXPECT_DOUBLE_EQ(back.E_J(n), d.E_J(n));
  const auto u = to_potential(d);
  EXPECT_NEAR(u.value(0.4), -231.0 * std::cos(0.4) + 0.816 * std::cos(0.8) - 0.01 * std::cos(1.2) + 2e-4 * std::cos(1.6),
              1e-12);
}

TEST(Decomposition, RejectsShiftedPotential) {
  HarmonicPotential u;
  u.add(1, -1.0, 0.3);
  EXPECT_THROW(from_potential(u, 2), InvalidArgument);
}
