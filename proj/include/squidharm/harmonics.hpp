#pragma once

#include <functional>
#include <string>
#include <vector>

#include "squidharm/parallel.hpp"
#include "squidharm/potential.hpp"

namespace squidharm::harmonics {

enum class Provenance { andreev_series, andreev_oracle, inductive_series, reduction_oracle, combined };

std::string to_string(Provenance p);

// Coefficients E_Jn (GHz) in the convention U = -sum_n E_Jn cos(n phi).
// The main-text second harmonic is the negative of E_J(2).
struct HarmonicDecomposition {
  std::vector<double> coefficients;  // coefficients[n - 1] = E_Jn
  Provenance provenance = Provenance::combined;
  std::vector<std::string> warnings;

  int n_max() const { return static_cast<int>(coefficients.size()); }
  double E_J(int n) const { return coefficients.at(static_cast<std::size_t>(n - 1)); }
  // +E_J2 in U = -E_J1 cos phi + E_J2 cos 2 phi
  double main_text_second_harmonic() const { return -E_J(2); }
  // -E_J2 / E_J1
  double second_harmonic_ratio() const { return -E_J(2) / E_J(1); }
};

// Sign conversion between the decomposition and a cosine series at zero offset.
HarmonicPotential to_potential(const HarmonicDecomposition& d);
// Requires all offsets to be 0 (mod 2 pi / n); merges terms of equal order.
HarmonicDecomposition from_potential(const HarmonicPotential& u, int n_max,
                                     Provenance provenance = Provenance::combined);

// Channel transparencies, either as discrete values or as a density rho(T) on
// (0, 1] with N channels.
class TransparencyDistribution {
 public:
  static TransparencyDistribution channels(std::vector<double> transparencies, double gap);
  static TransparencyDistribution density(std::function<double(double)> rho, double channel_count,
                                          double gap);

  bool is_discrete() const { return !transparencies_.empty(); }
  double gap() const { return gap_; }
  double channel_count() const { return channel_count_; }
  const std::vector<double>& transparencies() const { return transparencies_; }
  const std::function<double(double)>& rho() const { return rho_; }

  // sum_n f(T_n) or N * int_0^1 rho(T) f(T) dT. Throws SolverError when the
  // adaptive quadrature misses its tolerance.
  double channel_sum(const std::function<double(double)>& f) const;

 private:
  std::vector<double> transparencies_;
  std::function<double(double)> rho_;
  double channel_count_ = 0.0;
  double gap_ = 0.0;
};

// Tunnel-limit series through T^3 (n = 1), T^4 (n = 2), T^5 (n = 3).
HarmonicDecomposition andreev_series(const TransparencyDistribution& dist, int n_max = 3);

// Fourier analysis of U = -gap * sum_n sqrt(1 - T_n sin^2(phi / 2)).
HarmonicDecomposition andreev_exact(const TransparencyDistribution& dist, int n_max);

// E_J2,A / E_J1,A to leading order: (1/16) <T^2> / <T>.
double andreev_leading_ratio(const TransparencyDistribution& dist);

struct InductiveSeriesInput {
  double E_J = 0.0;  // GHz
  double E_L = 0.0;  // GHz
  int order = 7;     // highest power of x = E_J / E_L kept in each bracket
};

// Series for E_J1..E_J4 of a junction in series with a linear inductor.
HarmonicDecomposition inductive_series(const InductiveSeriesInput& input);

struct ReductionOptions {
  int grid_points = 4096;
  Execution execution = Execution::parallel;
};

// For each phi on a uniform grid, minimizes
//   U(phi, phi_L) = -E_J [cos(phi - phi_L) - beta cos 2(phi - phi_L)] + E_L phi_L^2 / 2
// over phi_L, then Fourier-analyzes the reduced U(phi).
HarmonicDecomposition reduction_oracle(double E_J, double E_L, double beta, int n_max,
                                       const ReductionOptions& options = {});

// Reduced potential at a single phase (the minimum over phi_L).
double reduced_potential(double phi, double E_J, double E_L, double beta);

// Leading-order joint expansion in beta and E_J1 / E_L (E_J1..E_J3).
HarmonicDecomposition combined_series(double E_J1, double E_L, double beta);

// beta E_J1 + E_J1^2 / (4 E_L), main-text sign.
double effective_second_harmonic(double E_J1, double E_L, double beta);

}  // namespace squidharm::harmonics
