#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "squidharm/hamiltonian.hpp"
#include "squidharm/parallel.hpp"
#include "squidharm/squid.hpp"

namespace squidharm {

// One labelled transition: f = E_i - E_j at (flux, n_g).
struct TransitionRecord {
  double flux_phi0 = 0.0;
  int i = 1;
  int j = 0;
  double n_g = 0.0;
  double frequency = 0.0;  // GHz
  double weight = 1.0;
};

struct TransitionDataset {
  std::vector<TransitionRecord> records;
  std::string provenance = "measured";
  std::optional<std::uint64_t> seed;

  // Record-level checks (InvalidArgument): positive finite frequencies and
  // weights, j in {0, 1}, i > j, n_g in {0, 0.5}.
  void validate() const;

  // Throws DegenerateDataError unless there are at least 4 distinct flux
  // points covering both the near-half region and the region away from it.
  void check_identifiable(double near_half_width = 0.015) const;

  std::size_t distinct_flux_count() const;
};

// Distance of a flux value from the nearest half-integer.
double distance_from_half(double flux_phi0);

// x = (E_C, E_J1^L, dE_J, alpha)
using FitVector = std::array<double, 4>;
inline constexpr std::array<const char*, 4> fit_parameter_names{"E_C_GHz", "E_J1_L_GHz", "dE_J", "alpha"};

struct FitBounds {
  FitVector lower{0.01, 10.0, -0.2, -0.02};
  FitVector upper{1.0, 500.0, 0.2, 0.05};
  bool contains(const FitVector& x) const;
};

struct CostOptions {
  // alpha^R = alpha (1 - dE_J) instead of the shared alpha.
  bool per_arm_alpha = false;
  ChargeBasisSpec basis{0, false};  // cutoff 0: chosen from the data
  Execution execution = Execution::serial;
};

SquidParams to_params(const FitVector& x, bool per_arm_alpha = false);

// Smallest cutoff (from 24, doubling) whose lowest transitions move by less
// than `tolerance` when doubled, probed at zero and half flux on both branches.
ChargeBasisSpec fit_cutoff(const SquidParams& params, int levels, double tolerance = 1e-8);

// Model transitions for every record, in record order.
std::vector<double> model_frequencies(const FitVector& x, const TransitionDataset& data, const CostOptions& options);

// sum_k w_k (lambda_k - f_k)^2 in GHz^2.
double spectrum_cost(const FitVector& x, const TransitionDataset& data, const CostOptions& options = {});

struct FitOptions {
  FitBounds bounds{};
  int starts = 5;
  int start_evaluations = 250;  // per start before choosing the best
  int max_evaluations = 4000;   // for the final descent
  int max_restarts = 6;         // fresh simplices around the incumbent
  double start_spread = 0.05;   // Latin-hypercube half-width, fraction of the box
  double x_tolerance = 1e-9;    // simplex diameter in box units
  double f_tolerance = 1e-13;   // GHz^2
  std::uint64_t seed = 1;
  bool per_arm_alpha = false;
  std::optional<ChargeBasisSpec> basis;
  Execution execution = Execution::parallel;
};

struct FitResult {
  FitVector x{};
  FitVector sigma{};
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();
  double cost = 0.0;            // at x
  double residual_norm = 0.0;   // sqrt(cost)
  double reduced_chi2 = 0.0;
  int degrees_of_freedom = 0;
  int evaluations = 0;
  int iterations = 0;
  int restarts = 0;
  bool converged = false;
  std::vector<double> start_costs;
  std::vector<double> residuals;  // model - measured, record order
  ChargeBasisSpec basis;
};

// Multi-start bounded Nelder-Mead; covariance from the Gauss-Newton Hessian
// scaled by the reduced chi-square.
FitResult fit_spectrum(const TransitionDataset& data, const FitVector& init, const FitOptions& options = {});

// Coarse grid scan for a starting point.
FitVector coarse_initial_guess(const TransitionDataset& data, const FitBounds& bounds = {});

// ---- synthetic data ---------------------------------------------------------

struct FluxRanges {
  std::array<double, 2> near;  // omega_10 below near_max, centred on 0.5
  std::array<double, 2> far;   // omega_10 in [far_low, far_high], below 0.5
};

FluxRanges measurement_ranges(const SquidParams& params, double near_max = 3.0, double far_low = 4.0,
                              double far_high = 7.0);

struct SynthOptions {
  int near_points = 8;
  int far_points = 8;
  int levels = 4;  // transitions up to E_{levels-1}
  bool include_excited = true;  // omega_j1 rows
  std::vector<double> gates{0.0, 0.5};
  double noise_mhz = 0.0;
  std::uint64_t seed = 1;
  double near_max = 3.0, far_low = 4.0, far_high = 7.0;
};

TransitionDataset synthesize_dataset(const SquidParams& params, const SynthOptions& options = {});

// ---- errors-in-variables line ---------------------------------------------

struct LinePoint {
  double x = 0.0, y = 0.0, sigma_x = 0.0, sigma_y = 0.0;
};

struct LineFitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_sigma = 0.0;
  double intercept_sigma = 0.0;
  double covariance = 0.0;  // cov(slope, intercept)
  double chi2 = 0.0;        // weighted orthogonal distance sum
  double reduced_chi2 = 0.0;
  int points = 0;
};

// Minimizes sum (y - a - b x)^2 / (sigma_y^2 + b^2 sigma_x^2) with a profiled out.
LineFitResult deming_fit(const std::vector<LinePoint>& points);

struct InductanceBeta {
  double E_L = 0.0;  // GHz
  double L_pH = 0.0;
  double L_sigma = 0.0;
  bool L_physical = false;
  double beta = 0.0;
  double beta_sigma = 0.0;
};

// slope = 1 / (4 E_L), intercept = beta.
InductanceBeta inductance_and_beta(const LineFitResult& fit);

// y = beta + x / (4 E_L) sampled at `x` with relative Gaussian noise on both axes.
std::vector<LinePoint> synthesize_ratio_points(const std::vector<double>& x, double L_pH, double beta,
                                               double relative_noise, std::uint64_t seed);

}  // namespace squidharm
