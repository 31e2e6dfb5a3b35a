#include "squidharm/harmonics.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>

#include "squidharm/constants.hpp"
#include "squidharm/error.hpp"

namespace squidharm::harmonics {
namespace {


// Accepts when the error estimate is below abs_tol or below rel_tol times the
// L1 norm of the integrand.
double integrate_checked(const std::function<double(double)>& f, double a, double b, double abs_tol,
                         const char* what, double rel_tol = 0.0) {
  // tanh-sinh tolerates the endpoint singularities of the integrands in T near 1.
  thread_local boost::math::quadrature::tanh_sinh<double> quadrature;
  double error = 0.0;
  double l1 = 0.0;
  const double value = quadrature.integrate(f, a, b, 1e-14, &error, &l1);
  if (!std::isfinite(value) || (error > abs_tol && error > rel_tol * l1)) {
    std::ostringstream msg;
    msg << what << ": adaptive quadrature missed tolerance (estimate " << error << ", requested "
        << abs_tol << ", L1 norm " << l1 << ")";
    throw SolverError(msg.str());
  }
  return value;
}

// (2 / pi) int_0^pi sqrt(1 - T sin^2(phi/2)) cos(n phi) dphi, per unit gap.
// For n >= 1 the constant and the sin^2 part contribute only to n = 1, so they
// are subtracted before integrating and the n = 1 piece (T / 4) is added back.
double andreev_channel_coefficient(double T, int n) {
  auto g = [T, n](double phi) {
    const double s = std::sin(0.5 * phi);
    const double x = T * s * s;
    // sqrt(1 - x) - 1 + x / 2, written to avoid cancellation for small x
    const double root = std::sqrt(1.0 - x);
    const double remainder = -x * x / ((1.0 + root) * (1.0 + root)) / 2.0;
    return remainder * std::cos(n * phi);
  };
  // tanh-sinh clusters nodes at phi = pi, where the integrand develops a kink as T -> 1.
  thread_local boost::math::quadrature::tanh_sinh<double> quadrature;
  const double upper = constants::pi;
  double error = 0.0;
  double l1 = 0.0;
  const double integral = quadrature.integrate(g, 0.0, upper, 1e-14, &error, &l1);
  if (!std::isfinite(integral) || error > 1e-12 * l1) {
    std::ostringstream msg;
    msg << "Andreev Fourier integral (T = " << T << ", n = " << n << "): error estimate " << error
        << " exceeds 1e-12 of L1 norm " << l1;
    throw SolverError(msg.str());
  }
  const double tail = (2.0 / constants::pi) * integral;
  return n == 1 ? T / 4.0 + tail : tail;
}

void check_decomposition(const HarmonicDecomposition& d) {
  for (double c : d.coefficients) require(std::isfinite(c), "harmonic coefficients must be finite");
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::andreev_series: return "andreev-series";
    case Provenance::andreev_oracle: return "andreev-oracle";
    case Provenance::inductive_series: return "inductive-series";
    case Provenance::reduction_oracle: return "reduction-oracle";
    case Provenance::combined: return "combined";
  }
  return "unknown";
}

HarmonicPotential to_potential(const HarmonicDecomposition& d) {
  HarmonicPotential u;
  for (int n = 1; n <= d.n_max(); ++n)
    if (d.E_J(n) != 0.0) u.add(n, -d.E_J(n), 0.0);
  return u;
}

HarmonicDecomposition from_potential(const HarmonicPotential& u, int n_max, Provenance provenance) {
  require(n_max >= 1, "n_max must be >= 1");
  HarmonicDecomposition d;
  d.provenance = provenance;
  d.coefficients.assign(static_cast<std::size_t>(n_max), 0.0);
  for (const auto& t : u.terms()) {
    const double period = constants::two_pi / t.order;
    const double r = std::remainder(t.offset, period);
    require(std::abs(r) < 1e-12 * period, "potential term has a nonzero phase offset");
    require(t.order <= n_max, "potential order exceeds n_max");
    d.coefficients[static_cast<std::size_t>(t.order - 1)] -= t.coefficient;
  }
  return d;
}

TransparencyDistribution TransparencyDistribution::channels(std::vector<double> transparencies, double gap) {
  require(!transparencies.empty(), "need at least one channel");
  require(gap > 0.0 && std::isfinite(gap), "superconducting gap must be positive");
  for (double T : transparencies) require(T > 0.0 && T <= 1.0, "transparencies must lie in (0, 1]");
  TransparencyDistribution d;
  d.channel_count_ = static_cast<double>(transparencies.size());
  d.transparencies_ = std::move(transparencies);
  d.gap_ = gap;
  return d;
}

TransparencyDistribution TransparencyDistribution::density(std::function<double(double)> rho,
                                                           double channel_count, double gap) {
  require(static_cast<bool>(rho), "density must be callable");
  require(channel_count >= 1.0, "channel count must be >= 1");
  require(gap > 0.0 && std::isfinite(gap), "superconducting gap must be positive");
  for (int k = 1; k <= 1000; ++k) {
    const double v = rho(k / 1000.0);
    require(std::isfinite(v) && v >= 0.0, "density must be finite and nonnegative on (0, 1]");
  }
  const double norm = integrate_checked(rho, 0.0, 1.0, 1e-10, "density normalization");
  require(std::abs(norm - 1.0) < 1e-8, "density must integrate to 1 over (0, 1]");
  TransparencyDistribution d;
  d.rho_ = std::move(rho);
  d.channel_count_ = channel_count;
  d.gap_ = gap;
  return d;
}

double TransparencyDistribution::channel_sum(const std::function<double(double)>& f) const {
  if (is_discrete()) {
    double s = 0.0;
    for (double T : transparencies_) s += f(T);
    return s;
  }
  auto weighted = [&](double T) { return rho_(T) * f(T); };
  return channel_count_ * integrate_checked(weighted, 0.0, 1.0, 1e-12, "transparency integral");
}

HarmonicDecomposition andreev_series(const TransparencyDistribution& dist, int n_max) {
  require(n_max >= 1 && n_max <= 3, "Andreev series is available for n_max <= 3");
  const double gap = dist.gap();
  HarmonicDecomposition d;
  d.provenance = Provenance::andreev_series;
  d.coefficients.push_back(gap * dist.channel_sum([](double T) {
    return T / 4.0 + T * T / 16.0 + 15.0 * T * T * T / 512.0;
  }));
  if (n_max >= 2) {
    d.coefficients.push_back(-gap * dist.channel_sum([](double T) {
      const double T2 = T * T;
      return T2 / 64.0 + 3.0 * T2 * T / 256.0 + 35.0 * T2 * T2 / 4096.0;
    }));
  }
  if (n_max >= 3) {
    d.coefficients.push_back(gap * dist.channel_sum([](double T) {
      const double T3 = T * T * T;
      return T3 / 512.0 + 5.0 * T3 * T / 2048.0 + 315.0 * T3 * T * T / 131072.0;
    }));
  }
  check_decomposition(d);
  return d;
}

HarmonicDecomposition andreev_exact(const TransparencyDistribution& dist, int n_max) {
  require(n_max >= 2, "n_max must be >= 2");
  HarmonicDecomposition d;
  d.provenance = Provenance::andreev_oracle;
  for (int n = 1; n <= n_max; ++n) {
    // U = -gap sum sqrt(...) = -sum E_Jn cos(n phi)  =>  E_Jn = gap * (cosine coefficient of sqrt)
    double sum = 0.0;
    if (dist.is_discrete()) {
      std::map<double, int> multiplicity;
      for (double T : dist.transparencies()) ++multiplicity[T];
      for (const auto& [T, count] : multiplicity) sum += count * andreev_channel_coefficient(T, n);
    } else {
      sum = dist.channel_sum([n](double T) { return andreev_channel_coefficient(T, n); });
    }
    d.coefficients.push_back(dist.gap() * sum);
  }
  check_decomposition(d);
  return d;
}

double andreev_leading_ratio(const TransparencyDistribution& dist) {
  const double m1 = dist.channel_sum([](double T) { return T; });
  const double m2 = dist.channel_sum([](double T) { return T * T; });
  return m2 / (16.0 * m1);
}

HarmonicDecomposition inductive_series(const InductiveSeriesInput& input) {
  require(std::isfinite(input.E_J) && input.E_J >= 0.0, "E_J must be finite and nonnegative");
  require(input.E_L > 0.0 && std::isfinite(input.E_L), "E_L must be positive");
  require(input.order >= 0, "truncation order must be nonnegative");
  const double x = input.E_J / input.E_L;
  require(x < 0.5, "E_J / E_L must be < 0.5 for the inductive series");

  // bracket[n - 1] = {(power, coefficient), ...}
  static const std::vector<std::vector<std::pair<int, double>>> brackets = {
      {{0, 1.0}, {2, -1.0 / 8.0}, {4, 1.0 / 192.0}},
      {{1, -1.0 / 4.0}, {3, 1.0 / 12.0}, {5, -1.0 / 96.0}},
      {{2, 1.0 / 8.0}, {4, -9.0 / 128.0}, {6, 1.0 / 64.0}},
      {{3, -1.0 / 12.0}, {5, 1.0 / 15.0}, {7, -101.0 / 4608.0}},
  };
  HarmonicDecomposition d;
  d.provenance = Provenance::inductive_series;
  for (const auto& bracket : brackets) {
    double s = 0.0;
    for (const auto& [power, c] : bracket)
      if (power <= input.order) s += c * std::pow(x, power);
    d.coefficients.push_back(input.E_J * s);
  }
  if (x > 0.25) {
    std::ostringstream msg;
    msg << "E_J / E_L = " << x << " exceeds 0.25; inductive series may be inaccurate";
    d.warnings.push_back(msg.str());
  }
  check_decomposition(d);
  return d;
}

double reduced_potential(double phi, double E_J, double E_L, double beta) {
  auto energy = [&](double phi_L) {
    const double u = phi - phi_L;
    return -E_J * (std::cos(u) - beta * std::cos(2.0 * u)) + 0.5 * E_L * phi_L * phi_L;
  };
  if (E_J == 0.0) return 0.0;
  // Stationary points satisfy |phi_L| <= E_J (1 + 2|beta|) / E_L.
  const double bound = E_J * (1.0 + 2.0 * std::abs(beta)) / E_L * (1.0 + 1e-9) + 1e-300;
  auto gradient = [&](double phi_L) {
    const double u = phi - phi_L;
    const double d1 = -E_J * (std::sin(u) - 2.0 * beta * std::sin(2.0 * u)) + E_L * phi_L;
    const double d2 = E_J * (std::cos(u) - 4.0 * beta * std::cos(2.0 * u)) + E_L;
    return std::make_pair(d1, d2);
  };
  const double seed = std::clamp(E_J / E_L * std::sin(phi), -bound, bound);
  std::uintmax_t iterations = 100;
  const double phi_L = boost::math::tools::newton_raphson_iterate(gradient, seed, -bound, bound, 52, iterations);
  return energy(phi_L);
}

namespace {

// Number of local minima of U(phi, .) on the admissible phi_L interval.
int count_local_minima(double phi, double E_J, double E_L, double beta) {
  const double bound = E_J * (1.0 + 2.0 * std::abs(beta)) / E_L * 1.01 + 1e-12;
  constexpr int samples = 4001;
  std::vector<double> f(samples);
  for (int k = 0; k < samples; ++k) {
    const double phi_L = -bound + 2.0 * bound * k / (samples - 1);
    const double u = phi - phi_L;
    f[static_cast<std::size_t>(k)] = -E_J * (std::cos(u) - beta * std::cos(2.0 * u)) + 0.5 * E_L * phi_L * phi_L;
  }
  int minima = 0;
  for (int k = 1; k + 1 < samples; ++k)
    if (f[k] < f[k - 1] && f[k] <= f[k + 1]) ++minima;
  return minima;
}

}  // namespace

HarmonicDecomposition reduction_oracle(double E_J, double E_L, double beta, int n_max,
                                       const ReductionOptions& options) {
  require(E_L > 0.0 && std::isfinite(E_L), "E_L must be positive");
  require(beta >= 0.0 && std::isfinite(beta), "beta must be nonnegative");
  require(std::isfinite(E_J) && E_J >= 0.0, "E_J must be finite and nonnegative");
  require(n_max >= 2, "n_max must be >= 2");
  require(options.grid_points >= 4 * n_max, "Fourier grid too coarse");
  const int M = options.grid_points;

  if (E_J * (1.0 + 4.0 * beta) >= E_L) {
    for (int k = 0; k < 64; ++k) {
      const double phi = constants::two_pi * k / 64.0;
      if (count_local_minima(phi, E_J, E_L, beta) > 1) {
        std::ostringstream msg;
        msg << "reduction oracle: non-unique minimizer in phi_L at phi = " << phi
            << " (E_J / E_L = " << E_J / E_L << ")";
        throw SolverError(msg.str());
      }
    }
  }

  const auto samples = indexed_map(
      static_cast<std::size_t>(M),
      [&](std::size_t k) { return reduced_potential(constants::two_pi * static_cast<double>(k) / M, E_J, E_L, beta); },
      options.execution);

  HarmonicDecomposition d;
  d.provenance = Provenance::reduction_oracle;
  for (int n = 1; n <= n_max; ++n) {
    double a = 0.0;
    for (int k = 0; k < M; ++k) a += samples[static_cast<std::size_t>(k)] * std::cos(constants::two_pi * n * k / M);
    d.coefficients.push_back(-2.0 * a / M);
  }
  check_decomposition(d);
  return d;
}

HarmonicDecomposition combined_series(double E_J1, double E_L, double beta) {
  require(E_L > 0.0, "E_L must be positive");
  const double x = E_J1 / E_L;
  HarmonicDecomposition d;
  d.provenance = Provenance::combined;
  d.coefficients = {
      E_J1 * (1.0 - beta * x - x * x / 8.0),
      E_J1 * (-beta - x / 4.0 + beta * x * x),
      E_J1 * (beta * x + x * x / 8.0),
  };
  check_decomposition(d);
  return d;
}

double effective_second_harmonic(double E_J1, double E_L, double beta) {
  require(E_L > 0.0, "E_L must be positive");
  return beta * E_J1 + E_J1 * E_J1 / (4.0 * E_L);
}

}  // namespace squidharm::harmonics
