#include "squidharm/potential.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "squidharm/constants.hpp"
#include "squidharm/error.hpp"

namespace squidharm {
namespace {

// Offset reduced to [0, 2 pi / n), the period of cos(n (phi - delta)) in delta.
double reduce_offset(int order, double offset) {
  const double period = constants::two_pi / order;
  double r = std::fmod(offset, period);
  if (r < 0.0) r += period;
  if (period - r < 1e-14 * period) r = 0.0;
  return r;
}

// Offsets equal modulo the period, up to rounding in the reduction.
bool same_offset(int order, double a, double b) {
  const double period = constants::two_pi / order;
  const double d = std::abs(reduce_offset(order, a) - reduce_offset(order, b));
  return std::min(d, period - d) < 1e-12 * period;
}

}  // namespace

HarmonicPotential::HarmonicPotential(std::span<const HarmonicTerm> terms) {
  for (const auto& t : terms) add(t);
}

void HarmonicPotential::add(int order, double coefficient, double offset) {
  require(order >= 1, "harmonic order must be >= 1");
  require(std::isfinite(coefficient) && std::isfinite(offset), "harmonic term must be finite");
  for (auto& t : terms_) {
    if (t.order == order && same_offset(order, t.offset, offset)) {
      t.coefficient += coefficient;
      return;
    }
  }
  terms_.push_back({order, coefficient, offset});
}

int HarmonicPotential::max_order() const {
  int m = 0;
  for (const auto& t : terms_) m = std::max(m, t.order);
  return m;
}

std::complex<double> HarmonicPotential::phasor(int order) const {
  std::complex<double> z{0.0, 0.0};
  for (const auto& t : terms_)
    if (t.order == order) z += t.coefficient * std::polar(1.0, -order * t.offset);
  return z;
}

double HarmonicPotential::value(double phi) const {
  double u = 0.0;
  for (const auto& t : terms_) u += t.coefficient * std::cos(t.order * (phi - t.offset));
  return u;
}

double HarmonicPotential::derivative(double phi) const {
  double d = 0.0;
  for (const auto& t : terms_) d -= t.coefficient * t.order * std::sin(t.order * (phi - t.offset));
  return d;
}

double HarmonicPotential::second_derivative(double phi) const {
  double d = 0.0;
  for (const auto& t : terms_)
    d -= t.coefficient * t.order * t.order * std::cos(t.order * (phi - t.offset));
  return d;
}

HarmonicPotential HarmonicPotential::combined() const {
  std::map<int, std::complex<double>> by_order;
  for (const auto& t : terms_) by_order[t.order] += t.coefficient * std::polar(1.0, -t.order * t.offset);
  HarmonicPotential out;
  for (const auto& [order, z] : by_order) {
    const double amplitude = std::abs(z);
    if (amplitude == 0.0) continue;
    out.terms_.push_back({order, amplitude, reduce_offset(order, -std::arg(z) / order)});
  }
  return out;
}

HarmonicPotential merge(const HarmonicPotential& a, const HarmonicPotential& b) {
  HarmonicPotential sum = a;
  for (const auto& t : b.terms()) sum.terms_.push_back(t);
  return sum.combined();
}

}  // namespace squidharm
