#pragma once

#include <complex>
#include <span>
#include <vector>

namespace squidharm {

// One term c * cos(n * (phi - offset)).
struct HarmonicTerm {
  int order = 1;
  double coefficient = 0.0;  // GHz
  double offset = 0.0;       // radians

  friend bool operator==(const HarmonicTerm&, const HarmonicTerm&) = default;
};

// Signed cosine series U(phi) = sum_n c_n cos(n (phi - delta_n)). The empty
// series is the free rotor U = 0.
//
// Terms of equal order and equal offset (mod 2 pi / n) are merged on insertion;
// equal-order terms at different offsets are kept apart so that e.g. the two
// arms of a SQUID stay visible. `combined()` folds every order into one term.
class HarmonicPotential {
 public:
  HarmonicPotential() = default;
  explicit HarmonicPotential(std::span<const HarmonicTerm> terms);

  void add(int order, double coefficient, double offset = 0.0);
  void add(const HarmonicTerm& term) { add(term.order, term.coefficient, term.offset); }

  const std::vector<HarmonicTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  int max_order() const;

  // Complex amplitude z_n with U(phi) = sum_n Re(z_n e^{i n phi}).
  std::complex<double> phasor(int order) const;

  double value(double phi) const;
  double derivative(double phi) const;
  double second_derivative(double phi) const;

  // One term per order with nonnegative amplitude and offset in [0, 2 pi / n);
  // orders whose phasor vanishes are dropped.
  HarmonicPotential combined() const;

  // Term-wise sum of two potentials, returned in combined form.
  friend HarmonicPotential merge(const HarmonicPotential& a, const HarmonicPotential& b);

 private:
  std::vector<HarmonicTerm> terms_;
};

HarmonicPotential merge(const HarmonicPotential& a, const HarmonicPotential& b);

}  // namespace squidharm
