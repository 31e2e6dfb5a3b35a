#include "squidharm/hamiltonian.hpp"

#include <cmath>
#include <string>

#include "squidharm/error.hpp"

namespace squidharm {

std::complex<double> BandedHermitian::operator()(int row, int col) const {
  if (row >= col) {
    const int r = row - col;
    return r <= bandwidth ? band(r, col) : std::complex<double>{};
  }
  const int r = col - row;
  return r <= bandwidth ? std::conj(band(r, row)) : std::complex<double>{};
}

Eigen::MatrixXcd BandedHermitian::to_dense() const {
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(dimension, dimension);
  for (int c = 0; c < dimension; ++c) {
    for (int r = 0; r <= bandwidth && c + r < dimension; ++r) {
      dense(c + r, c) = band(r, c);
      if (r > 0) dense(c, c + r) = std::conj(band(r, c));
    }
  }
  return dense;
}

double BandedHermitian::norm_inf() const {
  double best = 0.0;
  for (int row = 0; row < dimension; ++row) {
    double sum = 0.0;
    for (int col = std::max(0, row - bandwidth); col <= std::min(dimension - 1, row + bandwidth); ++col)
      sum += std::abs((*this)(row, col));
    best = std::max(best, sum);
  }
  return best;
}

BandedHermitian hamiltonian_band(const HarmonicPotential& potential, double E_C, double n_g,
                                 const ChargeBasisSpec& basis) {
  require(basis.cutoff >= 0, "charge cutoff must be nonnegative");
  require(std::isfinite(E_C) && std::isfinite(n_g), "E_C and n_g must be finite");
  const int dim = basis.dimension();
  const int reach = potential.max_order();
  if (reach > basis.cutoff) {
    throw InvalidArgument("charge cutoff " + std::to_string(basis.cutoff) +
                          " too small for harmonic order " + std::to_string(reach));
  }

  BandedHermitian H;
  H.dimension = dim;
  H.bandwidth = reach;
  H.band = Eigen::MatrixXcd::Zero(reach + 1, dim);
  for (int i = 0; i < dim; ++i) {
    const double q = basis.charge(i) - n_g;
    H.band(0, i) = 4.0 * E_C * q * q;
  }
  for (const auto& t : potential.terms()) {
    const std::complex<double> amp = 0.5 * t.coefficient * std::polar(1.0, -t.order * t.offset);
    for (int col = 0; col + t.order < dim; ++col) H.band(t.order, col) += amp;
  }
  return H;
}

Eigen::MatrixXcd hamiltonian_matrix(const HarmonicPotential& potential, double E_C, double n_g,
                                    const ChargeBasisSpec& basis) {
  return hamiltonian_band(potential, E_C, n_g, basis).to_dense();
}

Eigen::VectorXd charge_diagonal(const ChargeBasisSpec& basis) {
  Eigen::VectorXd n(basis.dimension());
  for (int i = 0; i < basis.dimension(); ++i) n(i) = basis.charge(i);
  return n;
}

}  // namespace squidharm
