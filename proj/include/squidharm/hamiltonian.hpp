#pragma once

#include <Eigen/Dense>

#include "squidharm/potential.hpp"

namespace squidharm {

// Charge states |n>, n in [-cutoff, cutoff]. Convention: e^{i phi}|n> = |n+1>.
struct ChargeBasisSpec {
  int cutoff = 0;
  bool converged = false;  // set by the cutoff selector after a doubling check

  int dimension() const { return 2 * cutoff + 1; }
  int index(int charge) const { return charge + cutoff; }
  int charge(int index) const { return index - cutoff; }
};

// Hermitian band matrix in LAPACK lower storage: band(r, c) = H(c + r, c).
struct BandedHermitian {
  int dimension = 0;
  int bandwidth = 0;
  Eigen::MatrixXcd band;  // (bandwidth + 1) x dimension, column-major

  std::complex<double> operator()(int row, int col) const;
  Eigen::MatrixXcd to_dense() const;
  double norm_inf() const;
};

// 4 E_C (n - n_g)^2 on the diagonal; each term c cos(k (phi - d)) adds
// (c / 2) e^{-i k d} at (n + k, n) plus the conjugate at (n, n + k).
BandedHermitian hamiltonian_band(const HarmonicPotential& potential, double E_C, double n_g,
                                 const ChargeBasisSpec& basis);

Eigen::MatrixXcd hamiltonian_matrix(const HarmonicPotential& potential, double E_C, double n_g,
                                    const ChargeBasisSpec& basis);

// Charge-number operator n (diagonal) in the given basis.
Eigen::VectorXd charge_diagonal(const ChargeBasisSpec& basis);

}  // namespace squidharm
