#pragma once

#include <Eigen/Dense>

namespace squidharm {

// Truncated oscillator for H_0 = 4 E_c n^2 + E_l phi^2 / 2, with
// phi = phi_zpf (a + a^dag) and n = i n_zpf (a^dag - a).
struct ModeOperators {
  int dimension = 0;
  double E_c = 0.0;  // GHz
  double E_l = 0.0;  // GHz
  Eigen::MatrixXcd position;
  Eigen::MatrixXcd number;

  double phi_zpf() const;
  double n_zpf() const;
  double frequency() const;  // sqrt(8 E_c E_l)

  // omega (a^dag a + 1/2), diagonal; exact on every retained level.
  Eigen::MatrixXcd quadratic_hamiltonian() const;
};

ModeOperators mode_operators(double E_c, double E_l, int dimension);

enum class Trig { cos, sin };

// f(scale * op) through the eigendecomposition of the Hermitian `op`.
Eigen::MatrixXcd trig_of_position(const Eigen::MatrixXcd& op, Trig f, double scale);

// ||[phi, n] - i Id||_inf restricted to the leading (dimension - excluded) levels.
double commutator_defect(const ModeOperators& mode, int excluded = 2);

}  // namespace squidharm
