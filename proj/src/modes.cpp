#include "squidharm/modes.hpp"

#include <cmath>

#include "squidharm/eigen.hpp"
#include "squidharm/error.hpp"

namespace squidharm {

double ModeOperators::phi_zpf() const { return std::pow(2.0 * E_c / E_l, 0.25); }
double ModeOperators::n_zpf() const { return std::pow(E_l / (32.0 * E_c), 0.25); }
double ModeOperators::frequency() const { return std::sqrt(8.0 * E_c * E_l); }

Eigen::MatrixXcd ModeOperators::quadratic_hamiltonian() const {
  Eigen::VectorXcd d(dimension);
  for (int k = 0; k < dimension; ++k) d(k) = frequency() * (k + 0.5);
  return d.asDiagonal();
}

ModeOperators mode_operators(double E_c, double E_l, int dimension) {
  require(std::isfinite(E_c) && E_c > 0.0, "mode E_c must be positive");
  require(std::isfinite(E_l) && E_l > 0.0, "mode E_l must be positive");
  require(dimension >= 3, "mode dimension must be at least 3");

  ModeOperators m;
  m.dimension = dimension;
  m.E_c = E_c;
  m.E_l = E_l;

  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dimension, dimension);
  for (int k = 1; k < dimension; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const Eigen::MatrixXcd ad = a.adjoint();
  const std::complex<double> i(0.0, 1.0);
  m.position = m.phi_zpf() * (a + ad);
  m.number = i * m.n_zpf() * (ad - a);
  return m;
}

Eigen::MatrixXcd trig_of_position(const Eigen::MatrixXcd& op, Trig f, double scale) {
  require(op.rows() == op.cols(), "operator must be square");
  if (hermiticity_defect(op) > 1e-12) throw InvalidArgument("operator is not self-adjoint");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op);
  if (es.info() != Eigen::Success) throw SolverError("eigendecomposition of position operator failed");
  Eigen::VectorXd values = es.eigenvalues() * scale;
  values = f == Trig::cos ? values.array().cos().eval() : values.array().sin().eval();
  Eigen::MatrixXcd out = es.eigenvectors() * values.asDiagonal() * es.eigenvectors().adjoint();
  return (out + out.adjoint()) / 2.0;
}

double commutator_defect(const ModeOperators& mode, int excluded) {
  const int k = mode.dimension - excluded;
  require(k > 0, "nothing left after excluding top levels");
  const Eigen::MatrixXcd c = mode.position * mode.number - mode.number * mode.position;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(k, k);
  const std::complex<double> i(0.0, 1.0);
  return (c.topLeftCorner(k, k) - i * id).cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace squidharm
