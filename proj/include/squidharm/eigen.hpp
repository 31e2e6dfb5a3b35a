#pragma once

#include <Eigen/Dense>

#include "squidharm/hamiltonian.hpp"

namespace squidharm {

// Lowest eigenpairs, energies ascending. `states` holds column eigenvectors
// (empty when only values were requested); each column is phase-fixed so its
// largest-magnitude component is real and positive.
struct EigenSystem {
  Eigen::VectorXd energies;
  Eigen::MatrixXcd states;

  int size() const { return static_cast<int>(energies.size()); }
  bool has_states() const { return states.cols() == energies.size() && states.size() > 0; }
};

struct EigenOptions {
  bool vectors = true;
  double hermiticity_tolerance = 1e-12;  // relative to max |H_ij|
};

// Dispatches to the banded LAPACK path when H has a narrow band, otherwise to
// the dense solver. Rejects non-Hermitian input.
EigenSystem eigensolve(const Eigen::MatrixXcd& H, int levels, const EigenOptions& options = {});
EigenSystem eigensolve(const BandedHermitian& H, int levels, bool vectors = true);

// Dense Eigen::SelfAdjointEigenSolver path; kept as the reference for the
// banded solver.
EigenSystem eigensolve_dense(const Eigen::MatrixXcd& H, int levels, bool vectors = true);

// Band half-width of H (largest |i - j| with a nonzero entry).
int detect_bandwidth(const Eigen::MatrixXcd& H);

double hermiticity_defect(const Eigen::MatrixXcd& H);

// max_j ||H v_j - lambda_j v_j||_inf
double max_residual(const Eigen::MatrixXcd& H, const EigenSystem& system);

// Fix the global phase: largest-magnitude entry becomes real positive.
void fix_phase(Eigen::Ref<Eigen::VectorXcd> v);

}  // namespace squidharm
