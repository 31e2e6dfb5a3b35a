#include "squidharm/eigen.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "squidharm/error.hpp"

namespace squidharm {

void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs * (1.0 + 1e-12)) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs > 0.0) v *= std::conj(v(best)) / best_abs;
}

int detect_bandwidth(const Eigen::MatrixXcd& H) {
  int width = 0;
  for (Eigen::Index c = 0; c < H.cols(); ++c)
    for (Eigen::Index r = c + width + 1; r < H.rows(); ++r)
      if (H(r, c) != 0.0 || H(c, r) != 0.0) width = static_cast<int>(r - c);
  return width;
}

double hermiticity_defect(const Eigen::MatrixXcd& H) {
  const double scale = std::max(H.cwiseAbs().maxCoeff(), 1e-300);
  return (H - H.adjoint()).cwiseAbs().maxCoeff() / scale;
}

double max_residual(const Eigen::MatrixXcd& H, const EigenSystem& system) {
  double worst = 0.0;
  for (int j = 0; j < system.size(); ++j) {
    const Eigen::VectorXcd r = H * system.states.col(j) - system.energies(j) * system.states.col(j);
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

EigenSystem eigensolve_dense(const Eigen::MatrixXcd& H, int levels, bool vectors) {
  require(H.rows() == H.cols(), "Hamiltonian must be square");
  require(levels >= 1 && levels <= H.rows(), "requested level count out of range");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      H, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SolverError("dense Hermitian eigensolver did not converge");
  EigenSystem out;
  out.energies = solver.eigenvalues().head(levels);
  if (vectors) {
    out.states = solver.eigenvectors().leftCols(levels);
    for (int j = 0; j < levels; ++j) fix_phase(out.states.col(j));
  }
  return out;
}

EigenSystem eigensolve(const BandedHermitian& H, int levels, bool vectors) {
  const int n = H.dimension;
  require(levels >= 1 && levels <= n, "requested level count out of range");
  const int kd = H.bandwidth;

  // zhbevx overwrites the band; work on a copy.
  Eigen::MatrixXcd ab = H.band;
  std::vector<lapack_complex_double> q(vectors ? static_cast<std::size_t>(n) * n : 1);
  std::vector<double> w(n);
  Eigen::MatrixXcd z(vectors ? n : 1, vectors ? levels : 1);
  std::vector<lapack_int> ifail(n);
  lapack_int found = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');

  const lapack_int info = LAPACKE_zhbevx(
      LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'I', 'L', n, kd,
      reinterpret_cast<lapack_complex_double*>(ab.data()), kd + 1, q.data(), vectors ? n : 1, 0.0,
      0.0, 1, levels, abstol, &found, w.data(), reinterpret_cast<lapack_complex_double*>(z.data()),
      vectors ? n : 1, ifail.data());
  if (info < 0) throw SolverError("zhbevx: illegal argument " + std::to_string(-info));
  if (info > 0) {
    std::string failed;
    for (lapack_int i = 0; i < info && i < 8; ++i) failed += " " + std::to_string(ifail[i]);
    throw SolverError("banded eigensolver: " + std::to_string(info) +
                      " eigenvectors failed to converge (indices:" + failed + ")");
  }
  if (found != levels) throw SolverError("banded eigensolver returned wrong eigenvalue count");

  EigenSystem out;
  out.energies = Eigen::Map<const Eigen::VectorXd>(w.data(), levels);
  if (vectors) {
    out.states = std::move(z);
    for (int j = 0; j < levels; ++j) fix_phase(out.states.col(j));
  }
  return out;
}

EigenSystem eigensolve(const Eigen::MatrixXcd& H, int levels, const EigenOptions& options) {
  require(H.rows() == H.cols(), "Hamiltonian must be square");
  require(H.allFinite(), "Hamiltonian has non-finite entries");
  const double defect = hermiticity_defect(H);
  if (defect > options.hermiticity_tolerance) {
    throw InvalidArgument("matrix is not Hermitian (relative defect " + std::to_string(defect) + ")");
  }
  const int n = static_cast<int>(H.rows());
  const int kd = detect_bandwidth(H);
  if (4 * kd >= n) return eigensolve_dense(H, levels, options.vectors);

  BandedHermitian band;
  band.dimension = n;
  band.bandwidth = kd;
  band.band.resize(kd + 1, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r <= kd; ++r)
      band.band(r, c) = c + r < n ? 0.5 * (H(c + r, c) + std::conj(H(c, c + r))) : 0.0;
  return eigensolve(band, levels, options.vectors);
}

}  // namespace squidharm
