#pragma once

#include <vector>

#include <Eigen/Dense>

#include "squidharm/eigen.hpp"

namespace squidharm {

// Hermitian matrix made of equal-size blocks on the diagonal and first
// sub/super-diagonal: H(k, k) = diagonal[k], H(k + 1, k) = lower[k].
struct BlockTridiagonalHermitian {
  int block_size = 0;
  std::vector<Eigen::MatrixXcd> diagonal;
  std::vector<Eigen::MatrixXcd> lower;

  int blocks() const { return static_cast<int>(diagonal.size()); }
  int dimension() const { return block_size * blocks(); }

  Eigen::VectorXcd multiply(const Eigen::VectorXcd& x) const;
  Eigen::MatrixXcd to_dense() const;
  double norm_inf() const;
  // Relative defect of the diagonal blocks (the off-diagonal part is Hermitian by storage).
  double hermiticity_defect() const;
};

// Block Cholesky factorization of H - sigma. Succeeds only when sigma lies
// strictly below the lowest eigenvalue.
class ShiftedBlockCholesky {
 public:
  // Returns false when H - sigma is not positive definite.
  bool factor(const BlockTridiagonalHermitian& H, double sigma);
  Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;

 private:
  int block_size_ = 0;
  std::vector<Eigen::LLT<Eigen::MatrixXcd>> pivots_;
  std::vector<Eigen::MatrixXcd> gains_;  // lower[k] * S_k^{-1}
  std::vector<Eigen::MatrixXcd> upper_;  // lower[k]^H
};

struct LanczosOptions {
  int max_iterations = 600;
  double tolerance = 1e-10;       // relative to max(1, |lambda|)
  bool vectors = false;
  bool multiplicity_check = true; // second pass deflated against the first
  unsigned long seed = 20240607;
};

// Lowest `levels` eigenpairs by shift-invert Lanczos with full
// reorthogonalization. The shift is placed below the ground state by a Ritz
// estimate and confirmed by the Cholesky inertia test.
EigenSystem lowest_eigenpairs(const BlockTridiagonalHermitian& H, int levels,
                              const LanczosOptions& options = {});

}  // namespace squidharm
