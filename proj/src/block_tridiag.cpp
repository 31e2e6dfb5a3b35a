#include "squidharm/block_tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "squidharm/error.hpp"

namespace squidharm {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

VectorXcd BlockTridiagonalHermitian::multiply(const VectorXcd& x) const {
  const int b = block_size;
  VectorXcd y(dimension());
  for (int k = 0; k < blocks(); ++k) {
    auto yk = y.segment(k * b, b);
    yk.noalias() = diagonal[k] * x.segment(k * b, b);
    if (k > 0) yk.noalias() += lower[k - 1] * x.segment((k - 1) * b, b);
    if (k + 1 < blocks()) yk.noalias() += lower[k].adjoint() * x.segment((k + 1) * b, b);
  }
  return y;
}

MatrixXcd BlockTridiagonalHermitian::to_dense() const {
  const int b = block_size;
  MatrixXcd h = MatrixXcd::Zero(dimension(), dimension());
  for (int k = 0; k < blocks(); ++k) {
    h.block(k * b, k * b, b, b) = diagonal[k];
    if (k + 1 < blocks()) {
      h.block((k + 1) * b, k * b, b, b) = lower[k];
      h.block(k * b, (k + 1) * b, b, b) = lower[k].adjoint();
    }
  }
  return h;
}

double BlockTridiagonalHermitian::norm_inf() const {
  double worst = 0.0;
  for (int k = 0; k < blocks(); ++k) {
    Eigen::VectorXd row = diagonal[k].cwiseAbs().rowwise().sum();
    if (k > 0) row += lower[k - 1].cwiseAbs().rowwise().sum();
    if (k + 1 < blocks()) row += lower[k].adjoint().cwiseAbs().rowwise().sum();
    worst = std::max(worst, row.maxCoeff());
  }
  return worst;
}

double BlockTridiagonalHermitian::hermiticity_defect() const {
  double scale = 1e-300, defect = 0.0;
  for (const auto& d : diagonal) {
    scale = std::max(scale, d.cwiseAbs().maxCoeff());
    defect = std::max(defect, (d - d.adjoint()).cwiseAbs().maxCoeff());
  }
  for (const auto& l : lower) scale = std::max(scale, l.cwiseAbs().maxCoeff());
  return defect / scale;
}

bool ShiftedBlockCholesky::factor(const BlockTridiagonalHermitian& H, double sigma) {
  const int b = H.block_size;
  block_size_ = b;
  pivots_.clear();
  gains_.clear();
  upper_.clear();
  const MatrixXcd shift = sigma * MatrixXcd::Identity(b, b);
  MatrixXcd s = H.diagonal[0] - shift;
  for (int k = 0; k < H.blocks(); ++k) {
    pivots_.emplace_back(s);
    if (pivots_.back().info() != Eigen::Success) return false;
    if (k + 1 == H.blocks()) break;
    upper_.push_back(H.lower[k].adjoint());
    gains_.push_back(pivots_.back().solve(upper_.back()).adjoint());
    s = H.diagonal[k + 1] - shift - gains_.back() * upper_.back();
    s = (s + s.adjoint()).eval() / 2.0;
  }
  return true;
}

VectorXcd ShiftedBlockCholesky::solve(const VectorXcd& rhs) const {
  const int b = block_size_;
  const int n = static_cast<int>(pivots_.size());
  VectorXcd y = rhs;
  for (int k = 0; k + 1 < n; ++k) y.segment((k + 1) * b, b).noalias() -= gains_[k] * y.segment(k * b, b);
  VectorXcd x(y.size());
  x.segment((n - 1) * b, b) = pivots_[n - 1].solve(y.segment((n - 1) * b, b));
  for (int k = n - 2; k >= 0; --k) {
    VectorXcd r = y.segment(k * b, b) - upper_[k] * x.segment((k + 1) * b, b);
    x.segment(k * b, b) = pivots_[k].solve(r);
  }
  return x;
}

namespace {

using Operator = std::function<VectorXcd(const VectorXcd&)>;

void orthogonalize(VectorXcd& w, const MatrixXcd& basis, int columns) {
  if (columns == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const VectorXcd c = basis.leftCols(columns).adjoint() * w;
    w.noalias() -= basis.leftCols(columns) * c;
  }
}

VectorXcd random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
  return v;
}

struct RitzPairs {
  Eigen::VectorXd values;  // descending
  MatrixXcd vectors;
  Eigen::VectorXd residuals;
  int iterations = 0;
};

// Lanczos with full reorthogonalization against its own basis and `locked`.
// Stops once the `want` largest Ritz values pass `converged(value, residual)`.
RitzPairs lanczos(const Operator& op, int n, int want, const MatrixXcd& locked, int max_steps,
                  std::mt19937_64& rng, const std::function<bool(double, double)>& converged,
                  bool require_convergence = true) {
  const int locked_cols = static_cast<int>(locked.cols());
  const int m_max = std::min(max_steps, n - locked_cols);
  if (m_max < want) throw InvalidArgument("not enough free dimensions for the requested levels");

  MatrixXcd V(n, m_max);
  std::vector<double> alpha, beta;
  auto fresh = [&](int cols) {
    VectorXcd v = random_vector(n, rng);
    for (int attempt = 0; attempt < 3; ++attempt) {
      orthogonalize(v, locked, locked_cols);
      orthogonalize(v, V, cols);
    }
    return VectorXcd(v / v.norm());
  };

  V.col(0) = fresh(0);
  RitzPairs out;
  for (int j = 0; j < m_max; ++j) {
    VectorXcd w = op(V.col(j));
    const double a = V.col(j).dot(w).real();
    w -= a * V.col(j);
    if (j > 0) w -= beta[j - 1] * V.col(j - 1);
    orthogonalize(w, locked, locked_cols);
    orthogonalize(w, V, j + 1);
    alpha.push_back(a);
    double b = w.norm();
    const double scale = std::max(std::abs(a), 1e-300);
    const bool breakdown = b < 1e-12 * scale;

    const int m = j + 1;
    const bool check = m >= want && (m % 5 == 0 || m == m_max || breakdown);
    if (check) {
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub = m > 1 ? Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1) : Eigen::VectorXd();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const double tail = breakdown ? 0.0 : b;
      bool done = true;
      out.values.resize(want);
      out.residuals.resize(want);
      for (int k = 0; k < want; ++k) {
        const int idx = m - 1 - k;
        out.values(k) = es.eigenvalues()(idx);
        out.residuals(k) = tail * std::abs(es.eigenvectors()(m - 1, idx));
        done = done && converged(out.values(k), out.residuals(k));
      }
      if (done || m == m_max) {
        MatrixXcd S(m, want);
        for (int k = 0; k < want; ++k) S.col(k) = es.eigenvectors().col(m - 1 - k).cast<std::complex<double>>();
        out.vectors = V.leftCols(m) * S;
        out.iterations = m;
        if (!done && require_convergence) {
          throw ConvergenceError("Lanczos did not converge in " + std::to_string(m) +
                                 " iterations (worst residual " + std::to_string(out.residuals.maxCoeff()) + ")");
        }
        return out;
      }
    }
    if (j + 1 == m_max) break;
    if (breakdown) {
      beta.push_back(0.0);
      V.col(j + 1) = fresh(j + 1);
    } else {
      beta.push_back(b);
      V.col(j + 1) = w / b;
    }
  }
  throw ConvergenceError("Lanczos exhausted its basis");
}

}  // namespace

EigenSystem lowest_eigenpairs(const BlockTridiagonalHermitian& H, int levels, const LanczosOptions& options) {
  const int n = H.dimension();
  require(levels >= 1 && levels <= n, "level count out of range");
  require(H.block_size > 0 && H.blocks() > 0, "empty block matrix");
  if (H.hermiticity_defect() > 1e-12) throw InvalidArgument("block matrix is not Hermitian");

  if (n <= 400) {
    return eigensolve_dense(H.to_dense(), levels, options.vectors);
  }

  std::mt19937_64 rng(options.seed);
  const double norm = H.norm_inf();

  // Plain Lanczos Ritz value: an upper bound on the ground energy.
  const Operator plain = [&](const VectorXcd& v) { return H.multiply(v); };
  const auto coarse = lanczos(
      [&](const VectorXcd& v) { return VectorXcd(-plain(v)); }, n, 1, MatrixXcd(n, 0), std::min(40, n), rng,
      [](double, double) { return false; }, false);
  double theta = -coarse.values(0);

  ShiftedBlockCholesky chol;
  double delta = std::max({coarse.residuals(0), 1e-6 * std::max(1.0, std::abs(theta))});
  double sigma = theta - delta;
  int tries = 0;
  while (!chol.factor(H, sigma)) {
    if (++tries > 80) throw SolverError("could not place a shift below the ground state");
    delta *= 4.0;
    sigma = theta - delta;
  }

  auto tolerance_check = [&](double sigma_now) {
    return [&, sigma_now](double mu, double r) {
      const double lambda = sigma_now + 1.0 / mu;
      return r / (mu * mu) <= options.tolerance * std::max(1.0, std::abs(lambda));
    };
  };
  auto shifted = [&](const VectorXcd& v) { return chol.solve(v); };

  // Re-centre the shift just below the ground state.
  const int probe = std::min(levels + 1, n);
  RitzPairs first = lanczos(shifted, n, std::min(2, probe), MatrixXcd(n, 0), options.max_iterations, rng,
                            tolerance_check(sigma));
  const double lambda0 = sigma + 1.0 / first.values(0);
  double gap = first.values.size() > 1 ? (1.0 / first.values(1) - 1.0 / first.values(0)) : lambda0 - sigma;
  double offset = std::clamp(0.5 * gap, 1e-6 * std::max(1.0, std::abs(lambda0)), lambda0 - sigma);
  double sigma2 = lambda0 - offset;
  while (!chol.factor(H, sigma2)) {
    offset *= 4.0;
    sigma2 = lambda0 - offset;
    if (offset > 1e3 * std::max(1.0, norm)) throw SolverError("shift refinement failed");
  }
  sigma = sigma2;

  RitzPairs main = lanczos(shifted, n, levels, MatrixXcd(n, 0), options.max_iterations, rng, tolerance_check(sigma));

  std::vector<std::pair<double, VectorXcd>> pairs;
  for (int k = 0; k < levels; ++k) {
    VectorXcd y = main.vectors.col(k);
    y /= y.norm();
    pairs.emplace_back(y.dot(H.multiply(y)).real(), y);
  }

  if (options.multiplicity_check) {
    MatrixXcd locked(n, 0);
    for (int round = 0; round < levels; ++round) {
      locked.resize(n, static_cast<Eigen::Index>(pairs.size()));
      for (std::size_t k = 0; k < pairs.size(); ++k) locked.col(static_cast<Eigen::Index>(k)) = pairs[k].second;
      if (locked.cols() >= n) break;
      RitzPairs extra = lanczos(shifted, n, 1, locked, options.max_iterations, rng, tolerance_check(sigma));
      VectorXcd y = extra.vectors.col(0);
      y /= y.norm();
      const double value = y.dot(H.multiply(y)).real();
      std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      const double top = pairs.back().first;
      if (value >= top - options.tolerance * std::max(1.0, std::abs(top))) break;
      pairs.emplace_back(value, y);
      std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      pairs.pop_back();
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  EigenSystem out;
  out.energies.resize(levels);
  if (options.vectors) out.states.resize(n, levels);
  for (int k = 0; k < levels; ++k) {
    out.energies(k) = pairs[static_cast<std::size_t>(k)].first;
    if (options.vectors) {
      out.states.col(k) = pairs[static_cast<std::size_t>(k)].second;
      fix_phase(out.states.col(k));
    }
  }
  return out;
}

}  // namespace squidharm
