#include "squidharm/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "squidharm/constants.hpp"
#include "squidharm/eigen.hpp"
#include "squidharm/error.hpp"
#include "squidharm/spectrum.hpp"

namespace squidharm {

namespace c = constants;

double distance_from_half(double flux_phi0) {
  const double frac = flux_phi0 - std::floor(flux_phi0);
  return std::abs(frac - 0.5);
}

void TransitionDataset::validate() const {
  require(!records.empty(), "dataset is empty");
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    std::ostringstream where;
    where << " (record " << k << ")";
    require(std::isfinite(r.flux_phi0), "flux must be finite" + where.str());
    require(std::isfinite(r.frequency) && r.frequency > 0.0, "frequency must be positive" + where.str());
    require(std::isfinite(r.weight) && r.weight > 0.0, "weight must be positive" + where.str());
    require(r.j == 0 || r.j == 1, "source level must be 0 or 1" + where.str());
    require(r.i > r.j, "target level must exceed source level" + where.str());
    require(r.n_g == 0.0 || r.n_g == 0.5, "n_g branch must be 0 or 0.5" + where.str());
  }
}

std::size_t TransitionDataset::distinct_flux_count() const {
  std::set<double> flux;
  for (const auto& r : records) flux.insert(r.flux_phi0);
  return flux.size();
}

void TransitionDataset::check_identifiable(double near_half_width) const {
  if (records.empty()) throw DegenerateDataError("dataset is empty");
  const std::size_t distinct = distinct_flux_count();
  if (distinct < 4) {
    throw DegenerateDataError("unidentifiable dataset: " + std::to_string(distinct) +
                              " distinct flux points, at least 4 required");
  }
  bool near = false, far = false;
  for (const auto& r : records) (distance_from_half(r.flux_phi0) < near_half_width ? near : far) = true;
  if (!near || !far) {
    throw DegenerateDataError(std::string("unidentifiable dataset: no records ") +
                              (near ? "away from" : "near") + " half flux");
  }
}

bool FitBounds::contains(const FitVector& x) const {
  for (std::size_t k = 0; k < 4; ++k)
    if (!(x[k] > lower[k] && x[k] < upper[k])) return false;
  return true;
}

SquidParams to_params(const FitVector& x, bool per_arm_alpha) {
  SquidParams p;
  p.E_C = x[0];
  p.E_J1_L = x[1];
  p.dE_J = x[2];
  p.alpha = x[3];
  if (per_arm_alpha) p.alpha_right = x[3] * (1.0 - x[2]);
  return p;
}

ChargeBasisSpec fit_cutoff(const SquidParams& params, int levels, double tolerance) {
  params.validate();
  const SquidParams probes[] = {params.with_flux(0.0).with_gate(0.0), params.with_flux(0.0).with_gate(0.5),
                                params.with_flux(0.5).with_gate(0.0), params.with_flux(0.5).with_gate(0.5)};
  auto transitions = [&](const SquidParams& p, int cutoff) {
    const auto e = squid_eigensystem(p, {cutoff, false}, levels).energies;
    return Eigen::VectorXd(e.tail(levels - 1).array() - e(0));
  };
  for (int cutoff = 24; cutoff <= 4096; cutoff *= 2) {
    double change = 0.0;
    for (const auto& p : probes)
      change = std::max(change, (transitions(p, cutoff) - transitions(p, 2 * cutoff)).cwiseAbs().maxCoeff());
    if (change < tolerance) return {cutoff, true};
  }
  throw SolverError("charge cutoff did not converge for the fit model");
}

namespace {

struct Group {
  double flux, n_g;
  std::vector<std::size_t> rows;
  int levels = 0;
};

std::vector<Group> group_records(const TransitionDataset& data) {
  std::map<std::pair<double, double>, std::size_t> index;
  std::vector<Group> groups;
  for (std::size_t k = 0; k < data.records.size(); ++k) {
    const auto& r = data.records[k];
    const auto key = std::make_pair(r.flux_phi0, r.n_g);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, groups.size()).first;
      groups.push_back({r.flux_phi0, r.n_g, {}, 0});
    }
    auto& g = groups[it->second];
    g.rows.push_back(k);
    g.levels = std::max(g.levels, r.i + 1);
  }
  return groups;
}

int max_level(const TransitionDataset& data) {
  int m = 2;
  for (const auto& r : data.records) m = std::max(m, r.i + 1);
  return m;
}

}  // namespace

std::vector<double> model_frequencies(const FitVector& x, const TransitionDataset& data, const CostOptions& options) {
  require(!data.records.empty(), "dataset is empty");
  const SquidParams base = to_params(x, options.per_arm_alpha);
  base.validate();
  const ChargeBasisSpec basis = options.basis.cutoff > 0 ? options.basis : fit_cutoff(base, max_level(data));
  const auto groups = group_records(data);

  const auto energies = indexed_map(
      groups.size(),
      [&](std::size_t k) {
        const auto& g = groups[k];
        try {
          return squid_eigensystem(base.with_flux(g.flux).with_gate(g.n_g), basis, g.levels).energies;
        } catch (const Error& e) {
          const auto& r = data.records[g.rows.front()];
          std::ostringstream msg;
          msg << e.what() << " (record " << g.rows.front() << ": flux_phi0=" << r.flux_phi0 << ", n_g=" << r.n_g
              << ", i=" << r.i << ", j=" << r.j << ")";
          throw SolverError(msg.str());
        }
      },
      options.execution);

  std::vector<double> out(data.records.size());
  for (std::size_t k = 0; k < groups.size(); ++k)
    for (std::size_t row : groups[k].rows) {
      const auto& r = data.records[row];
      out[row] = energies[k](r.i) - energies[k](r.j);
    }
  return out;
}

double spectrum_cost(const FitVector& x, const TransitionDataset& data, const CostOptions& options) {
  data.validate();
  const auto model = model_frequencies(x, data, options);
  double cost = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k) {
    const double d = model[k] - data.records[k].frequency;
    cost += data.records[k].weight * d * d;
  }
  return cost;
}

namespace {

using Vec4 = Eigen::Vector4d;

struct SimplexResult {
  Vec4 u = Vec4::Zero();
  double f = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead on the unit box; trial points are clamped to [0, 1].
template <typename F>
SimplexResult nelder_mead(F&& f, const Vec4& start, double step, int max_evaluations, double x_tol, double f_tol) {
  constexpr int n = 4;
  std::array<Vec4, n + 1> v;
  std::array<double, n + 1> fv;
  SimplexResult out;
  auto eval = [&](const Vec4& u) {
    ++out.evaluations;
    return f(u);
  };
  auto clamp = [](Vec4 u) { return Vec4(u.cwiseMax(0.0).cwiseMin(1.0)); };

  v[0] = clamp(start);
  fv[0] = eval(v[0]);
  for (int k = 0; k < n; ++k) {
    Vec4 u = v[0];
    u(k) += (u(k) + step <= 1.0) ? step : -step;
    v[k + 1] = clamp(u);
    fv[k + 1] = eval(v[k + 1]);
  }

  std::array<int, n + 1> order;
  while (out.evaluations < max_evaluations) {
    for (int k = 0; k <= n; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = order[0], worst = order[n], second = order[n - 1];

    double diameter = 0.0;
    for (int k = 1; k <= n; ++k) diameter = std::max(diameter, (v[order[k]] - v[best]).cwiseAbs().maxCoeff());
    if (diameter < x_tol || (fv[worst] - fv[best]) <= f_tol) {
      out.converged = true;
      break;
    }
    ++out.iterations;

    Vec4 centroid = Vec4::Zero();
    for (int k = 0; k < n; ++k) centroid += v[order[k]];
    centroid /= n;

    const Vec4 xr = clamp(centroid + (centroid - v[worst]));
    const double fr = eval(xr);
    if (fr < fv[best]) {
      const Vec4 xe = clamp(centroid + 2.0 * (centroid - v[worst]));
      const double fe = eval(xe);
      if (fe < fr) {
        v[worst] = xe;
        fv[worst] = fe;
      } else {
        v[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      v[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const Vec4 xc = outside ? clamp(centroid + 0.5 * (xr - centroid)) : clamp(centroid + 0.5 * (v[worst] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      v[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (int k = 1; k <= n; ++k) {
      const int idx = order[k];
      v[idx] = clamp(v[best] + 0.5 * (v[idx] - v[best]));
      fv[idx] = eval(v[idx]);
    }
  }
  const int best = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  out.u = v[best];
  out.f = fv[best];
  return out;
}

struct BoxMap {
  FitBounds bounds;
  FitVector to_x(const Vec4& u) const {
    FitVector x;
    for (std::size_t k = 0; k < 4; ++k) x[k] = bounds.lower[k] + u(static_cast<Eigen::Index>(k)) * (bounds.upper[k] - bounds.lower[k]);
    return x;
  }
  Vec4 to_u(const FitVector& x) const {
    Vec4 u;
    for (std::size_t k = 0; k < 4; ++k) u(static_cast<Eigen::Index>(k)) = (x[k] - bounds.lower[k]) / (bounds.upper[k] - bounds.lower[k]);
    return u;
  }
};

}  // namespace

FitResult fit_spectrum(const TransitionDataset& data, const FitVector& init, const FitOptions& options) {
  data.validate();
  data.check_identifiable();
  require(options.starts >= 1, "need at least one start");
  if (!options.bounds.contains(init)) throw InvalidArgument("initial point outside the parameter bounds");

  const int levels = max_level(data);
  CostOptions cost_options;
  cost_options.per_arm_alpha = options.per_arm_alpha;
  cost_options.basis = options.basis ? *options.basis : fit_cutoff(to_params(init, options.per_arm_alpha), levels);
  cost_options.execution = Execution::serial;

  const BoxMap box{options.bounds};
  auto objective = [&](const Vec4& u) {
    const FitVector x = box.to_x(u);
    const SquidParams p = to_params(x, options.per_arm_alpha);
    // Bounds of SquidParams are wider than the box; the box is the binding constraint.
    try {
      p.validate();
      return spectrum_cost(x, data, cost_options);
    } catch (const InvalidArgument&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // Latin-hypercube starts around the initial point; start 0 is the point itself.
  std::mt19937_64 rng(options.seed);
  std::vector<Vec4> starts(static_cast<std::size_t>(options.starts), box.to_u(init));
  if (options.starts > 1) {
    const int m = options.starts - 1;
    for (int dim = 0; dim < 4; ++dim) {
      std::vector<int> strata(static_cast<std::size_t>(m));
      for (int k = 0; k < m; ++k) strata[static_cast<std::size_t>(k)] = k;
      std::shuffle(strata.begin(), strata.end(), rng);
      std::uniform_real_distribution<double> jitter(0.0, 1.0);
      for (int k = 0; k < m; ++k) {
        const double t = (strata[static_cast<std::size_t>(k)] + jitter(rng)) / m;
        auto& u = starts[static_cast<std::size_t>(k + 1)](dim);
        u = std::clamp(u + options.start_spread * (2.0 * t - 1.0), 1e-6, 1.0 - 1e-6);
      }
    }
  }

  const double step = std::max(options.start_spread * 0.5, 1e-4);
  const auto first = indexed_map(
      starts.size(),
      [&](std::size_t k) {
        return nelder_mead(objective, starts[k], step, options.start_evaluations, options.x_tolerance,
                           options.f_tolerance);
      },
      options.execution);

  FitResult result;
  int evaluations = 0, iterations = 0;
  std::size_t best = 0;
  for (std::size_t k = 0; k < first.size(); ++k) {
    result.start_costs.push_back(first[k].f);
    evaluations += first[k].evaluations;
    iterations += first[k].iterations;
    if (first[k].f < first[best].f) best = k;
  }

  SimplexResult incumbent = first[best];
  double restart_step = step * 0.2;
  bool converged = false;
  int restarts = 0;
  for (; restarts <= options.max_restarts; ++restarts) {
    const int budget = std::max(options.max_evaluations - evaluations, 50);
    SimplexResult r = nelder_mead(objective, incumbent.u, restart_step, budget, options.x_tolerance, options.f_tolerance);
    evaluations += r.evaluations;
    iterations += r.iterations;
    const double improvement = incumbent.f - r.f;
    if (r.f < incumbent.f) incumbent = r;
    if (r.converged && improvement <= options.f_tolerance + 1e-12 * std::abs(incumbent.f)) {
      converged = true;
      break;
    }
    restart_step = std::max(restart_step * 0.5, 1e-6);
    if (evaluations >= options.max_evaluations && !r.converged) break;
  }

  result.x = box.to_x(incumbent.u);
  result.evaluations = evaluations;
  result.iterations = iterations;
  result.restarts = restarts;
  result.converged = converged;

  if (!converged) {
    std::ostringstream msg;
    msg << "spectrum fit did not converge after " << restarts << " restarts; per-start best costs:";
    for (double s : result.start_costs) msg << ' ' << s;
    throw ConvergenceError(msg.str());
  }

  // The cutoff chosen at the initial point must also hold at the optimum.
  const ChargeBasisSpec check = fit_cutoff(to_params(result.x, options.per_arm_alpha), levels);
  if (check.cutoff > cost_options.basis.cutoff) {
    cost_options.basis = check;
    SimplexResult r = nelder_mead(objective, incumbent.u, 1e-4, options.max_evaluations, options.x_tolerance,
                                  options.f_tolerance);
    result.evaluations += r.evaluations;
    result.x = box.to_x(r.u);
  }
  result.basis = cost_options.basis;

  const auto model = model_frequencies(result.x, data, cost_options);
  const std::size_t n = data.records.size();
  result.cost = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = model[k] - data.records[k].frequency;
    result.residuals.push_back(d);
    result.cost += data.records[k].weight * d * d;
  }
  result.residual_norm = std::sqrt(result.cost);
  result.degrees_of_freedom = static_cast<int>(n) - 4;
  if (result.degrees_of_freedom <= 0) throw DegenerateDataError("unidentifiable dataset: no residual degrees of freedom");
  result.reduced_chi2 = result.cost / result.degrees_of_freedom;

  // Gauss-Newton covariance from central-difference sensitivities.
  Eigen::MatrixXd J(static_cast<Eigen::Index>(n), 4);
  for (int k = 0; k < 4; ++k) {
    const std::size_t ks = static_cast<std::size_t>(k);
    const double h = 1e-5 * (options.bounds.upper[ks] - options.bounds.lower[ks]);
    FitVector xp = result.x, xm = result.x;
    xp[ks] += h;
    xm[ks] -= h;
    const auto fp = model_frequencies(xp, data, cost_options);
    const auto fm = model_frequencies(xm, data, cost_options);
    for (std::size_t r = 0; r < n; ++r)
      J(static_cast<Eigen::Index>(r), k) = std::sqrt(data.records[r].weight) * (fp[r] - fm[r]) / (2.0 * h);
  }
  const Eigen::Vector4d scale = J.colwise().norm().transpose().cwiseMax(1e-300);
  const Eigen::MatrixXd Js = J * scale.cwiseInverse().asDiagonal();
  const Eigen::Matrix4d A = Js.transpose() * Js;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(A);
  if (es.eigenvalues().minCoeff() <= 1e-12 * es.eigenvalues().maxCoeff()) {
    throw DegenerateDataError("unidentifiable dataset: Gauss-Newton Hessian is singular");
  }
  const Eigen::Matrix4d inv_scaled = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                                     es.eigenvectors().transpose();
  result.covariance = result.reduced_chi2 * scale.cwiseInverse().asDiagonal() * inv_scaled *
                      scale.cwiseInverse().asDiagonal();
  for (int k = 0; k < 4; ++k) result.sigma[static_cast<std::size_t>(k)] = std::sqrt(result.covariance(k, k));
  return result;
}

FitVector coarse_initial_guess(const TransitionDataset& data, const FitBounds& bounds) {
  data.validate();
  TransitionDataset subset;
  for (const auto& r : data.records)
    if (r.j == 0 && r.i <= 2) subset.records.push_back(r);
  if (subset.records.empty()) subset = data;

  auto logspace = [](double a, double b, int n) {
    std::vector<double> out;
    for (int k = 0; k < n; ++k) out.push_back(a * std::pow(b / a, static_cast<double>(k) / (n - 1)));
    return out;
  };
  const auto ec = logspace(std::max(bounds.lower[0], 0.02) * 1.05, bounds.upper[0] * 0.8, 10);
  const auto ej = logspace(bounds.lower[1] * 1.5, bounds.upper[1] * 0.95, 14);
  const double de[] = {0.0, 0.02};
  const double al[] = {0.0, 0.005};

  FitVector best{};
  double best_cost = std::numeric_limits<double>::infinity();
  for (double e_c : ec)
    for (double e_j : ej)
      for (double d : de)
        for (double a : al) {
          const FitVector x{e_c, e_j, d, a};
          if (!bounds.contains(x)) continue;
          CostOptions o;
          o.basis = {std::max(24, cutoff_rule(2.0 * e_j, e_c) / 2), false};
          double cost;
          try {
            cost = spectrum_cost(x, subset, o);
          } catch (const Error&) {
            continue;
          }
          if (cost < best_cost) {
            best_cost = cost;
            best = x;
          }
        }
  if (!std::isfinite(best_cost)) throw DegenerateDataError("coarse scan found no admissible starting point");
  return best;
}

FluxRanges measurement_ranges(const SquidParams& params, double near_max, double far_low, double far_high) {
  params.validate();
  require(near_max > 0.0 && far_low < far_high, "invalid frequency windows");
  const ChargeBasisSpec basis = fit_cutoff(params, 2, 1e-7);
  auto omega10 = [&](double f) {
    const auto e = squid_eigensystem(params.with_flux(f).with_gate(0.0), basis, 2).energies;
    return e(1) - e(0);
  };
  // omega_10 decreases monotonically on [0, 0.5] for the SQUID potential.
  auto solve = [&](double target) {
    double lo = 0.0, hi = 0.5;
    if (omega10(lo) < target || omega10(hi) > target) {
      std::ostringstream msg;
      msg << "omega_10 never reaches " << target << " GHz between zero and half flux";
      throw InvalidArgument(msg.str());
    }
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (omega10(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  FluxRanges r;
  const double a = solve(near_max);
  r.near = {a, 1.0 - a};
  r.far = {solve(far_high), solve(far_low)};
  return r;
}

TransitionDataset synthesize_dataset(const SquidParams& params, const SynthOptions& options) {
  params.validate();
  require(options.near_points >= 1 && options.far_points >= 1, "each flux range needs at least one point");
  require(options.levels >= 2, "need at least two levels");
  require(options.noise_mhz >= 0.0, "noise must be nonnegative");
  require(!options.gates.empty(), "need at least one n_g branch");

  const FluxRanges ranges = measurement_ranges(params, options.near_max, options.far_low, options.far_high);
  auto linspace = [](std::array<double, 2> r, int n) {
    std::vector<double> out;
    for (int k = 0; k < n; ++k) out.push_back(n == 1 ? 0.5 * (r[0] + r[1]) : r[0] + (r[1] - r[0]) * k / (n - 1));
    return out;
  };
  std::vector<double> flux = linspace(ranges.far, options.far_points);
  for (double f : linspace(ranges.near, options.near_points)) flux.push_back(f);

  const ChargeBasisSpec basis = fit_cutoff(params, options.levels);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> noise(0.0, options.noise_mhz * 1e-3);

  TransitionDataset data;
  data.provenance = "synthetic";
  data.seed = options.seed;
  for (double f : flux)
    for (double g : options.gates) {
      const auto e = squid_eigensystem(params.with_flux(f).with_gate(g), basis, options.levels).energies;
      for (int j = 0; j <= (options.include_excited ? 1 : 0); ++j)
        for (int i = j + 1; i < options.levels; ++i) {
          if (j == 1 && i == 1) continue;
          double value = e(i) - e(j);
          if (options.noise_mhz > 0.0) value += noise(rng);
          data.records.push_back({f, i, j, g, value, 1.0});
        }
    }
  return data;
}

namespace {

struct LineTerms {
  double S = 0.0, Sa = 0.0, Sb = 0.0, Saa = 0.0, Sab = 0.0, Sbb = 0.0;
};

LineTerms line_terms(const std::vector<LinePoint>& pts, double a, double b) {
  LineTerms t;
  for (const auto& p : pts) {
    const double sx2 = p.sigma_x * p.sigma_x;
    const double v = p.sigma_y * p.sigma_y + b * b * sx2;
    const double r = p.y - a - b * p.x;
    t.S += r * r / v;
    t.Sa += -2.0 * r / v;
    t.Sb += -2.0 * r * p.x / v - 2.0 * b * sx2 * r * r / (v * v);
    t.Saa += 2.0 / v;
    t.Sab += 2.0 * p.x / v + 4.0 * b * sx2 * r / (v * v);
    t.Sbb += 2.0 * p.x * p.x / v + 8.0 * r * p.x * b * sx2 / (v * v) - 2.0 * r * r * sx2 / (v * v) +
             8.0 * r * r * b * b * sx2 * sx2 / (v * v * v);
  }
  return t;
}

double profiled_intercept(const std::vector<LinePoint>& pts, double b) {
  double sw = 0.0, swr = 0.0;
  for (const auto& p : pts) {
    const double w = 1.0 / (p.sigma_y * p.sigma_y + b * b * p.sigma_x * p.sigma_x);
    sw += w;
    swr += w * (p.y - b * p.x);
  }
  return swr / sw;
}

double profiled_cost(const std::vector<LinePoint>& pts, double b) {
  return line_terms(pts, profiled_intercept(pts, b), b).S;
}

}  // namespace

LineFitResult deming_fit(const std::vector<LinePoint>& points) {
  if (points.size() < 3) throw DegenerateDataError("line fit needs at least 3 points");
  std::set<double> xs;
  for (const auto& p : points) {
    require(std::isfinite(p.x) && std::isfinite(p.y), "points must be finite");
    require(std::isfinite(p.sigma_x) && std::isfinite(p.sigma_y) && p.sigma_x > 0.0 && p.sigma_y > 0.0,
            "uncertainties must be positive");
    xs.insert(p.x);
  }
  if (xs.size() < 3) throw DegenerateDataError("line fit needs at least 3 distinct x values");

  // Global scan in the slope angle, then Newton on the profiled cost.
  const int grid = 4000;
  double best_b = 0.0, best_s = std::numeric_limits<double>::infinity();
  double x_scale = 0.0, y_scale = 0.0;
  for (const auto& p : points) {
    x_scale = std::max(x_scale, std::abs(p.x) + p.sigma_x);
    y_scale = std::max(y_scale, std::abs(p.y) + p.sigma_y);
  }
  const double ratio = y_scale / x_scale;
  for (int k = 1; k < grid; ++k) {
    const double theta = -c::pi / 2.0 + c::pi * k / grid;
    const double b = ratio * std::tan(theta);
    const double s = profiled_cost(points, b);
    if (s < best_s) {
      best_s = s;
      best_b = b;
    }
  }
  double b = best_b;
  for (int it = 0; it < 100; ++it) {
    const double a = profiled_intercept(points, b);
    const LineTerms t = line_terms(points, a, b);
    const double curvature = t.Sbb - t.Sab * t.Sab / t.Saa;
    if (!(curvature > 0.0)) break;
    double step = t.Sb / curvature;
    double next = b - step;
    while (profiled_cost(points, next) > t.S * (1.0 + 1e-14) && std::abs(step) > 1e-300) {
      step *= 0.5;
      next = b - step;
    }
    const bool done = std::abs(step) <= 1e-15 * std::max(std::abs(b), ratio * 1e-300);
    b = next;
    if (done || step == 0.0) break;
  }

  LineFitResult out;
  out.slope = b;
  out.intercept = profiled_intercept(points, b);
  out.points = static_cast<int>(points.size());
  const LineTerms t = line_terms(points, out.intercept, out.slope);
  out.chi2 = t.S;
  out.reduced_chi2 = t.S / (out.points - 2);
  Eigen::Matrix2d H;
  H << t.Saa, t.Sab, t.Sab, t.Sbb;
  const Eigen::Matrix2d cov = 2.0 * H.inverse() * out.reduced_chi2;
  out.intercept_sigma = std::sqrt(cov(0, 0));
  out.slope_sigma = std::sqrt(cov(1, 1));
  out.covariance = cov(0, 1);
  return out;
}

InductanceBeta inductance_and_beta(const LineFitResult& fit) {
  InductanceBeta r;
  r.beta = fit.intercept;
  r.beta_sigma = fit.intercept_sigma;
  r.L_physical = fit.slope > 0.0 && std::isfinite(fit.slope);
  if (r.L_physical) {
    r.E_L = 1.0 / (4.0 * fit.slope);
    r.L_pH = c::inductance_ph(r.E_L);
    r.L_sigma = 4.0 * c::inductive_ghz_ph * fit.slope_sigma;
  } else {
    r.E_L = std::numeric_limits<double>::quiet_NaN();
    r.L_pH = std::numeric_limits<double>::quiet_NaN();
    r.L_sigma = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

std::vector<LinePoint> synthesize_ratio_points(const std::vector<double>& x, double L_pH, double beta,
                                               double relative_noise, std::uint64_t seed) {
  require(L_pH > 0.0, "inductance must be positive");
  require(relative_noise > 0.0, "relative noise must be positive");
  const double E_L = c::inductive_energy_ghz(L_pH);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<LinePoint> out;
  for (double xt : x) {
    const double yt = beta + xt / (4.0 * E_L);
    LinePoint p;
    p.sigma_x = relative_noise * std::abs(xt);
    p.sigma_y = relative_noise * std::abs(yt);
    p.x = xt + p.sigma_x * g(rng);
    p.y = yt + p.sigma_y * g(rng);
    out.push_back(p);
  }
  return out;
}

}  // namespace squidharm
