#include "geogic/mle.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "geogic/error.hpp"

namespace geogic {

void MleOptions::validate() const {
  box.validate();
  if (grid_resolution < 2) throw ConfigError("grid resolution must be at least 2");
  if (!(tolerance > 0.0)) throw ConfigError("optimizer tolerance must be positive");
  if (max_iterations < 0) throw ConfigError("max iterations must be non-negative");
  if (multistart < 1) throw ConfigError("multistart count must be at least 1");
}

double nugget_floor(const Eigen::VectorXd& z) {
  if (z.size() < 2) return 1e-8;
  const double mean = z.mean();
  const double var = (z.array() - mean).square().sum() / static_cast<double>(z.size() - 1);
  return var > 0.0 ? 1e-8 * var : 1e-8;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Maps free coordinates in log space to CovParams inside the box.
struct LogBox {
  ThetaBox box;
  double floor = 0.0;
  std::array<double, 3> lo{}, hi{};
  std::vector<int> free;  // axes that vary

  LogBox(const ThetaBox& b, double v2_floor) : box(b), floor(v2_floor) {
    const std::array<Interval, 3> iv{b.v2, b.sigma2, b.kappa};
    for (int a = 0; a < 3; ++a) {
      const double shift = a == 0 ? floor : 0.0;
      lo[a] = std::log(iv[a].lo + shift);
      hi[a] = std::log(iv[a].hi + shift);
      if (!iv[a].degenerate()) free.push_back(a);
    }
  }

  int dims() const { return static_cast<int>(free.size()); }

  Eigen::VectorXd clamp(Eigen::VectorXd u) const {
    for (int k = 0; k < dims(); ++k) u(k) = std::clamp(u(k), lo[free[k]], hi[free[k]]);
    return u;
  }

  CovParams theta(const Eigen::VectorXd& u) const {
    CovParams t{box.v2.lo, box.sigma2.lo, box.kappa.lo};
    for (int k = 0; k < dims(); ++k) {
      const int a = free[k];
      const double e = std::exp(u(k));
      if (a == 0) t.v2 = std::max(e - floor, 0.0);
      if (a == 1) t.sigma2 = e;
      if (a == 2) t.kappa = e;
    }
    return box.clamp(t);
  }
};

struct Vertex {
  Eigen::VectorXd u;
  double f = kNegInf;
};

double safe_eval(const ThetaObjective& obj, const CovParams& t) {
  try {
    const double v = obj(t);
    return std::isfinite(v) ? v : kNegInf;
  } catch (const SingularityError&) {
    return kNegInf;
  }
}

struct StartResult {
  Vertex best;
  std::vector<MleTraceEntry> trace;
  int evaluations = 0;
};

StartResult nelder_mead(const ThetaObjective& obj, const LogBox& lb, const Vertex& start,
                        const Eigen::VectorXd& step, const MleOptions& opts, int start_id) {
  const int d = lb.dims();
  StartResult res;
  auto eval = [&](const Eigen::VectorXd& u) {
    ++res.evaluations;
    return safe_eval(obj, lb.theta(u));
  };

  std::vector<Vertex> simplex(d + 1);
  simplex[0] = start;
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd u = start.u;
    const int a = lb.free[k];
    u(k) = (u(k) + step(k) <= lb.hi[a]) ? u(k) + step(k) : u(k) - step(k);
    u = lb.clamp(u);
    simplex[k + 1] = {u, eval(u)};
  }
  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f > b.f; };
  std::stable_sort(simplex.begin(), simplex.end(), by_value);

  res.best = simplex[0];
  res.trace.push_back({start_id, 0, res.best.f, lb.theta(res.best.u)});

  for (int it = 1; it <= opts.max_iterations; ++it) {
    const double spread = simplex.front().f - simplex.back().f;
    double diameter = 0.0;
    for (int k = 1; k <= d; ++k) diameter = std::max(diameter, (simplex[k].u - simplex[0].u).norm());
    if ((std::isfinite(spread) && spread <= opts.tolerance) || diameter < 1e-10) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int k = 0; k < d; ++k) centroid += simplex[k].u;
    centroid /= d;
    const Vertex& worst = simplex[d];

    auto point = [&](double coef) {
      return lb.clamp(centroid + coef * (centroid - worst.u));
    };
    Vertex refl{point(1.0), 0.0};
    refl.f = eval(refl.u);

    if (refl.f > simplex[0].f) {
      Vertex expd{point(2.0), 0.0};
      expd.f = eval(expd.u);
      simplex[d] = expd.f > refl.f ? expd : refl;
    } else if (refl.f > simplex[d - 1].f) {
      simplex[d] = refl;
    } else {
      const bool outside = refl.f > worst.f;
      Vertex contr{point(outside ? 0.5 : -0.5), 0.0};
      contr.f = eval(contr.u);
      if (contr.f > (outside ? refl.f : worst.f)) {
        simplex[d] = contr;
      } else {
        for (int k = 1; k <= d; ++k) {
          simplex[k].u = lb.clamp(simplex[0].u + 0.5 * (simplex[k].u - simplex[0].u));
          simplex[k].f = eval(simplex[k].u);
        }
      }
    }
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    if (simplex[0].f > res.best.f) {
      res.best = simplex[0];
      res.trace.push_back({start_id, it, res.best.f, lb.theta(res.best.u)});
    }
  }
  return res;
}

// Larger objective wins; ties go to smaller kappa, then smaller sigma2.
bool better(double fa, const CovParams& a, double fb, const CovParams& b) {
  if (fa != fb) return fa > fb;
  if (a.kappa != b.kappa) return a.kappa < b.kappa;
  return a.sigma2 < b.sigma2;
}

BoundaryHits boundary_hits(const ThetaBox& box, const CovParams& t) {
  auto at_edge = [](const Interval& iv, double x) {
    if (iv.degenerate()) return false;
    const double tol = 1e-6 * (iv.hi - iv.lo);
    return x - iv.lo <= tol || iv.hi - x <= tol;
  };
  return {at_edge(box.v2, t.v2), at_edge(box.sigma2, t.sigma2), at_edge(box.kappa, t.kappa)};
}

}  // namespace

MleResult maximize_over_box(const ThetaObjective& objective, const MleOptions& opts,
                            double v2_floor) {
  opts.validate();
  const LogBox lb(opts.box, v2_floor);
  const int d = lb.dims();
  const bool allow_parallel = opts.parallel && !omp_in_parallel();

  MleResult out;
  if (d == 0) {
    const CovParams t = opts.box.clamp({opts.box.v2.lo, opts.box.sigma2.lo, opts.box.kappa.lo});
    const double f = safe_eval(objective, t);
    out.evaluations = 1;
    if (!std::isfinite(f)) {
      throw OptimizationError("objective is not finite at the singleton box point " + to_string(t));
    }
    out.theta_hat = t;
    out.loglik = f;
    out.grid_best = f;
    out.trace.push_back({0, 0, f, t});
    return out;
  }

  // Coarse grid.
  const int r = opts.grid_resolution;
  Index total = 1;
  for (int k = 0; k < d; ++k) total *= r;
  std::vector<Vertex> grid(static_cast<std::size_t>(total));
  Eigen::VectorXd step(d);
  for (int k = 0; k < d; ++k) step(k) = (lb.hi[lb.free[k]] - lb.lo[lb.free[k]]) / (r - 1);

  std::vector<std::exception_ptr> errors(grid.size());
#pragma omp parallel for schedule(dynamic) if (allow_parallel)
  for (Index g = 0; g < total; ++g) {
    try {
      Eigen::VectorXd u(d);
      Index rem = g;
      for (int k = 0; k < d; ++k) {
        const int a = lb.free[k];
        u(k) = lb.lo[a] + step(k) * static_cast<double>(rem % r);
        rem /= r;
      }
      grid[g] = {u, safe_eval(objective, lb.theta(u))};
    } catch (...) {
      errors[g] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  out.evaluations = static_cast<int>(total);

  std::vector<Index> ranked(grid.size());
  std::iota(ranked.begin(), ranked.end(), 0);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](Index a, Index b) { return grid[a].f > grid[b].f; });
  if (!std::isfinite(grid[ranked.front()].f)) {
    throw OptimizationError("profile log-likelihood is not finite at any coarse grid point");
  }
  out.grid_best = grid[ranked.front()].f;

  std::vector<Index> starts;
  for (Index g : ranked) {
    if (static_cast<int>(starts.size()) == opts.multistart || !std::isfinite(grid[g].f)) break;
    starts.push_back(g);
  }

  std::vector<StartResult> results(starts.size());
  std::vector<std::exception_ptr> start_errors(starts.size());
#pragma omp parallel for schedule(dynamic) if (allow_parallel)
  for (std::size_t s = 0; s < starts.size(); ++s) {
    try {
      results[s] = nelder_mead(objective, lb, grid[starts[s]], step, opts, static_cast<int>(s));
    } catch (...) {
      start_errors[s] = std::current_exception();
    }
  }
  for (const auto& e : start_errors) {
    if (e) std::rethrow_exception(e);
  }

  bool first = true;
  for (auto& res : results) {
    out.evaluations += res.evaluations;
    const CovParams t = lb.theta(res.best.u);
    if (first || better(res.best.f, t, out.loglik, out.theta_hat)) {
      out.theta_hat = t;
      out.loglik = res.best.f;
      first = false;
    }
    out.trace.insert(out.trace.end(), res.trace.begin(), res.trace.end());
  }
  out.boundary = boundary_hits(opts.box, out.theta_hat);
  return out;
}

MleResult fit_theta(const ModelAlpha& alpha, const Dataset& data, const MleOptions& opts) {
  data.validate();
  alpha.validate(data.p());
  const auto cols = alpha.columns();
  const ThetaObjective objective = [&](const CovParams& t) {
    const CovMatrix cov = make_covariance(t, data.sites);
    return ProfileEvaluator(cov, data, cols).loglik(alpha);
  };
  MleResult res = maximize_over_box(objective, opts, nugget_floor(data.z));
  res.loglik = profile_loglik(alpha, res.theta_hat, data);
  ++res.evaluations;
  return res;
}

}  // namespace geogic
