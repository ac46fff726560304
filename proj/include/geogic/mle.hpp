#pragma once

#include <functional>
#include <vector>

#include "geogic/covariance.hpp"
#include "geogic/datagen.hpp"
#include "geogic/likelihood.hpp"

namespace geogic {

struct MleOptions {
  ThetaBox box;
  int grid_resolution = 7;   // coarse grid points per free axis
  double tolerance = 1e-8;   // absolute, on the objective
  int max_iterations = 200;  // simplex iterations per start
  int multistart = 3;
  bool parallel = true;      // grid points and starts across OpenMP threads

  void validate() const;
};

struct MleTraceEntry {
  int start = 0;
  int iteration = 0;
  double loglik = 0.0;
  CovParams theta;
};

struct BoundaryHits {
  bool v2 = false;
  bool sigma2 = false;
  bool kappa = false;
  bool any() const { return v2 || sigma2 || kappa; }
};

struct MleResult {
  CovParams theta_hat;
  double loglik = 0.0;
  std::vector<MleTraceEntry> trace;  // improvements only, per start
  int evaluations = 0;
  double grid_best = 0.0;            // best value on the coarse grid
  BoundaryHits boundary;
};

// Objective to maximize. Non-finite values and SingularityError count as -inf.
using ThetaObjective = std::function<double(const CovParams&)>;

/// Coarse grid over log(v2 + floor), log(sigma2), log(kappa), then clamped
/// Nelder-Mead from the best `multistart` grid points. Degenerate box axes
/// are held fixed; a singleton box evaluates exactly once.
MleResult maximize_over_box(const ThetaObjective& objective, const MleOptions& opts,
                            double v2_floor);

/// theta_hat(alpha) maximizing the profile log-likelihood over opts.box.
MleResult fit_theta(const ModelAlpha& alpha, const Dataset& data, const MleOptions& opts);

// 1e-8 times the sample variance of z (1e-8 if z is constant).
double nugget_floor(const Eigen::VectorXd& z);

}  // namespace geogic
