#pragma once

#include <Eigen/Dense>
#include <optional>

#include "geogic/covariance.hpp"
#include "geogic/design.hpp"
#include "geogic/rng.hpp"

namespace geogic {

/// True data-generating model: mean X beta0 (+ zeta_coef * zeta(s)) and
/// covariance Sigma(theta0) = Sigma_eta + v0^2 I.
struct TruthSpec {
  Eigen::VectorXd beta0;                // length p + 1, intercept first
  std::optional<RegressorSpec> zeta;    // unobserved mean term, if any
  double zeta_coef = 1.0;
  CovParams theta0{0.5, 0.5, 1.0};

  void validate(Index design_cols) const;
};

struct Dataset {
  Eigen::VectorXd z;
  Eigen::MatrixXd x;  // n x (p + 1), column 0 is the intercept
  SiteSet sites;

  Index n() const { return z.size(); }
  Index p() const { return x.cols() - 1; }
  void validate() const;
};

// Test hook: switch off either noise source without touching theta0.
struct NoiseHooks {
  bool zero_eta = false;
  bool zero_epsilon = false;
};

/// A simulated dataset together with the pieces the KL oracles need.
struct Simulation {
  Dataset data;
  Eigen::VectorXd mu0;    // true mean at the sites
  Eigen::VectorXd noise;  // realized eta + epsilon
};

/// Z = X beta0 (+ zeta) + F u + sqrt(v0^2) w, F F' = Sigma_eta(theta0), with
/// u from key.stream(eta), w from key.stream(epsilon) and zeta from
/// key.stream(zeta). `eta_cov`, when given, must be the signal covariance
/// (theta0 with v2 = 0) at `sites`; it lets replicates share one factorization.
Simulation simulate_dataset(const TruthSpec& truth, const Eigen::MatrixXd& x,
                            const SiteSet& sites, SeedKey key, NoiseHooks hooks = {},
                            const CovMatrix* eta_cov = nullptr);

CovMatrix signal_covariance(const CovParams& theta0, const SiteSet& sites);

}  // namespace geogic
