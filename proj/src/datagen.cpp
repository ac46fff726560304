#include "geogic/datagen.hpp"

#include <cmath>
#include <random>

#include "geogic/error.hpp"

namespace geogic {

void TruthSpec::validate(Index design_cols) const {
  theta0.validate();
  if (beta0.size() != design_cols) {
    throw ConfigError("beta0 has " + std::to_string(beta0.size()) +
                      " entries but the design has " + std::to_string(design_cols) +
                      " columns (intercept included)");
  }
  if (!beta0.allFinite()) throw ConfigError("beta0 must be finite");
  if (zeta) zeta->validate();
}

void Dataset::validate() const {
  if (z.size() == 0) throw ConfigError("dataset is empty");
  if (x.rows() != z.size() || sites.size() != z.size()) {
    throw ConfigError("dataset dimensions disagree: z has " + std::to_string(z.size()) +
                      " rows, X has " + std::to_string(x.rows()) + ", sites " +
                      std::to_string(sites.size()));
  }
  if (x.cols() < 1) throw ConfigError("design needs an intercept column");
  if (!z.allFinite() || !x.allFinite()) throw ConfigError("dataset has non-finite entries");
}

CovMatrix signal_covariance(const CovParams& theta0, const SiteSet& sites) {
  return make_covariance({0.0, theta0.sigma2, theta0.kappa}, sites);
}

Simulation simulate_dataset(const TruthSpec& truth, const Eigen::MatrixXd& x,
                            const SiteSet& sites, SeedKey key, NoiseHooks hooks,
                            const CovMatrix* eta_cov) {
  truth.validate(x.cols());
  const Index n = sites.size();
  if (x.rows() != n) throw ConfigError("design rows do not match the site count");

  Simulation sim;
  sim.mu0 = x * truth.beta0;
  if (truth.zeta) {
    StreamRng rng = key.stream(Stream::zeta);
    sim.mu0 += truth.zeta_coef * gen_column(*truth.zeta, sites, rng);
  }

  sim.noise.setZero(n);
  if (!hooks.zero_eta) {
    StreamRng rng = key.stream(Stream::eta);
    std::normal_distribution<double> normal;
    Eigen::VectorXd u(n);
    for (Index i = 0; i < n; ++i) u(i) = normal(rng);
    if (eta_cov) {
      if (eta_cov->size() != n) throw ConfigError("shared signal covariance has the wrong size");
      sim.noise += eta_cov->apply_factor(u);
    } else {
      sim.noise += signal_covariance(truth.theta0, sites).apply_factor(u);
    }
  }
  if (!hooks.zero_epsilon && truth.theta0.v2 > 0.0) {
    StreamRng rng = key.stream(Stream::epsilon);
    std::normal_distribution<double> normal;
    const double sd = std::sqrt(truth.theta0.v2);
    for (Index i = 0; i < n; ++i) sim.noise(i) += sd * normal(rng);
  }

  sim.data.z = sim.mu0 + sim.noise;
  sim.data.x = x;
  sim.data.sites = sites;
  return sim;
}

}  // namespace geogic
