#include "geogic/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "geogic/error.hpp"
#include "geogic/kernels.hpp"

namespace geogic {

TruthContext TruthContext::from_simulation(const Simulation& sim, const CovParams& theta0) {
  return {sim.mu0, make_covariance(theta0, sim.data.sites)};
}

namespace {

struct ModelSolve {
  Eigen::MatrixXd xa;    // X(alpha)
  Eigen::MatrixXd sx;    // Sigma^{-1} X(alpha)
  Eigen::LLT<Eigen::MatrixXd> gram;

  // M v = X (X' S^{-1} X)^{-1} X' S^{-1} v
  Eigen::VectorXd project(const Eigen::VectorXd& v) const {
    return xa * gram.solve(sx.transpose() * v);
  }
};

ModelSolve model_solve(const ModelAlpha& alpha, const CovMatrix& sigma, const Dataset& data) {
  alpha.validate(data.p());
  if (sigma.size() != data.n()) throw ConfigError("covariance size does not match the dataset");
  const auto cols = alpha.columns();
  ModelSolve ms;
  ms.xa.resize(data.n(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) ms.xa.col(static_cast<Index>(k)) = data.x.col(cols[k]);
  ms.sx = sigma.solve(ms.xa);
  ms.gram.compute(ms.xa.transpose() * ms.sx);
  if (ms.gram.info() != Eigen::Success) {
    throw SingularDesignError("singular design for model " + alpha.label());
  }
  return ms;
}

double quad(const CovMatrix& sigma, const Eigen::VectorXd& v) {
  return v.dot(sigma.solve(v).col(0));
}

double l0_with_dense_truth(const CovMatrix& sigma, double logdet0, const Eigen::MatrixXd& dense0) {
  const Index n = sigma.size();
  const Eigen::MatrixXd prod = kernels::solve_columns(sigma, dense0);  // Sigma^{-1} Sigma0
  const double tr = prod.trace();
  return 0.5 * (sigma.log_det() - logdet0 + tr - static_cast<double>(n));
}

}  // namespace

double l0_loss(const CovMatrix& sigma, const CovMatrix& sigma0) {
  if (sigma.size() != sigma0.size()) throw ConfigError("covariance sizes differ");
  return l0_with_dense_truth(sigma, sigma0.log_det(), sigma0.to_dense());
}

KlReport kl_loss(const ModelAlpha& alpha, const CovMatrix& sigma, const TruthContext& truth,
                 const Eigen::VectorXd& noise, const Dataset& data) {
  data.validate();
  if (truth.mu0.size() != data.n() || noise.size() != data.n()) {
    throw ConfigError("truth mean or noise has the wrong length");
  }
  const ModelSolve ms = model_solve(alpha, sigma, data);

  KlReport rep;
  rep.l0 = l0_loss(sigma, truth.sigma0);
  const Eigen::VectorXd a_mu0 = truth.mu0 - ms.project(truth.mu0);
  rep.bias = 0.5 * quad(sigma, a_mu0);
  const Eigen::VectorXd m_noise = ms.project(noise);
  rep.stochastic = 0.5 * quad(sigma, m_noise);
  rep.total = rep.l0 + rep.bias + rep.stochastic;

  const Eigen::VectorXd diff = ms.project(data.z) - truth.mu0;
  rep.direct = rep.l0 + 0.5 * quad(sigma, diff);
  rep.discrepancy = rep.direct - rep.total;
  return rep;
}

KlReport kl_loss(const ModelAlpha& alpha, const CovParams& theta, const TruthContext& truth,
                 const Eigen::VectorXd& noise, const Dataset& data) {
  return kl_loss(alpha, make_covariance(theta, data.sites), truth, noise, data);
}

namespace {

RiskReport risk_with_dense_truth(const ModelAlpha& alpha, const CovMatrix& sigma,
                                 const TruthContext& truth, double logdet0,
                                 const Eigen::MatrixXd& dense0, const Dataset& data) {
  const ModelSolve ms = model_solve(alpha, sigma, data);
  RiskReport rep;
  rep.l0 = l0_with_dense_truth(sigma, logdet0, dense0);
  const Eigen::VectorXd a_mu0 = truth.mu0 - ms.project(truth.mu0);
  rep.bias = 0.5 * quad(sigma, a_mu0);
  // tr(Sigma^{-1} M Sigma0) = tr(G^{-1} S_X' Sigma0 S_X), G = X' Sigma^{-1} X.
  const Eigen::MatrixXd inner = ms.sx.transpose() * truth.sigma0.multiply(ms.sx);
  rep.trace_term = 0.5 * ms.gram.solve(inner).trace();
  rep.total = rep.l0 + rep.bias + rep.trace_term;
  rep.regressor_count = alpha.size();
  rep.projector_rank = alpha.size() + 1;
  return rep;
}

}  // namespace

RiskReport kl_risk(const ModelAlpha& alpha, const CovMatrix& sigma, const TruthContext& truth,
                   const Dataset& data) {
  data.validate();
  if (truth.mu0.size() != data.n()) throw ConfigError("truth mean has the wrong length");
  return risk_with_dense_truth(alpha, sigma, truth, truth.sigma0.log_det(),
                               truth.sigma0.to_dense(), data);
}

RiskReport kl_risk(const ModelAlpha& alpha, const CovParams& theta, const TruthContext& truth,
                   const Dataset& data) {
  return kl_risk(alpha, make_covariance(theta, data.sites), truth, data);
}

MleResult pseudo_true_theta(const ModelAlpha& alpha, const TruthContext& truth,
                            const Dataset& data, const MleOptions& opts) {
  data.validate();
  alpha.validate(data.p());
  const double logdet0 = truth.sigma0.log_det();
  const Eigen::MatrixXd dense0 = truth.sigma0.to_dense();
  const ThetaObjective neg_risk = [&](const CovParams& t) {
    const CovMatrix sigma = make_covariance(t, data.sites);
    return -risk_with_dense_truth(alpha, sigma, truth, logdet0, dense0, data).total;
  };
  const double floor = 1e-8 * dense0.diagonal().mean();
  MleResult res = maximize_over_box(neg_risk, opts, floor);
  // The optimizer maximizes; report risk values with their natural sign.
  res.loglik = -res.loglik;
  res.grid_best = -res.grid_best;
  for (auto& e : res.trace) e.loglik = -e.loglik;
  return res;
}

double white_noise_nugget_shift(std::span<const OmittedWhiteNoise> omitted) {
  double s = 0.0;
  for (const auto& o : omitted) s += o.beta * o.beta * o.v2;
  return s;
}

double kappa_star(double sigma0_2, double kappa0, std::span<const OmittedExpGp> omitted) {
  double var = 0.0;
  double num = 0.0;
  for (const auto& o : omitted) {
    const double w = o.beta * o.beta * o.sigma2;
    var += w;
    num += w * (o.kappa - kappa0);
  }
  return num / (sigma0_2 + var);
}

CovParams exp_gp_pseudo_true(const CovParams& theta0, std::span<const OmittedExpGp> omitted) {
  double var = 0.0;
  for (const auto& o : omitted) var += o.beta * o.beta * o.sigma2;
  return {theta0.v2, theta0.sigma2 + var,
          theta0.kappa + kappa_star(theta0.sigma2, theta0.kappa, omitted)};
}

CovParams white_noise_pseudo_true(const CovParams& theta0,
                                  std::span<const OmittedWhiteNoise> omitted) {
  return {theta0.v2 + white_noise_nugget_shift(omitted), theta0.sigma2, theta0.kappa};
}

Eigen::MatrixXd hilbert_block(int k, int p) {
  if (k < 0 || p < 0) throw ConfigError("Hilbert block orders must be non-negative");
  Eigen::MatrixXd v(k + 1, p + 1);
  for (int i = 1; i <= k + 1; ++i)
    for (int j = 1; j <= p + 1; ++j) v(i - 1, j - 1) = 1.0 / static_cast<double>(i + j - 1);
  return v;
}

double gamma_k(const Eigen::VectorXd& beta0, int k) {
  const int p = static_cast<int>(beta0.size()) - 1;
  if (p < 0) throw ConfigError("beta0 must include the intercept");
  if (k < 0 || k > p) throw ConfigError("gamma(k) needs 0 <= k <= p");
  if (k > kMaxGammaOrder) {
    throw NumericalError("gamma(k) for k > " + std::to_string(kMaxGammaOrder) +
                         " is numerically meaningless (Hilbert conditioning)");
  }
  // V_pk V_kk^{-1} V_kp = V_pp when k = p.
  if (k == p) return 0.0;
  const Eigen::MatrixXd vpp = hilbert_block(p, p);
  const Eigen::MatrixXd vkp = hilbert_block(k, p);
  const Eigen::MatrixXd vkk = hilbert_block(k, k);
  const Eigen::VectorXd w = vkp * beta0;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(vkk);
  return beta0.dot(vpp * beta0) - w.dot(ldlt.solve(w));
}

CovParams monomial_pseudo_true(const CovParams& theta0, const Eigen::VectorXd& beta0, int k) {
  const double g = gamma_k(beta0, k);
  return {theta0.v2, theta0.sigma2 + g, theta0.kappa - g * theta0.kappa / (theta0.sigma2 + g)};
}

EfficiencyRatio loss_efficiency_ratio(double selected_loss, std::span<const double> losses) {
  if (losses.empty()) throw ConfigError("loss efficiency needs at least one model loss");
  double lo = *std::min_element(losses.begin(), losses.end());
  EfficiencyRatio r;
  if (lo <= 1e-12) {
    lo = 1e-12;
    r.floored = true;
  }
  r.ratio = std::max(selected_loss, lo) / lo;
  return r;
}

}  // namespace geogic
