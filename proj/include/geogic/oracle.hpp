#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "geogic/covariance.hpp"
#include "geogic/datagen.hpp"
#include "geogic/likelihood.hpp"
#include "geogic/mle.hpp"

namespace geogic {

/// What the KL oracles need to know about the truth: the mean at the sites
/// and the true covariance. The covariance need not belong to the fitted
/// family (pass any dense matrix through CovMatrix::from_dense).
struct TruthContext {
  Eigen::VectorXd mu0;
  CovMatrix sigma0;

  static TruthContext from_simulation(const Simulation& sim, const CovParams& theta0);
};

struct KlReport {
  double l0 = 0.0;          // covariance-only loss L0(theta)
  double bias = 0.0;        // 1/2 || Sigma^{-1/2} A mu0 ||^2
  double stochastic = 0.0;  // 1/2 e' Sigma^{-1} M e, e = eta + epsilon
  double total = 0.0;       // l0 + bias + stochastic
  double direct = 0.0;      // Gaussian KL divergence evaluated directly
  double discrepancy = 0.0; // direct - total
};

struct RiskReport {
  double l0 = 0.0;
  double bias = 0.0;        // 1/2 mu0' Sigma^{-1} A mu0
  double trace_term = 0.0;  // 1/2 tr(Sigma^{-1} M Sigma0)
  double total = 0.0;
  int projector_rank = 0;   // |alpha| + 1 = tr(M)
  int regressor_count = 0;  // |alpha|
};

// 1/2 {logdet Sigma - logdet Sigma0 + tr(Sigma0 Sigma^{-1}) - n}.
double l0_loss(const CovMatrix& sigma, const CovMatrix& sigma0);

KlReport kl_loss(const ModelAlpha& alpha, const CovMatrix& sigma, const TruthContext& truth,
                 const Eigen::VectorXd& noise, const Dataset& data);
KlReport kl_loss(const ModelAlpha& alpha, const CovParams& theta, const TruthContext& truth,
                 const Eigen::VectorXd& noise, const Dataset& data);

RiskReport kl_risk(const ModelAlpha& alpha, const CovMatrix& sigma, const TruthContext& truth,
                   const Dataset& data);
RiskReport kl_risk(const ModelAlpha& alpha, const CovParams& theta, const TruthContext& truth,
                   const Dataset& data);

/// argmin over opts.box of R(alpha; theta), using the same grid + simplex
/// search as the likelihood maximizer.
MleResult pseudo_true_theta(const ModelAlpha& alpha, const TruthContext& truth,
                            const Dataset& data, const MleOptions& opts);

// --- closed-form constants for the 1D exponential examples ---

struct OmittedWhiteNoise {
  double beta = 0.0;
  double v2 = 0.0;
};

struct OmittedExpGp {
  double beta = 0.0;
  double sigma2 = 0.0;
  double kappa = 0.0;
};

// Shift of the nugget: sum of beta_j^2 v_j^2 over omitted regressors.
double white_noise_nugget_shift(std::span<const OmittedWhiteNoise> omitted);

// (sigma0^2 + S)^{-1} sum beta_j^2 sigma_j^2 (kappa_j - kappa0), S = sum beta_j^2 sigma_j^2.
double kappa_star(double sigma0_2, double kappa0, std::span<const OmittedExpGp> omitted);

// theta0 + (0, S, kappa_star).
CovParams exp_gp_pseudo_true(const CovParams& theta0, std::span<const OmittedExpGp> omitted);
CovParams white_noise_pseudo_true(const CovParams& theta0,
                                  std::span<const OmittedWhiteNoise> omitted);

inline constexpr int kMaxGammaOrder = 12;

// (k+1) x (p+1) block with entries 1 / (i + j - 1), i and j starting at 1.
Eigen::MatrixXd hilbert_block(int k, int p);

// beta0' V_pp beta0 - beta0' V_pk V_kk^{-1} V_kp beta0, p = beta0.size() - 1.
double gamma_k(const Eigen::VectorXd& beta0, int k);

// theta0 + (0, gamma(k), -(sigma0^2 + gamma(k))^{-1} gamma(k) kappa0).
CovParams monomial_pseudo_true(const CovParams& theta0, const Eigen::VectorXd& beta0, int k);

struct EfficiencyRatio {
  double ratio = 1.0;
  bool floored = false;  // minimum loss was <= 1e-12 and got floored
};

EfficiencyRatio loss_efficiency_ratio(double selected_loss, std::span<const double> losses);

}  // namespace geogic
