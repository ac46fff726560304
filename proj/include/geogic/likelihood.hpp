#pragma once

#include <Eigen/Dense>
#include <compare>
#include <string>
#include <vector>

#include "geogic/covariance.hpp"
#include "geogic/datagen.hpp"

namespace geogic {

/// Candidate regressor subset. Indices refer to design columns 1..p; the
/// intercept (column 0) belongs to every model and is not listed.
class ModelAlpha {
public:
  ModelAlpha() = default;
  // Sorts the indices; rejects duplicates and indices < 1.
  explicit ModelAlpha(std::vector<int> indices);

  static ModelAlpha full(int p);
  static ModelAlpha parse(const std::string& text);

  const std::vector<int>& indices() const { return idx_; }
  int size() const { return static_cast<int>(idx_.size()); }
  bool empty() const { return idx_.empty(); }
  bool contains(const ModelAlpha& other) const;
  // Throws ConfigError if any index exceeds p.
  void validate(Index p) const;
  // Design columns including the intercept: {0, idx...}.
  std::vector<Index> columns() const;
  // "∅" for the intercept-only model, otherwise "{1,2}".
  std::string label() const;

  friend auto operator<=>(const ModelAlpha&, const ModelAlpha&) = default;

private:
  std::vector<int> idx_;
};

// Smaller models first, then lexicographic.
bool canonical_less(const ModelAlpha& a, const ModelAlpha& b);

struct GlsFit {
  Eigen::VectorXd beta_hat;  // p(alpha) + 1 coefficients, intercept first
  double loglik = 0.0;
  Eigen::VectorXd residual;  // Z - X(alpha) beta_hat
  double quad_form = 0.0;    // residual' Sigma^{-1} residual
  double log_det = 0.0;
};

GlsFit gls_beta(const ModelAlpha& alpha, const CovMatrix& cov, const Dataset& data);
GlsFit gls_beta(const ModelAlpha& alpha, const CovParams& theta, const Dataset& data);

double profile_loglik(const ModelAlpha& alpha, const CovMatrix& cov, const Dataset& data);
double profile_loglik(const ModelAlpha& alpha, const CovParams& theta, const Dataset& data);

/// M(alpha; theta) = X (X' S^{-1} X)^{-1} X' S^{-1}, materialized densely.
struct Projection {
  Eigen::MatrixXd m;
  Eigen::MatrixXd complement() const;  // A = I - M
};

inline constexpr Index kMaxDenseProjection = 2000;

Projection projection_matrix(const ModelAlpha& alpha, const CovMatrix& cov, const Dataset& data);
Projection projection_matrix(const ModelAlpha& alpha, const CovParams& theta, const Dataset& data);

/// Profile log-likelihoods for many models at one theta. Solves against the
/// covariance once for [X Z] and reuses the cross-products for every model.
class ProfileEvaluator {
public:
  ProfileEvaluator(const CovMatrix& cov, const Dataset& data);
  // Restrict to a subset of design columns (must include 0).
  ProfileEvaluator(const CovMatrix& cov, const Dataset& data, std::vector<Index> columns);

  double loglik(const ModelAlpha& alpha) const;
  double log_det() const { return log_det_; }

private:
  std::vector<Index> columns_;
  Eigen::MatrixXd cross_;  // [X Z]' Sigma^{-1} [X Z] restricted to columns_
  double log_det_ = 0.0;
  Index n_ = 0;
};

}  // namespace geogic
