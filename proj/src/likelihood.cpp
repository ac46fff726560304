#include "geogic/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "geogic/error.hpp"

namespace geogic {

ModelAlpha::ModelAlpha(std::vector<int> indices) : idx_(std::move(indices)) {
  std::sort(idx_.begin(), idx_.end());
  if (!idx_.empty() && idx_.front() < 1) {
    throw ConfigError("model indices start at 1 (the intercept is implicit)");
  }
  if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end()) {
    throw ConfigError("model indices must be distinct");
  }
}

ModelAlpha ModelAlpha::full(int p) {
  std::vector<int> v(static_cast<std::size_t>(std::max(p, 0)));
  for (int j = 0; j < p; ++j) v[j] = j + 1;
  return ModelAlpha{std::move(v)};
}

ModelAlpha ModelAlpha::parse(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (c != '{' && c != '}' && c != ' ') t.push_back(c);
  }
  if (t.empty() || t == "∅" || t == "0") return {};
  std::vector<int> v;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int k = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      v.push_back(k);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse model '" + text + "'");
    }
  }
  return ModelAlpha{std::move(v)};
}

bool ModelAlpha::contains(const ModelAlpha& other) const {
  return std::includes(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end());
}

void ModelAlpha::validate(Index p) const {
  if (!idx_.empty() && idx_.back() > p) {
    throw ConfigError("model " + label() + " refers to column " + std::to_string(idx_.back()) +
                      " but p = " + std::to_string(p));
  }
}

std::vector<Index> ModelAlpha::columns() const {
  std::vector<Index> cols{0};
  for (int j : idx_) cols.push_back(j);
  return cols;
}

std::string ModelAlpha::label() const {
  if (idx_.empty()) return "∅";
  std::string s = "{";
  for (std::size_t k = 0; k < idx_.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(idx_[k]);
  }
  return s + "}";
}

bool canonical_less(const ModelAlpha& a, const ModelAlpha& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

// Cholesky of the small Gram matrix; a column whose pivot collapses relative
// to its own diagonal is a linear combination of the earlier ones.
Eigen::LLT<Eigen::MatrixXd> factor_gram(const Eigen::MatrixXd& gram,
                                        const std::vector<Index>& columns) {
  const Index k = gram.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(k, k);
  std::vector<Index> dependent;
  for (Index j = 0; j < k; ++j) {
    double d = gram(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 1e-11 * std::abs(gram(j, j))) || !std::isfinite(d)) {
      dependent.push_back(columns[j]);
      d = 1.0;  // keep going to report every dependent column
    }
    l(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < k; ++i) {
      l(i, j) = (gram(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  if (!dependent.empty()) {
    std::string names;
    for (Index c : dependent) {
      names += (names.empty() ? "" : ", ") + (c == 0 ? std::string("intercept") : "x" + std::to_string(c));
    }
    throw SingularDesignError("singular design: column(s) " + names +
                              " are linearly dependent on earlier columns");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw SingularDesignError("singular design Gram matrix");
  return llt;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, const std::vector<Index>& cols) {
  Eigen::MatrixXd out(x.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = x.col(cols[k]);
  return out;
}

void check_inputs(const ModelAlpha& alpha, const CovMatrix& cov, const Dataset& data) {
  data.validate();
  alpha.validate(data.p());
  if (cov.size() != data.n()) throw ConfigError("covariance size does not match the dataset");
}

}  // namespace

GlsFit gls_beta(const ModelAlpha& alpha, const CovMatrix& cov, const Dataset& data) {
  check_inputs(alpha, cov, data);
  const auto cols = alpha.columns();
  const Index k = static_cast<Index>(cols.size());
  const Index n = data.n();

  Eigen::MatrixXd xz(n, k + 1);
  xz.leftCols(k) = select_columns(data.x, cols);
  xz.col(k) = data.z;
  const Eigen::MatrixXd s = cov.solve(xz);  // Sigma^{-1} [X(alpha) Z]

  const Eigen::MatrixXd gram = xz.leftCols(k).transpose() * s.leftCols(k);
  const Eigen::VectorXd rhs = xz.leftCols(k).transpose() * s.col(k);
  const auto llt = factor_gram(gram, cols);

  GlsFit fit;
  fit.beta_hat = llt.solve(rhs);
  fit.residual = data.z - xz.leftCols(k) * fit.beta_hat;
  fit.quad_form = fit.residual.dot(s.col(k) - s.leftCols(k) * fit.beta_hat);
  fit.log_det = cov.log_det();
  fit.loglik = -0.5 * static_cast<double>(n) * kLog2Pi - 0.5 * fit.log_det - 0.5 * fit.quad_form;
  return fit;
}

GlsFit gls_beta(const ModelAlpha& alpha, const CovParams& theta, const Dataset& data) {
  return gls_beta(alpha, make_covariance(theta, data.sites), data);
}

double profile_loglik(const ModelAlpha& alpha, const CovMatrix& cov, const Dataset& data) {
  return gls_beta(alpha, cov, data).loglik;
}

double profile_loglik(const ModelAlpha& alpha, const CovParams& theta, const Dataset& data) {
  return gls_beta(alpha, theta, data).loglik;
}

Eigen::MatrixXd Projection::complement() const {
  return Eigen::MatrixXd::Identity(m.rows(), m.cols()) - m;
}

Projection projection_matrix(const ModelAlpha& alpha, const CovMatrix& cov, const Dataset& data) {
  check_inputs(alpha, cov, data);
  if (data.n() > kMaxDenseProjection) {
    throw ConfigError("dense projection limited to n <= " + std::to_string(kMaxDenseProjection));
  }
  const auto cols = alpha.columns();
  const Eigen::MatrixXd xa = select_columns(data.x, cols);
  const Eigen::MatrixXd s = cov.solve(xa);
  const auto llt = factor_gram(xa.transpose() * s, cols);
  // Sigma^{-1} is symmetric, so X' Sigma^{-1} = (Sigma^{-1} X)'.
  return Projection{xa * llt.solve(s.transpose())};
}

Projection projection_matrix(const ModelAlpha& alpha, const CovParams& theta, const Dataset& data) {
  return projection_matrix(alpha, make_covariance(theta, data.sites), data);
}

ProfileEvaluator::ProfileEvaluator(const CovMatrix& cov, const Dataset& data)
    : ProfileEvaluator(cov, data, ModelAlpha::full(static_cast<int>(data.p())).columns()) {}

ProfileEvaluator::ProfileEvaluator(const CovMatrix& cov, const Dataset& data,
                                   std::vector<Index> columns)
    : columns_(std::move(columns)), log_det_(cov.log_det()), n_(data.n()) {
  if (columns_.empty() || columns_.front() != 0) {
    throw ConfigError("evaluator columns must start with the intercept");
  }
  const Index k = static_cast<Index>(columns_.size());
  Eigen::MatrixXd xz(n_, k + 1);
  xz.leftCols(k) = select_columns(data.x, columns_);
  xz.col(k) = data.z;
  cross_ = xz.transpose() * cov.solve(xz);
}

double ProfileEvaluator::loglik(const ModelAlpha& alpha) const {
  const auto cols = alpha.columns();
  const Index k = static_cast<Index>(cols.size());
  const Index zpos = static_cast<Index>(columns_.size());
  std::vector<Index> pos(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    auto it = std::find(columns_.begin(), columns_.end(), cols[c]);
    if (it == columns_.end()) throw ConfigError("model " + alpha.label() + " outside evaluator columns");
    pos[c] = static_cast<Index>(it - columns_.begin());
  }
  Eigen::MatrixXd gram(k, k);
  Eigen::VectorXd rhs(k);
  for (Index a = 0; a < k; ++a) {
    rhs(a) = cross_(pos[a], zpos);
    for (Index b = 0; b < k; ++b) gram(a, b) = cross_(pos[a], pos[b]);
  }
  const auto llt = factor_gram(gram, cols);
  const double quad = cross_(zpos, zpos) - rhs.dot(llt.solve(rhs));
  return -0.5 * static_cast<double>(n_) * kLog2Pi - 0.5 * log_det_ - 0.5 * quad;
}

}  // namespace geogic
