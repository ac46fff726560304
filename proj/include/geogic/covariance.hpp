#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "geogic/sites.hpp"

namespace geogic {

/// Covariance parameters (v2, sigma2, kappa): nugget variance, process
/// variance and exponential decay rate.
struct CovParams {
  double v2 = 0.0;
  double sigma2 = 1.0;
  double kappa = 1.0;

  bool valid() const;
  // Throws ConfigError when !valid().
  void validate() const;

  friend bool operator==(const CovParams&, const CovParams&) = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool degenerate() const { return lo == hi; }
};

/// Compact box for (v2, sigma2, kappa).
struct ThetaBox {
  Interval v2{0.0, 0.0};
  Interval sigma2{1.0, 1.0};
  Interval kappa{1.0, 1.0};

  static ThetaBox singleton(const CovParams& theta);

  bool valid() const;
  void validate() const;
  bool contains(const CovParams& theta) const;
  bool is_singleton() const;
  CovParams clamp(const CovParams& theta) const;
};

enum class CovLayout { dense, kronecker, markov };

enum class CovBackend {
  automatic,  // markov in 1D, kronecker for v2 = 0 lattices, dense otherwise
  dense,
};

/// Immutable, factorized covariance matrix.
///
/// Three layouts share one interface:
///  - dense: explicit matrix with a lower Cholesky factor.
///  - kronecker: sigma2 * (B kron B) for the multiplicative 2D model.
///  - markov: sigma2 * R + v2 * I for the 1D exponential model, using the
///    tridiagonal inverse of R. Sites may be given in any order.
class CovMatrix {
public:
  static CovMatrix from_dense(Eigen::MatrixXd sigma);
  static CovMatrix from_kronecker(double sigma2, Eigen::MatrixXd corr_factor);

  Index size() const;
  CovLayout layout() const;
  bool jitter_applied() const;
  double jitter() const;

  double log_det() const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;       // Sigma^{-1} rhs
  Eigen::MatrixXd multiply(const Eigen::MatrixXd& rhs) const;    // Sigma rhs
  Eigen::MatrixXd apply_factor(const Eigen::MatrixXd& u) const;  // F u, F F' = Sigma
  Eigen::MatrixXd to_dense() const;
  Eigen::VectorXd diagonal() const;

  struct Impl;
  explicit CovMatrix(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

private:
  std::shared_ptr<const Impl> impl_;
};

// Dense 1D exponential + nugget: sigma2 exp(-kappa |s_i - s_j|) + v2 1{i=j}.
CovMatrix cov_matrix_1d(const CovParams& theta, const SiteSet& sites);

// Same matrix through the tridiagonal precision of the exponential kernel.
// Requires distinct sites; O(n) factorization.
CovMatrix cov_matrix_1d_markov(const CovParams& theta, const SiteSet& sites);

// Multiplicative 2D model sigma2 exp(-kappa (|ds1| + |ds2|)) (+ v2 I when
// dense). Kronecker layout requires a lattice and v2 = 0.
CovMatrix cov_matrix_2d_mult(const CovParams& theta, const SiteSet& grid,
                             bool kronecker = true);

CovMatrix make_covariance(const CovParams& theta, const SiteSet& sites,
                          CovBackend backend = CovBackend::automatic);

// The m x m factor B = (rho^{|i-j|}) with rho = exp(-kappa * spacing).
Eigen::MatrixXd lattice_corr_factor(double kappa, Index m, double spacing);

struct EigenBounds {
  double min_lambda_min = 0.0;
  double max_lambda_max = 0.0;
  CovParams argmin_theta;
  CovParams argmax_theta;
};

/// Extreme eigenvalues of Sigma^{-1/2}(theta) Sigma(theta0) Sigma^{-1/2}(theta)
/// over a finite grid of theta values.
EigenBounds eigen_bound_diagnostic(std::span<const CovParams> theta_grid,
                                   const CovParams& theta0,
                                   const SiteSet& sites);

// Regular lattice over a box: `per_axis` points on each axis, linear spacing.
std::vector<CovParams> theta_lattice(const ThetaBox& box, int per_axis);

std::string to_string(const CovParams& theta);

}  // namespace geogic
