#include "geogic/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

namespace geogic::kernels {

Eigen::MatrixXd assemble_exp_1d(const CovParams& theta, const Eigen::MatrixXd& coords) {
  const Index n = coords.rows();
  Eigen::MatrixXd out(n, n);
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < n; ++j) {
    const double sj = coords(j, 0);
    for (Index i = 0; i < n; ++i) {
      out(i, j) = theta.sigma2 * std::exp(-theta.kappa * std::abs(coords(i, 0) - sj));
    }
    out(j, j) += theta.v2;
  }
  return out;
}

Eigen::MatrixXd assemble_exp_2d(const CovParams& theta, const Eigen::MatrixXd& coords) {
  const Index n = coords.rows();
  Eigen::MatrixXd out(n, n);
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double d = std::abs(coords(i, 0) - coords(j, 0)) + std::abs(coords(i, 1) - coords(j, 1));
      out(i, j) = theta.sigma2 * std::exp(-theta.kappa * d);
    }
    out(j, j) += theta.v2;
  }
  return out;
}

Eigen::MatrixXd solve_columns(const CovMatrix& cov, const Eigen::MatrixXd& rhs) {
  const Index k = rhs.cols();
  Eigen::MatrixXd out(rhs.rows(), k);
#pragma omp parallel for schedule(dynamic, 8)
  for (Index c = 0; c < k; ++c) {
    out.col(c) = cov.solve(rhs.col(c));
  }
  return out;
}

int max_threads() { return omp_get_max_threads(); }

void set_threads(int jobs) {
  if (jobs > 0) omp_set_num_threads(jobs);
}

namespace reference {

Eigen::MatrixXd assemble_exp_1d(const CovParams& theta, const Eigen::MatrixXd& coords) {
  const Index n = coords.rows();
  Eigen::MatrixXd out(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      out(i, j) = theta.sigma2 * std::exp(-theta.kappa * std::abs(coords(i, 0) - coords(j, 0)));
    }
    out(j, j) += theta.v2;
  }
  return out;
}

Eigen::MatrixXd assemble_exp_2d(const CovParams& theta, const Eigen::MatrixXd& coords) {
  const Index n = coords.rows();
  Eigen::MatrixXd out(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double d = std::abs(coords(i, 0) - coords(j, 0)) + std::abs(coords(i, 1) - coords(j, 1));
      out(i, j) = theta.sigma2 * std::exp(-theta.kappa * d);
    }
    out(j, j) += theta.v2;
  }
  return out;
}

Eigen::MatrixXd solve_columns(const CovMatrix& cov, const Eigen::MatrixXd& rhs) {
  return cov.solve(rhs);
}

}  // namespace reference
}  // namespace geogic::kernels
