#pragma once

#include <Eigen/Dense>

#include "geogic/covariance.hpp"

namespace geogic::kernels {

// OpenMP assembly of the dense covariance for the 1D exponential + nugget
// model and the multiplicative 2D model. Rows are independent; each entry
// is written by exactly one thread, so results do not depend on the team size.
Eigen::MatrixXd assemble_exp_1d(const CovParams& theta, const Eigen::MatrixXd& coords);
Eigen::MatrixXd assemble_exp_2d(const CovParams& theta, const Eigen::MatrixXd& coords);

// Sigma^{-1} applied to many columns at once (columns split across threads).
Eigen::MatrixXd solve_columns(const CovMatrix& cov, const Eigen::MatrixXd& rhs);

int max_threads();
void set_threads(int jobs);

namespace reference {

// Plain serial loops, kept as the baseline for tests and benchmarks.
Eigen::MatrixXd assemble_exp_1d(const CovParams& theta, const Eigen::MatrixXd& coords);
Eigen::MatrixXd assemble_exp_2d(const CovParams& theta, const Eigen::MatrixXd& coords);
Eigen::MatrixXd solve_columns(const CovMatrix& cov, const Eigen::MatrixXd& rhs);

}  // namespace reference
}  // namespace geogic::kernels
