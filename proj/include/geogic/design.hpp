#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "geogic/rng.hpp"
#include "geogic/sites.hpp"

namespace geogic {

enum class RegressorKind { white_noise, exp_gp, monomial, named_function };
enum class NamedFunction { f1, f2 };  // s^2 sin(pi/s), s sin(pi/s)

/// Generator for one candidate regressor column.
struct RegressorSpec {
  RegressorKind kind = RegressorKind::white_noise;
  double variance = 1.0;  // v_j^2 (white noise) or sigma_j^2 (exp_gp)
  double kappa = 1.0;     // exp_gp decay
  int degree = 1;         // monomial power
  NamedFunction function = NamedFunction::f1;

  static RegressorSpec white_noise(double v2);
  static RegressorSpec exp_gp(double sigma2, double kappa);
  static RegressorSpec monomial(int degree);
  static RegressorSpec named(NamedFunction f);

  void validate() const;
  bool stochastic() const {
    return kind == RegressorKind::white_noise || kind == RegressorKind::exp_gp;
  }
  std::string describe() const;
};

double named_function_value(NamedFunction f, double s);
std::string to_string(NamedFunction f);
NamedFunction parse_named_function(const std::string& name);
std::string to_string(RegressorKind k);
RegressorKind parse_regressor_kind(const std::string& name);

/// One column for `spec` at `sites`. Stochastic kinds draw from `rng`.
Eigen::VectorXd gen_column(const RegressorSpec& spec, const SiteSet& sites, StreamRng& rng);

/// Design matrix [1, x_1, ..., x_p]. Column j draws from key.stream(regressor_base + j)
/// so columns are independent of each other and of the response noise.
Eigen::MatrixXd gen_regressors(const std::vector<RegressorSpec>& specs, const SiteSet& sites,
                               SeedKey key);

}  // namespace geogic
