#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geogic/datagen.hpp"
#include "geogic/error.hpp"
#include "oracles.hpp"

using namespace geogic;

namespace {

TruthSpec table1_truth() {
  TruthSpec t;
  t.beta0 = Eigen::Vector2d(1.0, 1.0);
  t.theta0 = {0.5, 0.5, 1.0};
  return t;
}

}  // namespace

TEST_CASE("noiseless hook returns the mean exactly") {
  const auto s = sites_1d(30, 0.0);
  const auto x = gen_regressors({RegressorSpec::named(NamedFunction::f2)}, s, SeedKey{1});
  const auto sim = simulate_dataset(table1_truth(), x, s, SeedKey{1}, {true, true});
  CHECK(sim.data.z == x * table1_truth().beta0);
  CHECK(sim.mu0 == sim.data.z);
  CHECK(sim.noise.isZero(0.0));
}

TEST_CASE("hooks switch off one source each") {
  const auto s = sites_1d(30, 0.0);
  const auto x = gen_regressors({RegressorSpec::named(NamedFunction::f2)}, s, SeedKey{1});
  const auto both = simulate_dataset(table1_truth(), x, s, SeedKey{3});
  const auto no_eta = simulate_dataset(table1_truth(), x, s, SeedKey{3}, {true, false});
  const auto no_eps = simulate_dataset(table1_truth(), x, s, SeedKey{3}, {false, true});
  CHECK(((no_eta.noise + no_eps.noise) - both.noise).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((both.data.z - both.mu0 - both.noise).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("deterministic under a fixed key") {
  const auto s = sites_1d(40, 0.5);
  const auto x = gen_regressors({RegressorSpec::white_noise(1.0)}, s, SeedKey{8});
  TruthSpec t = table1_truth();
  const auto a = simulate_dataset(t, x, s, SeedKey{8});
  const auto b = simulate_dataset(t, x, s, SeedKey{8});
  CHECK(a.data.z == b.data.z);
  const auto shared = signal_covariance(t.theta0, s);
  const auto c = simulate_dataset(t, x, s, SeedKey{8}, {}, &shared);
  CHECK(a.data.z == c.data.z);
  CHECK(simulate_dataset(t, x, s, SeedKey{9}).data.z != a.data.z);
}

TEST_CASE("unobserved mean term") {
  const auto s = sites_1d(20, 0.0);
  const auto x = gen_regressors({}, s, SeedKey{1});
  TruthSpec t;
  t.beta0 = Eigen::VectorXd::Constant(1, 2.0);
  t.zeta = RegressorSpec::monomial(2);
  t.zeta_coef = 3.0;
  const auto sim = simulate_dataset(t, x, s, SeedKey{4}, {true, true});
  for (Index i = 0; i < 20; ++i) CHECK(sim.data.z[i] == doctest::Approx(2.0 + 3.0 * std::pow(s.coord(i), 2)));
}

TEST_CASE("truth validation") {
  const auto s = sites_1d(5, 0.0);
  const auto x = gen_regressors({RegressorSpec::monomial(1)}, s, SeedKey{1});
  TruthSpec t = table1_truth();
  t.beta0 = Eigen::Vector3d(1, 1, 1);
  CHECK_THROWS_AS(simulate_dataset(t, x, s, SeedKey{1}), ConfigError);
}

TEST_CASE("marginal variance and lag-1 covariance") {
  const auto s = sites_1d(100, 0.0);
  const auto x = gen_regressors({RegressorSpec::named(NamedFunction::f2)}, s, SeedKey{1});
  const auto sig = signal_covariance(table1_truth().theta0, s);
  const int reps = 2000;
  double sum = 0.0, sum2 = 0.0, lag = 0.0, a_sum = 0.0, b_sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto sim = simulate_dataset(table1_truth(), x, s, SeedKey{77}.child(r), {}, &sig);
    const Eigen::VectorXd e = sim.data.z - x * table1_truth().beta0;
    if (r < 1000) {
      sum += e[49];
      sum2 += e[49] * e[49];
    }
    lag += e[49] * e[50];
    a_sum += e[49];
    b_sum += e[50];
  }
  const double var = (sum2 - sum * sum / 1000.0) / 999.0;
  CHECK(var > 0.85);
  CHECK(var < 1.15);
  const double cov = (lag - a_sum * b_sum / reps) / (reps - 1);
  CHECK(std::abs(cov - 0.5 * std::exp(-0.01)) < 0.1);
}

TEST_CASE("empirical covariance converges to Sigma(theta0)") {
  const auto s = sites_1d(8, 0.5);
  const CovParams t0{0.4, 0.8, 1.5};
  TruthSpec t;
  t.beta0 = Eigen::VectorXd::Zero(1);
  t.theta0 = t0;
  const auto x = gen_regressors({}, s, SeedKey{1});
  const int reps = 10000;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(8, 8);
  const auto sig = signal_covariance(t0, s);
  for (int r = 0; r < reps; ++r) {
    const auto e = simulate_dataset(t, x, s, SeedKey{123}.child(r), {}, &sig).noise;
    acc += e * e.transpose();
  }
  acc /= reps;
  const Eigen::MatrixXd truth = oracle::cov(t0, s.coords);
  for (Index i = 0; i < 8; ++i) {
    for (Index j = 0; j < 8; ++j) {
      const double se = std::sqrt((truth(i, i) * truth(j, j) + truth(i, j) * truth(i, j)) / reps);
      CHECK(std::abs(acc(i, j) - truth(i, j)) < 3.0 * se);
    }
  }
}
