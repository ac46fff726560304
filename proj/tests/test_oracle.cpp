#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geogic/error.hpp"
#include "geogic/oracle.hpp"
#include "geogic/selection.hpp"
#include "oracles.hpp"

using namespace geogic;

namespace {

struct Instance {
  Simulation sim;
  TruthContext truth;
};

Instance make(Index n, double delta, std::uint64_t seed, const CovParams& t0 = {0.5, 0.5, 1.0},
              NoiseHooks hooks = {}) {
  const auto s = sites_1d(n, delta);
  const auto x = gen_regressors({RegressorSpec::white_noise(1.0), RegressorSpec::white_noise(1.0)}, s,
                                SeedKey{seed});
  TruthSpec t;
  t.beta0 = Eigen::Vector3d(1.0, 2.0, 0.0);
  t.theta0 = t0;
  Simulation sim = simulate_dataset(t, x, s, SeedKey{seed}, hooks);
  TruthContext tc = TruthContext::from_simulation(sim, t0);
  return {std::move(sim), std::move(tc)};
}

}  // namespace

TEST_CASE("loss vanishes at the truth without noise") {
  const auto in = make(25, 0.0, 1, {0.5, 0.5, 1.0}, {true, true});
  const auto k = kl_loss(ModelAlpha({1}), CovParams{0.5, 0.5, 1.0}, in.truth, in.sim.noise, in.sim.data);
  CHECK(std::abs(k.total) < 1e-10);
  CHECK(std::abs(k.direct) < 1e-10);
  CHECK(std::abs(l0_loss(make_covariance({0.5, 0.5, 1.0}, in.sim.data.sites), in.truth.sigma0)) < 1e-10);
}

TEST_CASE("loss at the truth for a correct model is the stochastic term") {
  const auto in = make(30, 0.2, 2);
  const CovParams t0{0.5, 0.5, 1.0};
  const Eigen::MatrixXd sigma0 = oracle::cov(t0, in.sim.data.sites.coords);
  for (const auto& a : {ModelAlpha({1}), ModelAlpha({1, 2})}) {
    const auto k = kl_loss(a, t0, in.truth, in.sim.noise, in.sim.data);
    const Eigen::MatrixXd m = oracle::projection(oracle::columns(in.sim.data.x, a), sigma0);
    const double want = 0.5 * in.sim.noise.dot(oracle::inverse(sigma0) * m * in.sim.noise);
    CHECK(k.total == doctest::Approx(want).epsilon(1e-10));
    CHECK(std::abs(k.bias) < 1e-10);
    CHECK(std::abs(k.l0) < 1e-10);
  }
}

TEST_CASE("direct and decomposed loss agree") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto in = make(15, 0.3, 100 + seed);
    const CovParams t{0.1 + 0.1 * seed, 0.3 + 0.2 * seed, 0.5 + 0.3 * seed};
    const Eigen::MatrixXd sigma = oracle::cov(t, in.sim.data.sites.coords);
    const Eigen::MatrixXd sigma0 = in.truth.sigma0.to_dense();
    for (const auto& a : enumerate_models(2, UniverseKind::all_subsets)) {
      const auto k = kl_loss(a, t, in.truth, in.sim.noise, in.sim.data);
      CHECK(std::abs(k.discrepancy) < 1e-8);
      CHECK(k.total == doctest::Approx(k.l0 + k.bias + k.stochastic).epsilon(1e-12));
      CHECK(k.l0 >= -1e-10);
      CHECK(k.bias >= -1e-10);
      CHECK(k.stochastic >= -1e-10);
      const double direct = oracle::kl_direct(oracle::columns(in.sim.data.x, a), in.sim.data.z, in.sim.mu0, sigma, sigma0);
      CHECK(k.total == doctest::Approx(direct).epsilon(1e-8));
    }
  }
}

TEST_CASE("risk: projector rank at the truth and nested gaps") {
  const auto in = make(40, 0.1, 5);
  const CovParams t0{0.5, 0.5, 1.0};
  const auto r1 = kl_risk(ModelAlpha({1}), t0, in.truth, in.sim.data);
  const auto r12 = kl_risk(ModelAlpha({1, 2}), t0, in.truth, in.sim.data);
  CHECK(r1.total == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r12.total == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(r1.projector_rank == 2);
  CHECK(r1.regressor_count == 1);
  CHECK(r12.total - r1.total == doctest::Approx(0.5).epsilon(1e-10));

  const CovParams t{0.2, 1.2, 2.5};
  const Eigen::MatrixXd sigma = oracle::cov(t, in.sim.data.sites.coords);
  for (const auto& a : enumerate_models(2, UniverseKind::all_subsets)) {
    const double want = oracle::kl_risk(oracle::columns(in.sim.data.x, a), in.sim.mu0, sigma, in.truth.sigma0.to_dense());
    CHECK(kl_risk(a, t, in.truth, in.sim.data).total == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("Monte Carlo mean loss matches the risk") {
  const auto s = sites_1d(50, 0.0);
  const auto x = gen_regressors({RegressorSpec::white_noise(1.0)}, s, SeedKey{9});
  TruthSpec t;
  t.beta0 = Eigen::Vector2d(1.0, 1.0);
  const auto sig = signal_covariance(t.theta0, s);
  const auto sigma0 = make_covariance(t.theta0, s);
  const int reps = 2000;
  double sum = 0.0, sum2 = 0.0;
  Simulation last;
  for (int r = 0; r < reps; ++r) {
    last = simulate_dataset(t, x, s, SeedKey{31}.child(r), {}, &sig);
    const double l = kl_loss(ModelAlpha({1}), sigma0, TruthContext{last.mu0, sigma0}, last.noise, last.data).total;
    sum += l;
    sum2 += l * l;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum2 / reps - mean * mean) / (reps - 1));
  const double risk = kl_risk(ModelAlpha({1}), sigma0, TruthContext{last.mu0, sigma0}, last.data).total;
  CHECK(risk == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(mean - risk) < 3.0 * se);
}

TEST_CASE("omitting a strong monomial makes the risk grow with n") {
  double prev = 0.0;
  for (Index n : {100, 400}) {
    const auto s = sites_1d(n, 0.0);
    const auto x = gen_regressors({RegressorSpec::monomial(1)}, s, SeedKey{1});
    TruthSpec t;
    t.beta0 = Eigen::Vector2d(1.0, 10.0);
    const auto sim = simulate_dataset(t, x, s, SeedKey{1});
    const auto r = kl_risk(ModelAlpha{}, t.theta0, TruthContext::from_simulation(sim, t.theta0), sim.data);
    if (n == 400) CHECK(r.total / prev > 1.0);
    prev = r.total;
  }
}

TEST_CASE("pseudo-true theta") {
  const CovParams t0{0.5, 0.5, 1.0};
  const auto s = sites_1d(500, 0.5);
  const auto x = gen_regressors({}, s, SeedKey{1});
  Dataset data{Eigen::VectorXd::Zero(500), x, s};
  MleOptions o;
  o.box = {{0.05, 4.0}, {0.05, 4.0}, {0.1, 6.0}};
  const Eigen::VectorXd mu0 = Eigen::VectorXd::Ones(500);

  SUBCASE("correct model recovers theta0") {
    const auto r = pseudo_true_theta(ModelAlpha{}, TruthContext{mu0, make_covariance(t0, s)}, data, o);
    CHECK(r.theta_hat.v2 == doctest::Approx(t0.v2).epsilon(0.1));
    CHECK(r.theta_hat.sigma2 == doctest::Approx(t0.sigma2).epsilon(0.1));
    CHECK(r.theta_hat.kappa == doctest::Approx(t0.kappa).epsilon(0.1));
  }
  SUBCASE("omitted white-noise regressor shifts the nugget") {
    // Averaging the omitted beta x over its law adds beta^2 v^2 I to the truth.
    const std::vector<OmittedWhiteNoise> om{{1.0, 1.0}};
    const Eigen::MatrixXd dense0 = oracle::cov(t0, s.coords) + Eigen::MatrixXd::Identity(500, 500);
    const auto r = pseudo_true_theta(ModelAlpha{}, TruthContext{mu0, CovMatrix::from_dense(dense0)}, data, o);
    const auto want = white_noise_pseudo_true(t0, om);
    CHECK(want.v2 == doctest::Approx(1.5));
    CHECK(r.theta_hat.v2 == doctest::Approx(want.v2).epsilon(0.1));
  }
  SUBCASE("omitted exp-GP regressor shifts sigma2 and kappa") {
    const std::vector<OmittedExpGp> om{{1.0, 1.0, 2.0}};
    const Eigen::MatrixXd dense0 = oracle::cov(t0, s.coords) + oracle::cov({0.0, 1.0, 2.0}, s.coords);
    const auto r = pseudo_true_theta(ModelAlpha{}, TruthContext{mu0, CovMatrix::from_dense(dense0)}, data, o);
    const auto want = exp_gp_pseudo_true(t0, om);
    CHECK(want.kappa == doctest::Approx(t0.kappa + 2.0 / 3.0));
    MESSAGE("pseudo-true " << to_string(r.theta_hat) << " vs " << to_string(want));
    CHECK(r.theta_hat.kappa == doctest::Approx(want.kappa).epsilon(0.15));
  }
}

TEST_CASE("closed-form constants") {
  const std::vector<OmittedExpGp> one{{1.0, 1.0, 2.0}};
  CHECK(kappa_star(0.5, 1.0, one) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(std::abs(kappa_star(0.5, 1.0, one) - 2.0 / 3.0) <= 1e-12);
  CHECK(kappa_star(0.5, 1.0, {}) == 0.0);
  CHECK(white_noise_nugget_shift({}) == 0.0);
  const std::vector<OmittedWhiteNoise> wn{{2.0, 0.5}, {1.0, 1.0}};
  CHECK(white_noise_nugget_shift(wn) == doctest::Approx(3.0));

  CHECK(gamma_k(Eigen::Vector2d(0.0, 1.0), 1) == 0.0);
  CHECK(gamma_k(Eigen::Vector3d(1.0, -2.0, 0.5), 2) == 0.0);
  CHECK(std::abs(gamma_k(Eigen::Vector2d(0.0, 1.0), 0) - 1.0 / 12.0) < 1e-10);
  CHECK(std::abs(gamma_k(Eigen::Vector3d(0.0, 0.0, 1.0), 1) - 1.0 / 180.0) < 1e-10);
  CHECK(gamma_k(Eigen::Vector3d(0.0, 0.0, 1.0), 0) > gamma_k(Eigen::Vector3d(0.0, 0.0, 1.0), 1));
  CHECK_THROWS_AS(gamma_k(Eigen::VectorXd::Ones(15), 13), NumericalError);
  CHECK_THROWS_AS(gamma_k(Eigen::Vector2d(0.0, 1.0), 2), ConfigError);
  CHECK(hilbert_block(1, 2)(1, 2) == doctest::Approx(0.25));

  const CovParams t0{0.5, 0.5, 1.0};
  const auto mp = monomial_pseudo_true(t0, Eigen::Vector2d(0.0, 1.0), 0);
  CHECK(mp.sigma2 == doctest::Approx(0.5 + 1.0 / 12.0));
  CHECK(mp.sigma2 * mp.kappa == doctest::Approx(t0.sigma2 * t0.kappa));
}

TEST_CASE("loss efficiency ratio") {
  const std::vector<double> losses{0.8, 0.5, 1.2};
  CHECK(loss_efficiency_ratio(0.5, losses).ratio == 1.0);
  CHECK(loss_efficiency_ratio(1.0, losses).ratio == doctest::Approx(2.0));
  const std::vector<double> single{0.3};
  CHECK(loss_efficiency_ratio(0.3, single).ratio == 1.0);
  const std::vector<double> zero{0.0, 0.4};
  const auto f = loss_efficiency_ratio(0.4, zero);
  CHECK(f.floored);
  CHECK(f.ratio == doctest::Approx(0.4 / 1e-12));
  CHECK_THROWS_AS(loss_efficiency_ratio(1.0, {}), ConfigError);
}
