#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "geogic/error.hpp"
#include "geogic/selection.hpp"
#include "oracles.hpp"

using namespace geogic;

namespace {

Simulation simulate(Index n, int p, std::uint64_t seed, Eigen::VectorXd beta0) {
  const auto s = sites_1d(n, 0.3);
  std::vector<RegressorSpec> specs(static_cast<std::size_t>(p), RegressorSpec::white_noise(1.0));
  const auto x = gen_regressors(specs, s, SeedKey{seed});
  TruthSpec t;
  t.beta0 = std::move(beta0);
  t.theta0 = {0.5, 0.5, 1.0};
  return simulate_dataset(t, x, s, SeedKey{seed});
}

MleOptions known(const CovParams& t = {0.5, 0.5, 1.0}) {
  MleOptions o;
  o.box = ThetaBox::singleton(t);
  return o;
}

MleOptions searched() {
  MleOptions o;
  o.box = {{0.05, 2.0}, {0.05, 2.0}, {0.2, 5.0}};
  o.grid_resolution = 5;
  o.multistart = 2;
  return o;
}

}  // namespace

TEST_CASE("model enumeration") {
  const auto all2 = enumerate_models(2, UniverseKind::all_subsets);
  CHECK(all2 == std::vector<ModelAlpha>{ModelAlpha{}, ModelAlpha({1}), ModelAlpha({2}), ModelAlpha({1, 2})});
  const auto nest3 = enumerate_models(3, UniverseKind::nested);
  CHECK(nest3 == std::vector<ModelAlpha>{ModelAlpha{}, ModelAlpha({1}), ModelAlpha({1, 2}), ModelAlpha({1, 2, 3})});
  CHECK(enumerate_models(0, UniverseKind::all_subsets) == std::vector<ModelAlpha>{ModelAlpha{}});
  CHECK(enumerate_models(4, UniverseKind::all_subsets).size() == 16);
  CHECK_THROWS_AS(enumerate_models(21, UniverseKind::all_subsets), ConfigError);
  CHECK(enumerate_models(21, UniverseKind::nested).size() == 22);
}

TEST_CASE("tau rules") {
  CHECK(TauRule::parse("aic").value(100) == 2.0);
  CHECK(TauRule::parse("bic").value(100) == std::log(100.0));
  CHECK(TauRule::parse("pow:0.5").value(100) == doctest::Approx(10.0));
  CHECK(TauRule::parse("const:3.5").value(7) == 3.5);
  CHECK(TauRule::parse("pow:0.25").name() == "pow:0.25");
  CHECK_THROWS_AS(TauRule::parse("const:-1"), ConfigError);
  CHECK_THROWS_AS(TauRule::parse("pow:x"), ConfigError);
  CHECK_THROWS_AS(TauRule::parse("hqc"), ConfigError);
  CHECK_THROWS_AS(TauRule::parse("1e6"), ConfigError);
  CHECK(parse_estimation_mode("per-model") == EstimationMode::per_model_theta);
  CHECK(parse_universe_kind("nested") == UniverseKind::nested);
}

TEST_CASE("score algebra") {
  const ModelAlpha a({1, 3});
  for (Index n : {10, 100, 5000}) {
    const double ll = -123.456789 * static_cast<double>(n) / 100.0;
    const double diff = gic_score(ll, TauRule::aic().value(n), a) - gic_score(ll, TauRule::bic().value(n), a);
    const double want = (2.0 - std::log(static_cast<double>(n))) * a.size();
    CHECK(std::abs(diff - want) <= 8 * std::numeric_limits<double>::epsilon() * std::abs(2.0 * ll));
  }
  CHECK(gic_score(-10.0, 2.0, ModelAlpha({1})) == gic_score(-10.0, 2.0, ModelAlpha({2})));
  CHECK(gic_score(-10.0, 2.0, ModelAlpha({1}), 1) == 24.0);
}

TEST_CASE("scores match an independent recomputation") {
  const auto sim = simulate(20, 2, 4, Eigen::Vector3d(1.0, 1.0, 0.0));
  const CovParams t{0.5, 0.5, 1.0};
  const Eigen::MatrixXd sigma = oracle::cov(t, sim.data.sites.coords);
  const double tau = std::log(20.0);
  for (const auto& a : enumerate_models(2, UniverseKind::all_subsets)) {
    const double want = -2.0 * oracle::profile_loglik(oracle::columns(sim.data.x, a), sim.data.z, sigma) + tau * a.size();
    CHECK(gic_score(a, tau, sim.data, t) == doctest::Approx(want).epsilon(1e-10));
    CHECK(gic_score(a, tau, sim.data, known(t)) == doctest::Approx(want).epsilon(1e-10));
  }
  const auto fit = fit_theta(ModelAlpha({1}), sim.data, searched());
  CHECK(gic_score(ModelAlpha({1}), tau, sim.data, searched()) ==
        doctest::Approx(-2.0 * fit.loglik + tau).epsilon(1e-12));
}

TEST_CASE("huge penalty selects the intercept-only model") {
  const auto sim = simulate(60, 3, 8, Eigen::Vector4d(1.0, 2.0, -2.0, 1.0));
  GicConfig g;
  g.tau = TauRule::constant(1e6);
  const auto rep = select(sim.data, g, searched());
  CHECK(rep.winner == ModelAlpha{});
  CHECK(rep.models.size() == 8);
  CHECK(rep.tau == 1e6);
}

TEST_CASE("strong signal is found and penalty offset does not move the winner") {
  const auto sim = simulate(150, 3, 12, Eigen::Vector4d(0.0, 1.5, 0.0, -1.5));
  for (auto mode : {EstimationMode::per_model_theta, EstimationMode::common_theta}) {
    GicConfig g;
    g.tau = TauRule::bic();
    g.mode = mode;
    const auto a = select(sim.data, g, searched());
    CHECK(a.winner == ModelAlpha({1, 3}));
    g.penalty_offset = 1;
    const auto b = select(sim.data, g, searched());
    CHECK(b.winner == a.winner);
    for (std::size_t m = 0; m < a.models.size(); ++m) {
      CHECK(b.models[m].score - a.models[m].score == doctest::Approx(a.tau));
    }
    if (mode == EstimationMode::common_theta) {
      REQUIRE(a.shared_theta.has_value());
      for (const auto& r : a.models) CHECK(r.theta == *a.shared_theta);
    }
  }
}

TEST_CASE("common theta with a nested universe") {
  const auto sim = simulate(120, 4, 30, (Eigen::VectorXd(5) << 1.0, 1.0, 0.5, 0.0, 0.0).finished());
  GicConfig g;
  g.tau = TauRule::bic();
  g.mode = EstimationMode::common_theta;
  g.universe = UniverseKind::nested;
  const auto rep = select(sim.data, g, searched());
  for (std::size_t m = 1; m < rep.models.size(); ++m) {
    CHECK(rep.models[m].loglik >= rep.models[m - 1].loglik - 1e-9);
  }
  const auto best = std::min_element(rep.models.begin(), rep.models.end(),
                                     [](const auto& a, const auto& b) { return a.score < b.score; });
  CHECK(rep.winner == best->alpha);
}

TEST_CASE("winner does not depend on the order of an explicit universe") {
  const auto sim = simulate(80, 3, 41, Eigen::Vector4d(1.0, 0.7, 0.0, 0.4));
  GicConfig g;
  g.tau = TauRule::aic();
  g.universe = UniverseKind::explicit_list;
  g.explicit_models = enumerate_models(3, UniverseKind::all_subsets);
  const auto a = select(sim.data, g, known());
  std::mt19937 gen(3);
  for (int r = 0; r < 5; ++r) {
    std::shuffle(g.explicit_models.begin(), g.explicit_models.end(), gen);
    CHECK(select(sim.data, g, known()).winner == a.winner);
  }
}

TEST_CASE("tie-break prefers the smallest, then lexicographically first model") {
  std::vector<ModelRecord> recs;
  for (const auto& a : {ModelAlpha({2, 3}), ModelAlpha({3}), ModelAlpha({1, 2}), ModelAlpha({2})}) {
    ModelRecord r;
    r.alpha = a;
    r.score = 10.0;
    recs.push_back(r);
  }
  std::vector<std::string> notes;
  CHECK(recs[pick_winner(recs, &notes)].alpha == ModelAlpha({2}));
  CHECK_FALSE(notes.empty());
  recs[0].score = 9.0;
  CHECK(recs[pick_winner(recs, nullptr)].alpha == ModelAlpha({2, 3}));
  recs[0].excluded = true;
  CHECK(recs[pick_winner(recs, nullptr)].alpha == ModelAlpha({2}));
  for (auto& r : recs) r.excluded = true;
  CHECK_THROWS_AS(pick_winner(recs, nullptr), NumericalError);
}

TEST_CASE("duplicate columns: singular fit excluded, equal fits tie") {
  auto sim = simulate(40, 2, 50, Eigen::Vector3d(1.0, 1.0, 0.0));
  sim.data.x.col(2) = sim.data.x.col(1);
  GicConfig g;
  g.tau = TauRule::bic();
  const auto rep = select(sim.data, g, known());
  const auto& full = rep.models.back();
  CHECK(full.alpha == ModelAlpha({1, 2}));
  CHECK(full.excluded);
  CHECK_FALSE(full.failure.empty());
  CHECK(rep.models[1].score == rep.models[2].score);
  if (rep.winner != ModelAlpha{}) CHECK(rep.winner == ModelAlpha({1}));
  CHECK_FALSE(rep.notes.empty());
}

TEST_CASE("every model failing fails the selection") {
  auto sim = simulate(30, 1, 2, Eigen::Vector2d(1.0, 0.0));
  sim.data.x.col(1).setConstant(3.0);
  GicConfig g;
  g.universe = UniverseKind::explicit_list;
  g.explicit_models = {ModelAlpha({1})};
  CHECK_THROWS_AS(select(sim.data, g, known()), NumericalError);
}

TEST_CASE("f2 regressor at n = 1000 with known theta") {
  const auto s = sites_1d(1000, 0.0);
  const auto x = gen_regressors({RegressorSpec::named(NamedFunction::f2)}, s, SeedKey{1});
  TruthSpec t;
  t.beta0 = Eigen::Vector2d(1.0, 1.0);
  const auto sig = signal_covariance(t.theta0, s);
  GicConfig g;
  int hits = 0;
  for (int r = 0; r < 100; ++r) {
    const auto sim = simulate_dataset(t, x, s, SeedKey{2718}.child(r), {}, &sig);
    hits += select(sim.data, g, known()).winner == ModelAlpha({1}) ? 1 : 0;
  }
  MESSAGE("alpha0 selected in " << hits << " of 100");
  CHECK(hits >= 85);
}
