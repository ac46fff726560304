#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geogic/error.hpp"
#include "geogic/io.hpp"
#include "geogic/montecarlo.hpp"

using namespace geogic;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c = consistency_preset(SweepExample::white_noise, {0.0, 0.5}, {40, 80}, TauRule::bic(), 6, 77);
  c.tau_rules = {TauRule::bic(), TauRule::aic()};
  c.mle.grid_resolution = 4;
  return c;
}

int total(const CellResult& c) {
  int s = c.failures;
  for (int k : c.counts) s += k;
  return s;
}

}  // namespace

TEST_CASE("table1 preset") {
  const auto p = table1_preset();
  REQUIRE(p.size() == 2);
  CHECK(p[0].label == "f1");
  CHECK(p[1].label == "f2");
  for (const auto& c : p) {
    CHECK(c.models() == std::vector<ModelAlpha>{ModelAlpha{}, ModelAlpha({1})});
    CHECK(c.tau_rules.size() == 1);
    CHECK(c.tau_rules[0].name() == "bic");
    CHECK(c.known_theta);
    CHECK(c.fit_options().box.is_singleton());
    CHECK(c.theta0 == CovParams{0.5, 0.5, 1.0});
    CHECK(c.ns == std::vector<Index>{100, 500, 1000});
    CHECK(c.replicates == 100);
    CHECK(c.true_model() == ModelAlpha({1}));
    CHECK(sites_1d(100, c.deltas[0]).coord(99) == 1.0);
    CHECK_NOTHROW(c.validate());
  }
}

TEST_CASE("sweep presets") {
  const auto m = consistency_preset(SweepExample::monomial, {0.0}, {100}, TauRule::bic(), 10);
  CHECK(m.universe == UniverseKind::nested);
  CHECK(m.models().size() == 3);
  CHECK(m.true_model() == ModelAlpha({1}));
  const auto w = consistency_preset(SweepExample::white_noise, {0.0}, {100}, TauRule::bic(), 10);
  CHECK(w.models().size() == 4);
  CHECK(w.true_model() == ModelAlpha({1}));
  CHECK(parse_sweep_example("expgp") == SweepExample::exp_gp);
  CHECK_THROWS_AS(parse_sweep_example("matern"), ConfigError);
}

TEST_CASE("true model with an unobserved term is undefined") {
  auto c = small_config();
  c.zeta = RegressorSpec::white_noise(1.0);
  CHECK_FALSE(c.true_model().has_value());
}

TEST_CASE("config validation") {
  auto c = small_config();
  c.replicates = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.beta0 = Eigen::Vector2d(1, 1);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.deltas = {1.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.ns = {};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.dim = 2;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);  // 40 is not a perfect square
}

TEST_CASE("overwhelming penalty puts all mass on the intercept-only model") {
  auto c = small_config();
  c.replicates = 1;
  c.ns = {60};
  c.deltas = {0.0};
  c.tau_rules = {TauRule::constant(1e6)};
  const auto r = run_experiment(c);
  REQUIRE(r.cells.size() == 1);
  CHECK(r.cells[0].counts == std::vector<int>{1, 0, 0, 0});
  CHECK(r.cells[0].empty_frequency == 1.0);
  CHECK(r.cells[0].alpha0_frequency == 0.0);
}

TEST_CASE("frequency rows sum to the replicate count") {
  const auto r = run_experiment(small_config());
  CHECK(r.cells.size() == 2 * 2 * 2);
  for (const auto& c : r.cells) {
    CHECK(total(c) == 6);
    CHECK_FALSE(c.aborted);
    CHECK(c.mean_efficiency >= 1.0);
    CHECK(c.mean_kl_loss >= 0.0);
    CHECK(c.boundary_hit_rate >= 0.0);
    CHECK(c.boundary_hit_rate <= 1.0);
  }
  CHECK(r.cells[0].tau_rule == "bic");
  CHECK(r.cells[1].tau_rule == "aic");
  CHECK(r.cells[2].delta == 0.5);
}

TEST_CASE("results do not depend on workers or reruns") {
  const auto c = small_config();
  const std::string a = to_json(run_experiment(c, 1)).dump();
  const std::string b = to_json(run_experiment(c, 2)).dump();
  const std::string d = to_json(run_experiment(c, 3)).dump();
  const std::string s = to_json(reference::run_experiment_serial(c)).dump();
  CHECK(a == b);
  CHECK(a == d);
  CHECK(a == s);
  auto other = c;
  other.seed = 78;
  CHECK(to_json(run_experiment(other, 2)).dump() != a);
}

TEST_CASE("mean realized loss matches the risk at the truth") {
  ExperimentConfig c;
  c.label = "risk";
  c.regressors = {RegressorSpec::white_noise(1.0)};
  c.beta0 = Eigen::Vector2d(1.0, 1.0);
  c.universe = UniverseKind::explicit_list;
  c.explicit_models = {ModelAlpha({1})};
  c.known_theta = true;
  c.ns = {50};
  c.replicates = 600;
  const auto r = run_experiment(c);
  const auto& cell = r.cells.at(0);
  const double se = cell.sd_kl_loss / std::sqrt(600.0);
  MESSAGE("mean loss " << cell.mean_kl_loss << " +- " << se);
  CHECK(std::abs(cell.mean_kl_loss - 1.0) < 3.0 * se);
  CHECK(cell.median_efficiency == 1.0);
}

TEST_CASE("f2 at n = 1000: efficiency near one") {
  auto c = table1_preset()[1];
  c.ns = {1000};
  const auto r = run_experiment(c);
  const auto& cell = r.cells.at(0);
  MESSAGE("alpha0 " << cell.alpha0_frequency << ", median efficiency " << cell.median_efficiency);
  CHECK(cell.median_efficiency <= 1.5);
  CHECK(cell.alpha0_frequency >= 0.84);
}
