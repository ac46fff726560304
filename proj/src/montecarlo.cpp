#include "geogic/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <omp.h>

#include "geogic/error.hpp"
#include "geogic/oracle.hpp"

namespace geogic {

void ExperimentConfig::validate() const {
  if (dim != 1 && dim != 2) throw ConfigError("dimension must be 1 or 2");
  for (const auto& r : regressors) r.validate();
  if (beta0.size() != p() + 1) {
    throw ConfigError("beta0 needs " + std::to_string(p() + 1) + " entries (intercept first), got " +
                      std::to_string(beta0.size()));
  }
  if (!beta0.allFinite()) throw ConfigError("beta0 must be finite");
  if (zeta) zeta->validate();
  theta0.validate();
  if (ns.empty()) throw ConfigError("at least one sample size is required");
  for (Index n : ns) {
    if (n < p() + 3) throw ConfigError("sample size " + std::to_string(n) + " is too small for p = " +
                                       std::to_string(p()));
  }
  if (deltas.empty()) throw ConfigError("at least one delta is required");
  for (double d : deltas) {
    if (!(d >= 0.0 && d < 1.0)) throw ConfigError("delta must lie in [0, 1)");
  }
  if (replicates < 1) throw ConfigError("replicates must be positive");
  if (tau_rules.empty()) throw ConfigError("at least one tau rule is required");
  for (const auto& t : tau_rules) t.validate();
  if (!known_theta) mle.validate();
  for (const auto& m : models()) m.validate(p());
}

std::vector<ModelAlpha> ExperimentConfig::models() const {
  GicConfig g;
  g.universe = universe;
  g.explicit_models = explicit_models;
  return g.models(p());
}

std::optional<ModelAlpha> ExperimentConfig::true_model() const {
  if (zeta && zeta_coef != 0.0) return std::nullopt;
  std::vector<int> nonzero;
  for (int j = 1; j <= p(); ++j) {
    if (beta0[j] != 0.0) nonzero.push_back(j);
  }
  const ModelAlpha needed(nonzero);
  auto ms = models();
  std::sort(ms.begin(), ms.end(), canonical_less);
  for (const auto& m : ms) {
    if (m.contains(needed)) return m;
  }
  return std::nullopt;
}

MleOptions ExperimentConfig::fit_options() const {
  if (!known_theta) return mle;
  MleOptions o = mle;
  o.box = ThetaBox::singleton(theta0);
  return o;
}

namespace {

struct CellContext {
  Index n_index = 0;
  Index delta_index = 0;
  SiteSet sites;
  CovMatrix signal;  // theta0 with v2 = 0, for drawing eta
  CovMatrix sigma0;  // full truth covariance for KL
};

struct ReplicateOutcome {
  bool failed = false;
  int excluded = 0;
  std::vector<int> winner;       // per tau rule, index into the universe
  std::vector<char> boundary;    // per tau rule
  std::vector<double> kl;        // per tau rule, selected model
  std::vector<double> efficiency;
  std::vector<char> floored;
};

CellContext make_cell(const ExperimentConfig& cfg, Index ni, Index di) {
  const Index n = cfg.ns[static_cast<std::size_t>(ni)];
  const double delta = cfg.deltas[static_cast<std::size_t>(di)];
  SiteSet sites = cfg.dim == 1 ? sites_1d(n, delta) : sites_2d(n, delta);
  CovMatrix signal = signal_covariance(cfg.theta0, sites);
  CovMatrix sigma0 = make_covariance(cfg.theta0, sites);
  return {ni, di, std::move(sites), std::move(signal), std::move(sigma0)};
}

ReplicateOutcome run_replicate(const ExperimentConfig& cfg, const CellContext& cell,
                               const std::vector<ModelAlpha>& models, const MleOptions& opts,
                               int rep) {
  const SeedKey key = SeedKey{cfg.seed}
                          .child(static_cast<std::uint64_t>(cell.n_index))
                          .child(static_cast<std::uint64_t>(cell.delta_index))
                          .child(static_cast<std::uint64_t>(rep));
  ReplicateOutcome out;
  try {
    const Eigen::MatrixXd x = gen_regressors(cfg.regressors, cell.sites, key);
    const TruthSpec truth{cfg.beta0, cfg.zeta, cfg.zeta_coef, cfg.theta0};
    const Simulation sim = simulate_dataset(truth, x, cell.sites, key, {}, &cell.signal);
    const UniverseFit fit = fit_universe(sim.data, models, cfg.mode, opts);

    std::vector<double> losses(models.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<double> finite_losses;
    if (cfg.compute_kl) {
      const TruthContext tc{sim.mu0, cell.sigma0};
      for (std::size_t m = 0; m < models.size(); ++m) {
        const auto& rec = fit.records[m];
        if (rec.excluded) continue;
        losses[m] = kl_loss(rec.alpha, rec.theta, tc, sim.noise, sim.data).total;
        finite_losses.push_back(losses[m]);
      }
    }
    for (const auto& rec : fit.records) out.excluded += rec.excluded ? 1 : 0;

    for (const auto& tau : cfg.tau_rules) {
      const SelectionReport report = score_universe(fit, tau);
      const auto it = std::find(models.begin(), models.end(), report.winner);
      const auto w = static_cast<std::size_t>(it - models.begin());
      out.winner.push_back(static_cast<int>(w));
      out.boundary.push_back(fit.records[w].boundary.any() ? 1 : 0);
      if (cfg.compute_kl) {
        const auto eff = loss_efficiency_ratio(losses[w], finite_losses);
        out.kl.push_back(losses[w]);
        out.efficiency.push_back(eff.ratio);
        out.floored.push_back(eff.floored ? 1 : 0);
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const NumericalError&) {
    out = ReplicateOutcome{};
    out.failed = true;
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

void summarize(const ExperimentConfig& cfg, const CellContext& cell,
               const std::vector<ModelAlpha>& models, const std::optional<ModelAlpha>& alpha0,
               const std::vector<ReplicateOutcome>& outcomes, std::vector<CellResult>& cells) {
  const Index n = cfg.ns[static_cast<std::size_t>(cell.n_index)];
  int failures = 0;
  int excluded = 0;
  for (const auto& o : outcomes) {
    failures += o.failed ? 1 : 0;
    excluded += o.excluded;
  }
  const auto empty_it = std::find(models.begin(), models.end(), ModelAlpha{});
  const auto alpha0_it = alpha0 ? std::find(models.begin(), models.end(), *alpha0) : models.end();

  for (std::size_t t = 0; t < cfg.tau_rules.size(); ++t) {
    CellResult c;
    c.n = n;
    c.delta = cfg.deltas[static_cast<std::size_t>(cell.delta_index)];
    c.tau_rule = cfg.tau_rules[t].name();
    c.tau = cfg.tau_rules[t].value(n);
    c.models = models;
    c.counts.assign(models.size(), 0);
    c.failures = failures;
    c.aborted = failures > 0.05 * static_cast<double>(cfg.replicates);
    c.excluded_fits = excluded;

    int ok = 0;
    int boundary = 0;
    std::vector<double> kl;
    std::vector<double> eff;
    for (const auto& o : outcomes) {
      if (o.failed) continue;
      ++ok;
      ++c.counts[static_cast<std::size_t>(o.winner[t])];
      boundary += o.boundary[t];
      if (cfg.compute_kl) {
        kl.push_back(o.kl[t]);
        eff.push_back(o.efficiency[t]);
        c.efficiency_floored += o.floored[t];
      }
    }
    const double denom = ok > 0 ? static_cast<double>(ok) : std::numeric_limits<double>::quiet_NaN();
    const auto freq = [&](std::vector<ModelAlpha>::const_iterator it) {
      return it == models.end() ? 0.0 : c.counts[static_cast<std::size_t>(it - models.begin())] / denom;
    };
    c.alpha0_frequency = alpha0 ? freq(alpha0_it) : std::numeric_limits<double>::quiet_NaN();
    c.empty_frequency = freq(empty_it);
    c.boundary_hit_rate = boundary / denom;
    c.mean_kl_loss = mean_of(kl);
    c.median_kl_loss = median_of(kl);
    c.sd_kl_loss = sd_of(kl);
    c.mean_efficiency = mean_of(eff);
    c.median_efficiency = median_of(eff);
    cells.push_back(std::move(c));
  }
}

ExperimentResult run_impl(const ExperimentConfig& cfg, bool parallel, int jobs) {
  cfg.validate();
  ExperimentResult result;
  result.config = cfg;
  result.true_model = cfg.true_model();
  const auto models = cfg.models();
  const MleOptions opts = cfg.fit_options();

  for (Index ni = 0; ni < static_cast<Index>(cfg.ns.size()); ++ni) {
    for (Index di = 0; di < static_cast<Index>(cfg.deltas.size()); ++di) {
      const CellContext cell = make_cell(cfg, ni, di);
      std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(cfg.replicates));
      if (parallel) {
        std::exception_ptr error;
        const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (int r = 0; r < cfg.replicates; ++r) {
          try {
            outcomes[static_cast<std::size_t>(r)] = run_replicate(cfg, cell, models, opts, r);
          } catch (...) {
#pragma omp critical(geogic_mc_error)
            if (!error) error = std::current_exception();
          }
        }
        if (error) std::rethrow_exception(error);
      } else {
        for (int r = 0; r < cfg.replicates; ++r) {
          outcomes[static_cast<std::size_t>(r)] = run_replicate(cfg, cell, models, opts, r);
        }
      }
      summarize(cfg, cell, models, result.true_model, outcomes, result.cells);
    }
  }
  return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, int jobs) {
  return run_impl(config, true, jobs);
}

namespace reference {
ExperimentResult run_experiment_serial(const ExperimentConfig& config) {
  return run_impl(config, false, 1);
}
}  // namespace reference

std::vector<ExperimentConfig> table1_preset(std::uint64_t seed) {
  std::vector<ExperimentConfig> out;
  for (NamedFunction f : {NamedFunction::f1, NamedFunction::f2}) {
    ExperimentConfig c;
    c.label = to_string(f);
    c.dim = 1;
    c.regressors = {RegressorSpec::named(f)};
    c.beta0 = Eigen::Vector2d(1.0, 1.0);
    c.theta0 = {0.5, 0.5, 1.0};
    c.universe = UniverseKind::all_subsets;
    c.tau_rules = {TauRule::bic()};
    c.mode = EstimationMode::per_model_theta;
    c.ns = {100, 500, 1000};
    c.deltas = {0.0};
    c.replicates = 100;
    c.seed = seed;
    c.known_theta = true;
    c.mle.box = ThetaBox::singleton(c.theta0);
    out.push_back(std::move(c));
  }
  return out;
}

std::string to_string(SweepExample e) {
  switch (e) {
    case SweepExample::white_noise: return "whitenoise";
    case SweepExample::exp_gp: return "expgp";
    case SweepExample::monomial: return "monomial";
  }
  return "?";
}

SweepExample parse_sweep_example(const std::string& s) {
  if (s == "whitenoise" || s == "white_noise") return SweepExample::white_noise;
  if (s == "expgp" || s == "exp_gp") return SweepExample::exp_gp;
  if (s == "monomial") return SweepExample::monomial;
  throw ConfigError("unknown example '" + s + "' (expected whitenoise, expgp or monomial)");
}

ExperimentConfig consistency_preset(SweepExample example, std::vector<double> deltas,
                                    std::vector<Index> ns, TauRule tau, int replicates,
                                    std::uint64_t seed) {
  ExperimentConfig c;
  c.label = to_string(example);
  c.dim = 1;
  switch (example) {
    case SweepExample::white_noise:
      c.regressors = {RegressorSpec::white_noise(1.0), RegressorSpec::white_noise(1.0)};
      c.universe = UniverseKind::all_subsets;
      break;
    case SweepExample::exp_gp:
      c.regressors = {RegressorSpec::exp_gp(1.0, 2.0), RegressorSpec::exp_gp(1.0, 2.0)};
      c.universe = UniverseKind::all_subsets;
      break;
    case SweepExample::monomial:
      c.regressors = {RegressorSpec::monomial(1), RegressorSpec::monomial(2)};
      c.universe = UniverseKind::nested;
      break;
  }
  c.beta0 = Eigen::Vector3d(1.0, 1.0, 0.0);
  c.theta0 = {0.5, 0.5, 1.0};
  c.tau_rules = {tau};
  c.mode = EstimationMode::per_model_theta;
  c.ns = std::move(ns);
  c.deltas = std::move(deltas);
  c.replicates = replicates;
  c.seed = seed;
  c.known_theta = false;
  c.mle.box = ThetaBox{{0.01, 5.0}, {0.05, 5.0}, {0.1, 10.0}};
  c.mle.grid_resolution = 5;
  c.mle.multistart = 2;
  c.mle.tolerance = 1e-7;
  c.compute_kl = true;
  return c;
}

ExperimentResult consistency_sweep(SweepExample example, std::vector<double> deltas,
                                   std::vector<Index> ns, TauRule tau, int replicates,
                                   std::uint64_t seed, int jobs) {
  return run_experiment(
      consistency_preset(example, std::move(deltas), std::move(ns), tau, replicates, seed), jobs);
}

}  // namespace geogic
