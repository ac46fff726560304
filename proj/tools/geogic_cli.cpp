// geogic: simulate spatial regression data, fit covariance parameters,
// select mean models by GIC and run Monte Carlo selection experiments.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "geogic/error.hpp"
#include "geogic/io.hpp"
#include "geogic/kernels.hpp"
#include "geogic/montecarlo.hpp"
#include "geogic/oracle.hpp"

namespace fs = std::filesystem;
using namespace geogic;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// Flags shared by the commands that estimate theta.
struct ThetaFlags {
  std::string box;
  std::string known_theta;
  int grid = 7;
  int multistart = 3;

  void add(CLI::App* cmd) {
    cmd->add_option("--box", box, "v2lo,v2hi,s2lo,s2hi,klo,khi search box");
    cmd->add_option("--known-theta", known_theta, "v2,sigma2,kappa: fit with this theta only");
    cmd->add_option("--grid", grid, "coarse grid points per axis")->check(CLI::PositiveNumber);
    cmd->add_option("--multistart", multistart, "simplex starts")->check(CLI::PositiveNumber);
  }

  bool any() const { return !box.empty() || !known_theta.empty(); }

  void apply(MleOptions& o) const {
    if (!box.empty()) {
      const auto b = parse_real_list(box, "--box");
      if (b.size() != 6) throw ConfigError("--box: expected 6 numbers, got " + std::to_string(b.size()));
      o.box = ThetaBox{{b[0], b[1]}, {b[2], b[3]}, {b[4], b[5]}};
    }
    if (!known_theta.empty()) {
      const auto t = parse_real_list(known_theta, "--known-theta");
      if (t.size() != 3) throw ConfigError("--known-theta: expected v2,sigma2,kappa");
      const CovParams theta{t[0], t[1], t[2]};
      theta.validate();
      o.box = ThetaBox::singleton(theta);
    }
    o.grid_resolution = grid;
    o.multistart = multistart;
    o.validate();
  }
};

ThetaBox default_fit_box() { return ThetaBox{{0.0, 10.0}, {0.01, 10.0}, {0.01, 50.0}}; }

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) s += ' ';
    s += argv[i];
  }
  return s;
}

std::vector<ExperimentConfig> preset_configs(const std::string& name) {
  if (name == "table1") return table1_preset();
  if (name == "f1") return {table1_preset()[0]};
  if (name == "f2") return {table1_preset()[1]};
  return {consistency_preset(parse_sweep_example(name), {0.0}, {100, 400, 1600}, TauRule::bic(), 200)};
}

// Experiment settings from a config file or preset, then flag overrides.
struct ExperimentFlags {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> tau;
  std::string mode;
  std::string universe;
  std::string ns;
  std::string deltas;
  std::optional<int> replicates;
  bool no_kl = false;
  ThetaFlags theta;

  void add(CLI::App* cmd, bool with_source) {
    if (with_source) {
      cmd->add_option("--config", config, "JSON experiment config");
      cmd->add_option("--preset", preset, "table1, f1, f2, whitenoise, expgp or monomial");
    }
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--tau", tau, "aic, bic, const:<x> or pow:<a> (repeatable)");
    cmd->add_option("--mode", mode, "per-model or common");
    cmd->add_option("--universe", universe, "all or nested");
    cmd->add_option("--ns", ns, "comma-separated sample sizes");
    cmd->add_option("--deltas", deltas, "comma-separated domain-growth exponents");
    cmd->add_option("--replicates", replicates, "replicates per cell");
    cmd->add_flag("--no-kl", no_kl, "skip KL loss and efficiency summaries");
    theta.add(cmd);
  }

  std::vector<ExperimentConfig> load(const std::string& fallback_preset) const {
    std::vector<ExperimentConfig> cfgs;
    if (!config.empty() && !preset.empty()) throw ConfigError("give either --config or --preset, not both");
    if (!config.empty()) {
      cfgs.push_back(experiment_config_from_json(read_json_file(config)));
    } else {
      cfgs = preset_configs(preset.empty() ? fallback_preset : preset);
    }
    for (auto& c : cfgs) apply(c);
    return cfgs;
  }

  void apply(ExperimentConfig& c) const {
    if (seed) c.seed = *seed;
    if (!tau.empty()) {
      c.tau_rules.clear();
      for (const auto& t : tau) c.tau_rules.push_back(TauRule::parse(t));
    }
    if (!mode.empty()) c.mode = parse_estimation_mode(mode);
    if (!universe.empty()) c.universe = parse_universe_kind(universe);
    if (!ns.empty()) {
      c.ns.clear();
      for (double v : parse_real_list(ns, "--ns")) {
        if (v != static_cast<double>(static_cast<Index>(v))) throw ConfigError("--ns: sizes must be integers");
        c.ns.push_back(static_cast<Index>(v));
      }
    }
    if (!deltas.empty()) c.deltas = parse_real_list(deltas, "--deltas");
    if (replicates) c.replicates = *replicates;
    if (no_kl) c.compute_kl = false;
    if (theta.any()) {
      theta.apply(c.mle);
      c.known_theta = false;
    }
    c.validate();
  }
};

Json echo_of(const std::vector<ExperimentConfig>& cfgs) {
  Json a = Json::array();
  for (const auto& c : cfgs) a.push_back(to_json(c));
  return a;
}

void finish_manifest(RunManifest& m, const fs::path& dir) {
  m.finished_utc = utc_timestamp();
  write_output(dir, "manifest.json", to_json(m).dump(2) + "\n");
}

int run_experiments(const std::vector<ExperimentConfig>& cfgs, const fs::path& out, int jobs,
                    bool plot, bool table1, RunManifest manifest) {
  std::vector<ExperimentResult> results;
  for (const auto& c : cfgs) {
    results.push_back(run_experiment(c, jobs));
    for (const auto& cell : results.back().cells) {
      if (cell.aborted) {
        std::cerr << "warning: " << c.label << " n=" << cell.n << " delta=" << cell.delta << ": "
                  << cell.failures << " of " << c.replicates << " replicates failed\n";
      }
    }
  }
  std::ostringstream freq;
  write_frequency_csv(freq, results);
  manifest.outputs.push_back(write_output(out, "frequencies.csv", freq.str()));
  if (table1) {
    std::ostringstream t1;
    write_table1_csv(t1, results);
    manifest.outputs.push_back(write_output(out, "table1.csv", t1.str()));
  }
  manifest.outputs.push_back(write_output(out, "result.json", results_json(results).dump(2) + "\n"));
  if (plot) manifest.outputs.push_back(write_output(out, "frequencies.svg", frequency_svg(results)));
  finish_manifest(manifest, out);
  std::cout << freq.str();
  return 0;
}

std::vector<ModelAlpha> parse_model_list(const std::string& text) {
  std::vector<ModelAlpha> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(ModelAlpha::parse(item));
  return out;
}

void print_real(double x) { std::printf("%.17g\n", x); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial regression model selection by generalized information criteria"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  int jobs = 0;
  std::string out = ".";
  app.add_option("--jobs", jobs, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);

  // simulate
  auto* sim = app.add_subcommand("simulate", "write one simulated dataset as CSV");
  ExperimentFlags sim_flags;
  sim_flags.add(sim, true);
  int sim_replicate = 0;
  sim->add_option("--replicate", sim_replicate, "replicate index")->check(CLI::NonNegativeNumber);
  sim->add_option("--out", out, "output directory");

  // fit
  auto* fit = app.add_subcommand("fit", "estimate theta for one model by profile likelihood");
  std::string fit_data;
  std::string fit_model;
  bool fit_trace = false;
  ThetaFlags fit_theta_flags;
  fit->add_option("--data", fit_data, "dataset CSV")->required();
  fit->add_option("--model", fit_model, "model, e.g. {1,2} (default: all regressors)");
  fit->add_flag("--trace", fit_trace, "include the optimizer trace");
  fit_theta_flags.add(fit);

  // select
  auto* sel = app.add_subcommand("select", "select a mean model by GIC");
  std::string sel_data;
  std::string sel_tau = "bic";
  std::string sel_mode = "per-model";
  std::string sel_universe = "all";
  std::string sel_models;
  int sel_offset = 0;
  ThetaFlags sel_theta_flags;
  sel->add_option("--data", sel_data, "dataset CSV")->required();
  sel->add_option("--tau", sel_tau, "aic, bic, const:<x> or pow:<a>");
  sel->add_option("--mode", sel_mode, "per-model or common");
  sel->add_option("--universe", sel_universe, "all, nested or explicit");
  sel->add_option("--models", sel_models, "explicit universe, e.g. \"∅;{1};{1,2}\"");
  sel->add_option("--penalty-offset", sel_offset, "added to |alpha| in the penalty");
  sel_theta_flags.add(sel);

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a Monte Carlo selection experiment");
  ExperimentFlags exp_flags;
  exp_flags.add(exp, true);
  bool exp_plot = false;
  exp->add_option("--out", out, "output directory");
  exp->add_flag("--plot", exp_plot, "also write frequencies.svg");

  // table1
  auto* t1 = app.add_subcommand("table1", "selection frequencies for f1 and f2 under BIC");
  ExperimentFlags t1_flags;
  t1_flags.add(t1, false);
  bool t1_plot = false;
  t1->add_option("--out", out, "output directory");
  t1->add_flag("--plot", t1_plot, "also write frequencies.svg");

  // constants
  auto* cst = app.add_subcommand("constants", "closed-form pseudo-true constants");
  cst->require_subcommand(1);
  auto* cst_gamma = cst->add_subcommand("gamma", "gamma(k) for monomial regressors");
  int g_p = 1;
  int g_k = 0;
  std::string g_beta;
  cst_gamma->add_option("--p", g_p, "highest true degree")->required();
  cst_gamma->add_option("--beta", g_beta, "beta0, p + 1 comma-separated values")->required();
  cst_gamma->add_option("--k", g_k, "degree of the fitted model")->required();
  auto* cst_kappa = cst->add_subcommand("kappa-star", "kappa shift for omitted exp-GP regressors");
  double k_sigma2 = 0.0;
  double k_kappa0 = 0.0;
  std::vector<std::string> k_omitted;
  cst_kappa->add_option("--sigma2", k_sigma2, "sigma0^2")->required();
  cst_kappa->add_option("--kappa0", k_kappa0, "kappa0")->required();
  cst_kappa->add_option("--omitted", k_omitted, "beta,sigma2,kappa of an omitted regressor (repeatable)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (jobs > 0) kernels::set_threads(jobs);
    const int workers = jobs > 0 ? jobs : kernels::max_threads();
    RunManifest manifest;
    manifest.command = command_line(argc, argv);
    manifest.started_utc = utc_timestamp();

    if (*sim) {
      auto cfgs = sim_flags.load("f1");
      if (cfgs.size() != 1) throw ConfigError("simulate needs a single config (use --preset f1 or f2)");
      const ExperimentConfig& c = cfgs.front();
      const Index n = c.ns.front();
      const double delta = c.deltas.front();
      const SiteSet sites = c.dim == 1 ? sites_1d(n, delta) : sites_2d(n, delta);
      const SeedKey key = SeedKey{c.seed}.child(0).child(0).child(static_cast<std::uint64_t>(sim_replicate));
      const Eigen::MatrixXd x = gen_regressors(c.regressors, sites, key);
      const TruthSpec truth{c.beta0, c.zeta, c.zeta_coef, c.theta0};
      const Simulation s = simulate_dataset(truth, x, sites, key);
      std::ostringstream csv;
      write_dataset_csv(csv, s.data);
      Json echo = to_json(c);
      echo["replicate"] = sim_replicate;
      manifest.config_digest = config_digest(echo);
      manifest.seed = c.seed;
      manifest.outputs.push_back(write_output(out, "dataset.csv", csv.str()));
      manifest.outputs.push_back(write_output(out, "config.json", echo.dump(2) + "\n"));
      finish_manifest(manifest, out);
      std::cout << (fs::path(out) / "dataset.csv").string() << "\n";
      return 0;
    }

    if (*fit) {
      const Dataset data = read_dataset_csv(fs::path(fit_data));
      const ModelAlpha alpha =
          fit_model.empty() ? ModelAlpha::full(static_cast<int>(data.p())) : ModelAlpha::parse(fit_model);
      alpha.validate(data.p());
      MleOptions opts;
      opts.box = default_fit_box();
      opts.parallel = workers > 1;
      fit_theta_flags.apply(opts);
      const MleResult r = fit_theta(alpha, data, opts);
      const GlsFit gls = gls_beta(alpha, r.theta_hat, data);
      Json j = to_json(r, fit_trace);
      j["model"] = alpha.label();
      j["n"] = data.n();
      j["beta_hat"] = std::vector<double>(gls.beta_hat.data(), gls.beta_hat.data() + gls.beta_hat.size());
      j["box"] = to_json(opts.box);
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*sel) {
      const Dataset data = read_dataset_csv(fs::path(sel_data));
      GicConfig g;
      g.tau = TauRule::parse(sel_tau);
      g.mode = parse_estimation_mode(sel_mode);
      g.universe = parse_universe_kind(sel_universe);
      g.penalty_offset = sel_offset;
      if (!sel_models.empty()) {
        g.universe = UniverseKind::explicit_list;
        g.explicit_models = parse_model_list(sel_models);
      }
      MleOptions opts;
      opts.box = default_fit_box();
      opts.parallel = workers > 1;
      sel_theta_flags.apply(opts);
      const SelectionReport rep = select(data, g, opts);
      Json j = to_json(rep);
      j["box"] = to_json(opts.box);
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*exp || *t1) {
      const bool is_t1 = static_cast<bool>(*t1);
      const auto cfgs = is_t1 ? t1_flags.load("table1") : exp_flags.load("table1");
      const Json echo = echo_of(cfgs);
      manifest.config_digest = config_digest(echo);
      manifest.seed = cfgs.front().seed;
      manifest.outputs.push_back(write_output(out, "config.json", echo.dump(2) + "\n"));
      return run_experiments(cfgs, out, workers, is_t1 ? t1_plot : exp_plot, is_t1, manifest);
    }

    if (*cst_gamma) {
      const auto b = parse_real_list(g_beta, "--beta");
      if (static_cast<int>(b.size()) != g_p + 1) {
        throw ConfigError("--beta: expected p + 1 = " + std::to_string(g_p + 1) + " values");
      }
      print_real(gamma_k(Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Index>(b.size())), g_k));
      return 0;
    }

    if (*cst_kappa) {
      std::vector<OmittedExpGp> omitted;
      for (const auto& o : k_omitted) {
        const auto v = parse_real_list(o, "--omitted");
        if (v.size() != 3) throw ConfigError("--omitted: expected beta,sigma2,kappa");
        omitted.push_back({v[0], v[1], v[2]});
      }
      print_real(kappa_star(k_sigma2, k_kappa0, omitted));
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
