#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geogic/datagen.hpp"
#include "geogic/design.hpp"
#include "geogic/selection.hpp"

namespace geogic {

struct ExperimentConfig {
  std::string label = "experiment";  // "function" column of the frequency table
  int dim = 1;
  std::vector<RegressorSpec> regressors;
  Eigen::VectorXd beta0;
  std::optional<RegressorSpec> zeta;
  double zeta_coef = 1.0;
  CovParams theta0{0.5, 0.5, 1.0};
  UniverseKind universe = UniverseKind::all_subsets;
  std::vector<ModelAlpha> explicit_models;
  std::vector<TauRule> tau_rules{TauRule::bic()};
  EstimationMode mode = EstimationMode::per_model_theta;
  std::vector<Index> ns{100};
  std::vector<double> deltas{0.0};
  int replicates = 100;
  std::uint64_t seed = 42;
  bool known_theta = false;  // fit with the singleton box {theta0}
  MleOptions mle;            // used when known_theta is false
  bool compute_kl = true;

  void validate() const;
  int p() const { return static_cast<int>(regressors.size()); }
  std::vector<ModelAlpha> models() const;
  // Smallest correct model in the universe; none when the mean has an
  // unobserved term or no universe member contains the nonzero coefficients.
  std::optional<ModelAlpha> true_model() const;
  MleOptions fit_options() const;
};

struct CellResult {
  Index n = 0;
  double delta = 0.0;
  std::string tau_rule;
  double tau = 0.0;
  std::vector<ModelAlpha> models;
  std::vector<int> counts;  // parallel to models
  int failures = 0;         // replicates that produced no selection
  bool aborted = false;     // failures above 5% of the replicates
  int excluded_fits = 0;    // model fits excluded inside successful replicates
  double alpha0_frequency = 0.0;  // NaN when there is no true model
  double empty_frequency = 0.0;
  double boundary_hit_rate = 0.0; // selected model's theta_hat on the box edge
  // KL summaries of the selected model (NaN when KL is disabled).
  double mean_kl_loss = 0.0;
  double median_kl_loss = 0.0;
  double sd_kl_loss = 0.0;
  double mean_efficiency = 0.0;
  double median_efficiency = 0.0;
  int efficiency_floored = 0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::optional<ModelAlpha> true_model;
  std::vector<CellResult> cells;  // order: n, then delta, then tau rule
};

/// Replicates run on `jobs` OpenMP threads (0 = default team size).
/// Output is identical for every thread count.
ExperimentResult run_experiment(const ExperimentConfig& config, int jobs = 0);

namespace reference {
ExperimentResult run_experiment_serial(const ExperimentConfig& config);
}

inline constexpr std::uint64_t kDefaultSeed = 42;

// Two configs (x = f1, x = f2): n in {100, 500, 1000}, delta 0, BIC,
// known theta0 = (0.5, 0.5, 1), mean 1 + x(s), universe {∅, {1}}, 100 replicates.
std::vector<ExperimentConfig> table1_preset(std::uint64_t seed = kDefaultSeed);

enum class SweepExample { white_noise, exp_gp, monomial };
std::string to_string(SweepExample e);
SweepExample parse_sweep_example(const std::string& s);

// Two candidate regressors of the given class, beta0 = (1, 1, 0) so the
// true model is {1}, theta0 = (0.5, 0.5, 1), theta estimated per model.
// Monomials use the nested universe, the others all subsets.
ExperimentConfig consistency_preset(SweepExample example, std::vector<double> deltas,
                                    std::vector<Index> ns, TauRule tau, int replicates,
                                    std::uint64_t seed = kDefaultSeed);

ExperimentResult consistency_sweep(SweepExample example, std::vector<double> deltas,
                                   std::vector<Index> ns, TauRule tau, int replicates,
                                   std::uint64_t seed = kDefaultSeed, int jobs = 0);

}  // namespace geogic
