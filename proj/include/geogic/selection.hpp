#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geogic/likelihood.hpp"
#include "geogic/mle.hpp"

namespace geogic {

/// Penalty weight tau_n of the generalized information criterion.
struct TauRule {
  enum class Kind { aic, bic, power, constant };
  Kind kind = Kind::bic;
  double param = 0.0;  // exponent for power, value for constant

  static TauRule aic() { return {Kind::aic, 0.0}; }
  static TauRule bic() { return {Kind::bic, 0.0}; }
  static TauRule power(double a) { return {Kind::power, a}; }
  static TauRule constant(double c) { return {Kind::constant, c}; }
  // Accepts "aic", "bic", "pow:<a>", "const:<x>".
  static TauRule parse(const std::string& text);

  double value(Index n) const;
  std::string name() const;
  void validate() const;
};

enum class EstimationMode { per_model_theta, common_theta };
enum class UniverseKind { all_subsets, nested, explicit_list };

std::string to_string(EstimationMode m);
EstimationMode parse_estimation_mode(const std::string& s);
std::string to_string(UniverseKind u);
UniverseKind parse_universe_kind(const std::string& s);

inline constexpr int kMaxAllSubsets = 20;

// Deterministic order: smaller models first, then lexicographic; the
// intercept-only model is always first.
std::vector<ModelAlpha> enumerate_models(int p, UniverseKind universe);

struct GicConfig {
  TauRule tau;
  EstimationMode mode = EstimationMode::per_model_theta;
  UniverseKind universe = UniverseKind::all_subsets;
  std::vector<ModelAlpha> explicit_models;  // used with explicit_list
  // Added to |alpha| in the penalty. Shifting every penalty by the same
  // amount leaves the argmin unchanged; 1 counts the intercept.
  int penalty_offset = 0;

  std::vector<ModelAlpha> models(int p) const;
};

struct ModelRecord {
  ModelAlpha alpha;
  bool excluded = false;
  std::string failure;
  CovParams theta;
  double loglik = 0.0;
  double score = 0.0;
  BoundaryHits boundary;
  int evaluations = 0;
};

struct SelectionReport {
  std::vector<ModelRecord> models;
  ModelAlpha winner;
  double tau = 0.0;
  std::string tau_rule;
  EstimationMode mode = EstimationMode::per_model_theta;
  int penalty_offset = 0;
  Index n = 0;
  std::optional<CovParams> shared_theta;  // common_theta mode
  std::vector<std::string> notes;         // exclusions and tie-breaks

  const ModelRecord& winner_record() const;
};

double gic_score(double loglik, double tau, const ModelAlpha& alpha, int penalty_offset = 0);
// Per-model theta: fits theta_hat(alpha) under opts first.
double gic_score(const ModelAlpha& alpha, double tau, const Dataset& data, const MleOptions& opts);
// Shared theta.
double gic_score(const ModelAlpha& alpha, double tau, const Dataset& data, const CovParams& theta);

/// Fits for every model in a universe, independent of tau.
struct UniverseFit {
  std::vector<ModelRecord> records;  // scores not yet filled
  EstimationMode mode = EstimationMode::per_model_theta;
  std::optional<MleResult> shared;
  Index n = 0;
};

UniverseFit fit_universe(const Dataset& data, const std::vector<ModelAlpha>& models,
                         EstimationMode mode, const MleOptions& opts);

SelectionReport score_universe(const UniverseFit& fit, const TauRule& tau, int penalty_offset = 0);

// Minimum score over non-excluded records; exact ties go to the
// smallest model, then the lexicographically first.
std::size_t pick_winner(const std::vector<ModelRecord>& records, std::vector<std::string>* notes);

SelectionReport select(const Dataset& data, const GicConfig& config, const MleOptions& opts);

}  // namespace geogic
