#include "geogic/selection.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "geogic/error.hpp"

namespace geogic {

TauRule TauRule::parse(const std::string& text) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("cannot parse tau rule '" + text + "'");
    }
  };
  TauRule rule;
  if (text == "aic") {
    rule = aic();
  } else if (text == "bic") {
    rule = bic();
  } else if (text.rfind("pow:", 0) == 0) {
    rule = power(number(text.substr(4)));
  } else if (text.rfind("const:", 0) == 0) {
    rule = constant(number(text.substr(6)));
  } else {
    throw ConfigError("unknown tau rule '" + text + "' (expected aic, bic, pow:<a>, const:<x>)");
  }
  rule.validate();
  return rule;
}

double TauRule::value(Index n) const {
  switch (kind) {
    case Kind::aic: return 2.0;
    case Kind::bic: return std::log(static_cast<double>(n));
    case Kind::power: return std::pow(static_cast<double>(n), param);
    case Kind::constant: return param;
  }
  return 0.0;
}

std::string TauRule::name() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::aic: return "aic";
    case Kind::bic: return "bic";
    case Kind::power: os << "pow:" << param; break;
    case Kind::constant: os << "const:" << param; break;
  }
  return os.str();
}

void TauRule::validate() const {
  if (kind == Kind::constant && !(param > 0.0 && std::isfinite(param))) {
    throw ConfigError("constant tau must be positive and finite");
  }
  if (kind == Kind::power && !std::isfinite(param)) {
    throw ConfigError("tau exponent must be finite");
  }
}

std::string to_string(EstimationMode m) {
  return m == EstimationMode::per_model_theta ? "per-model" : "common";
}

EstimationMode parse_estimation_mode(const std::string& s) {
  if (s == "per-model" || s == "per_model_theta") return EstimationMode::per_model_theta;
  if (s == "common" || s == "common_theta") return EstimationMode::common_theta;
  throw ConfigError("unknown estimation mode '" + s + "' (expected per-model or common)");
}

std::string to_string(UniverseKind u) {
  switch (u) {
    case UniverseKind::all_subsets: return "all";
    case UniverseKind::nested: return "nested";
    case UniverseKind::explicit_list: return "explicit";
  }
  return "?";
}

UniverseKind parse_universe_kind(const std::string& s) {
  if (s == "all" || s == "all_subsets") return UniverseKind::all_subsets;
  if (s == "nested") return UniverseKind::nested;
  if (s == "explicit" || s == "explicit_list") return UniverseKind::explicit_list;
  throw ConfigError("unknown universe '" + s + "' (expected all, nested or explicit)");
}

std::vector<ModelAlpha> enumerate_models(int p, UniverseKind universe) {
  if (p < 0) throw ConfigError("p must be non-negative");
  std::vector<ModelAlpha> out;
  switch (universe) {
    case UniverseKind::nested:
      for (int k = 0; k <= p; ++k) out.push_back(ModelAlpha::full(k));
      return out;
    case UniverseKind::all_subsets: {
      if (p > kMaxAllSubsets) {
        throw ConfigError("all-subsets universe limited to p <= " + std::to_string(kMaxAllSubsets) +
                          "; supply an explicit model list");
      }
      const std::uint32_t count = 1u << p;
      out.reserve(count);
      for (std::uint32_t mask = 0; mask < count; ++mask) {
        std::vector<int> idx;
        for (int j = 0; j < p; ++j) {
          if (mask & (1u << j)) idx.push_back(j + 1);
        }
        out.emplace_back(std::move(idx));
      }
      std::sort(out.begin(), out.end(), canonical_less);
      return out;
    }
    case UniverseKind::explicit_list:
      throw ConfigError("explicit universes are supplied by the caller, not enumerated");
  }
  return out;
}

std::vector<ModelAlpha> GicConfig::models(int p) const {
  if (universe != UniverseKind::explicit_list) return enumerate_models(p, universe);
  if (explicit_models.empty()) throw ConfigError("explicit universe is empty");
  std::vector<ModelAlpha> out = explicit_models;
  for (const auto& a : out) a.validate(p);
  std::sort(out.begin(), out.end(), canonical_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const ModelRecord& SelectionReport::winner_record() const {
  for (const auto& r : models) {
    if (r.alpha == winner && !r.excluded) return r;
  }
  throw Error("selection report has no record for its winner");
}

double gic_score(double loglik, double tau, const ModelAlpha& alpha, int penalty_offset) {
  return -2.0 * loglik + tau * static_cast<double>(alpha.size() + penalty_offset);
}

double gic_score(const ModelAlpha& alpha, double tau, const Dataset& data, const MleOptions& opts) {
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  return gic_score(fit_theta(alpha, data, opts).loglik, tau, alpha);
}

double gic_score(const ModelAlpha& alpha, double tau, const Dataset& data, const CovParams& theta) {
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  return gic_score(profile_loglik(alpha, theta, data), tau, alpha);
}

UniverseFit fit_universe(const Dataset& data, const std::vector<ModelAlpha>& models,
                         EstimationMode mode, const MleOptions& opts) {
  data.validate();
  opts.validate();
  if (models.empty()) throw ConfigError("model universe is empty");
  for (const auto& a : models) a.validate(data.p());

  UniverseFit fit;
  fit.mode = mode;
  fit.n = data.n();
  fit.records.resize(models.size());
  for (std::size_t k = 0; k < models.size(); ++k) fit.records[k].alpha = models[k];

  // One theta for every model: either the common estimate or a singleton box.
  std::optional<CovParams> shared_theta;
  if (mode == EstimationMode::common_theta) {
    fit.shared = fit_theta(ModelAlpha::full(static_cast<int>(data.p())), data, opts);
    shared_theta = fit.shared->theta_hat;
  } else if (opts.box.is_singleton()) {
    shared_theta = opts.box.clamp({opts.box.v2.lo, opts.box.sigma2.lo, opts.box.kappa.lo});
  }

  if (shared_theta) {
    std::optional<CovMatrix> cov;
    std::string cov_failure;
    try {
      cov = make_covariance(*shared_theta, data.sites);
    } catch (const NumericalError& e) {
      cov_failure = e.what();
    }
    for (auto& rec : fit.records) {
      rec.theta = *shared_theta;
      if (!cov) {
        rec.excluded = true;
        rec.failure = cov_failure;
        continue;
      }
      try {
        rec.loglik = gls_beta(rec.alpha, *cov, data).loglik;
        rec.evaluations = 1;
        if (fit.shared) rec.boundary = fit.shared->boundary;
      } catch (const NumericalError& e) {
        rec.excluded = true;
        rec.failure = e.what();
      }
    }
    return fit;
  }

  const bool allow_parallel = opts.parallel && !omp_in_parallel();
  std::vector<std::exception_ptr> errors(fit.records.size());
#pragma omp parallel for schedule(dynamic) if (allow_parallel)
  for (std::size_t k = 0; k < fit.records.size(); ++k) {
    auto& rec = fit.records[k];
    try {
      const MleResult res = fit_theta(rec.alpha, data, opts);
      rec.theta = res.theta_hat;
      rec.loglik = res.loglik;
      rec.boundary = res.boundary;
      rec.evaluations = res.evaluations;
    } catch (const NumericalError& e) {
      rec.excluded = true;
      rec.failure = e.what();
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return fit;
}

std::size_t pick_winner(const std::vector<ModelRecord>& records, std::vector<std::string>* notes) {
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    if (r.excluded) continue;
    if (!best) {
      best = k;
      continue;
    }
    const auto& b = records[*best];
    if (r.score < b.score) {
      best = k;
    } else if (r.score == b.score) {
      const bool takes = canonical_less(r.alpha, b.alpha);
      if (notes) {
        const auto& kept = takes ? r : b;
        const auto& other = takes ? b : r;
        notes->push_back("tie between " + kept.alpha.label() + " and " + other.alpha.label() +
                         " resolved in favour of " + kept.alpha.label() +
                         " (smaller model, then lexicographic)");
      }
      if (takes) best = k;
    }
  }
  if (!best) throw NumericalError("selection failed: every candidate model was excluded");
  return *best;
}

SelectionReport score_universe(const UniverseFit& fit, const TauRule& tau, int penalty_offset) {
  tau.validate();
  SelectionReport rep;
  rep.tau = tau.value(fit.n);
  if (!(rep.tau > 0.0)) throw ConfigError("tau rule " + tau.name() + " gives a non-positive penalty");
  rep.tau_rule = tau.name();
  rep.mode = fit.mode;
  rep.penalty_offset = penalty_offset;
  rep.n = fit.n;
  if (fit.shared) rep.shared_theta = fit.shared->theta_hat;
  rep.models = fit.records;
  for (auto& r : rep.models) {
    if (r.excluded) {
      rep.notes.push_back("model " + r.alpha.label() + " excluded: " + r.failure);
      continue;
    }
    r.score = gic_score(r.loglik, rep.tau, r.alpha, penalty_offset);
  }
  rep.winner = rep.models[pick_winner(rep.models, &rep.notes)].alpha;
  return rep;
}

SelectionReport select(const Dataset& data, const GicConfig& config, const MleOptions& opts) {
  const auto models = config.models(static_cast<int>(data.p()));
  return score_universe(fit_universe(data, models, config.mode, opts), config.tau,
                        config.penalty_offset);
}

}  // namespace geogic
