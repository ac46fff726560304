#include "geogic/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "geogic/error.hpp"

namespace geogic {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Shortest text that reads back to the same double.
std::string fmt_short(double x) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

// --- dataset CSV ---

void write_dataset_csv(std::ostream& os, const Dataset& data) {
  data.validate();
  const int dim = data.sites.dim;
  os << "s1";
  if (dim == 2) os << ",s2";
  os << ",z";
  for (Index j = 1; j <= data.p(); ++j) os << ",x" << j;
  os << '\n';
  for (Index i = 0; i < data.n(); ++i) {
    os << fmt17(data.sites.coord(i, 0));
    if (dim == 2) os << ',' << fmt17(data.sites.coord(i, 1));
    os << ',' << fmt17(data.z[i]);
    for (Index j = 1; j <= data.p(); ++j) os << ',' << fmt17(data.x(i, j));
    os << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
  write_dataset_csv(os, data);
  if (!os) throw ConfigError("failed writing '" + path.string() + "'");
}

Dataset read_dataset_csv(std::istream& is, const std::string& source) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError(source + ": empty file, expected a header row");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const auto header = split_commas(line);

  std::size_t k = 0;
  if (header.empty() || header[0] != "s1") {
    throw ConfigError(source + ": line 1: first column must be 's1'");
  }
  ++k;
  int dim = 1;
  if (k < header.size() && header[k] == "s2") {
    dim = 2;
    ++k;
  }
  if (k >= header.size() || header[k] != "z") {
    throw ConfigError(source + ": line 1: expected column 'z' after the site columns");
  }
  ++k;
  const std::size_t p = header.size() - k;
  for (std::size_t j = 0; j < p; ++j) {
    const std::string want = "x" + std::to_string(j + 1);
    if (header[k + j] != want) {
      throw ConfigError(source + ": line 1: column " + std::to_string(k + j + 1) + " is '" +
                        header[k + j] + "', expected '" + want + "'");
    }
  }

  std::vector<std::vector<double>> rows;
  std::vector<long> line_of_row;
  std::map<std::pair<double, double>, long> seen;
  long lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != header.size()) {
      throw ConfigError(source + ": line " + std::to_string(lineno) + ": expected " +
                        std::to_string(header.size()) + " fields, found " +
                        std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string& f = fields[c];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), row[c]);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw ConfigError(source + ": line " + std::to_string(lineno) + ", column '" + header[c] +
                          "': cannot parse '" + f + "' as a real number");
      }
      if (!std::isfinite(row[c])) {
        throw ConfigError(source + ": line " + std::to_string(lineno) + ", column '" + header[c] +
                          "': non-finite value '" + f + "'");
      }
    }
    const std::pair<double, double> site{row[0], dim == 2 ? row[1] : 0.0};
    const auto [it, inserted] = seen.emplace(site, lineno);
    if (!inserted) {
      throw ConfigError(source + ": line " + std::to_string(lineno) + ": duplicate site, same as line " +
                        std::to_string(it->second));
    }
    rows.push_back(std::move(row));
    line_of_row.push_back(lineno);
  }
  if (rows.empty()) throw ConfigError(source + ": no data rows");

  const auto n = static_cast<Index>(rows.size());
  Eigen::MatrixXd coords(n, dim);
  Dataset d;
  d.z.resize(n);
  d.x.resize(n, static_cast<Index>(p) + 1);
  for (Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (int a = 0; a < dim; ++a) coords(i, a) = r[static_cast<std::size_t>(a)];
    d.z[i] = r[static_cast<std::size_t>(dim)];
    d.x(i, 0) = 1.0;
    for (std::size_t j = 0; j < p; ++j) d.x(i, static_cast<Index>(j) + 1) = r[k + j];
  }
  d.sites = sites_from_coords(std::move(coords));
  d.validate();
  return d;
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open dataset '" + path.string() + "'");
  return read_dataset_csv(is, path.string());
}

// --- JSON ---

Json to_json(const CovParams& t) {
  return Json{{"v2", t.v2}, {"sigma2", t.sigma2}, {"kappa", t.kappa}};
}

Json to_json(const ThetaBox& b) {
  return Json{{"v2", {b.v2.lo, b.v2.hi}},
              {"sigma2", {b.sigma2.lo, b.sigma2.hi}},
              {"kappa", {b.kappa.lo, b.kappa.hi}}};
}

Json to_json(const MleResult& fit, bool with_trace) {
  Json j{{"theta_hat", to_json(fit.theta_hat)},
         {"loglik", fit.loglik},
         {"evaluations", fit.evaluations},
         {"grid_best", fit.grid_best},
         {"boundary",
          {{"v2", fit.boundary.v2}, {"sigma2", fit.boundary.sigma2}, {"kappa", fit.boundary.kappa}}}};
  if (with_trace) {
    Json trace = Json::array();
    for (const auto& e : fit.trace) {
      trace.push_back({{"start", e.start}, {"iteration", e.iteration}, {"loglik", e.loglik},
                       {"theta", to_json(e.theta)}});
    }
    j["trace"] = std::move(trace);
  }
  return j;
}

Json to_json(const SelectionReport& r) {
  Json models = Json::array();
  for (const auto& m : r.models) {
    Json e{{"model", m.alpha.label()}, {"excluded", m.excluded}};
    if (m.excluded) {
      e["failure"] = m.failure;
    } else {
      e["theta"] = to_json(m.theta);
      e["loglik"] = m.loglik;
      e["gic"] = m.score;
      e["boundary"] = m.boundary.any();
      e["evaluations"] = m.evaluations;
    }
    models.push_back(std::move(e));
  }
  Json j{{"winner", r.winner.label()},
         {"tau_rule", r.tau_rule},
         {"tau", r.tau},
         {"mode", to_string(r.mode)},
         {"penalty_offset", r.penalty_offset},
         {"n", r.n},
         {"models", std::move(models)},
         {"notes", r.notes}};
  j["shared_theta"] = r.shared_theta ? to_json(*r.shared_theta) : Json(nullptr);
  return j;
}

Json to_json(const KlReport& k) {
  return Json{{"l0", k.l0},       {"bias", k.bias},     {"stochastic", k.stochastic},
              {"total", k.total}, {"direct", k.direct}, {"discrepancy", k.discrepancy}};
}

Json to_json(const RiskReport& r) {
  return Json{{"l0", r.l0},
              {"bias", r.bias},
              {"trace_term", r.trace_term},
              {"total", r.total},
              {"projector_rank", r.projector_rank},
              {"regressor_count", r.regressor_count}};
}

Json to_json(const RegressorSpec& s) {
  Json j{{"kind", to_string(s.kind)}};
  switch (s.kind) {
    case RegressorKind::white_noise: j["variance"] = s.variance; break;
    case RegressorKind::exp_gp:
      j["variance"] = s.variance;
      j["kappa"] = s.kappa;
      break;
    case RegressorKind::monomial: j["degree"] = s.degree; break;
    case RegressorKind::named_function: j["function"] = to_string(s.function); break;
  }
  return j;
}

Json to_json(const ExperimentConfig& c) {
  Json regs = Json::array();
  for (const auto& r : c.regressors) regs.push_back(to_json(r));
  Json beta = Json::array();
  for (Index i = 0; i < c.beta0.size(); ++i) beta.push_back(c.beta0[i]);
  Json models = Json::array();
  for (const auto& m : c.explicit_models) models.push_back(m.label());
  Json taus = Json::array();
  for (const auto& t : c.tau_rules) taus.push_back(t.name());
  Json j{{"label", c.label},
         {"dim", c.dim},
         {"regressors", std::move(regs)},
         {"beta0", std::move(beta)},
         {"zeta_coef", c.zeta_coef},
         {"theta0", to_json(c.theta0)},
         {"universe", to_string(c.universe)},
         {"models", std::move(models)},
         {"tau", std::move(taus)},
         {"mode", to_string(c.mode)},
         {"ns", c.ns},
         {"deltas", c.deltas},
         {"replicates", c.replicates},
         {"seed", c.seed},
         {"known_theta", c.known_theta},
         {"mle",
          {{"box", to_json(c.mle.box)},
           {"grid_resolution", c.mle.grid_resolution},
           {"tolerance", c.mle.tolerance},
           {"max_iterations", c.mle.max_iterations},
           {"multistart", c.mle.multistart}}},
         {"compute_kl", c.compute_kl}};
  j["zeta"] = c.zeta ? to_json(*c.zeta) : Json(nullptr);
  return j;
}

Json to_json(const CellResult& c) {
  Json counts = Json::array();
  for (std::size_t m = 0; m < c.models.size(); ++m) {
    counts.push_back({{"model", c.models[m].label()}, {"count", c.counts[m]}});
  }
  return Json{{"n", c.n},
              {"delta", c.delta},
              {"tau_rule", c.tau_rule},
              {"tau", c.tau},
              {"counts", std::move(counts)},
              {"failures", c.failures},
              {"aborted", c.aborted},
              {"excluded_fits", c.excluded_fits},
              {"alpha0_frequency", c.alpha0_frequency},
              {"empty_frequency", c.empty_frequency},
              {"boundary_hit_rate", c.boundary_hit_rate},
              {"mean_kl_loss", c.mean_kl_loss},
              {"median_kl_loss", c.median_kl_loss},
              {"sd_kl_loss", c.sd_kl_loss},
              {"mean_efficiency", c.mean_efficiency},
              {"median_efficiency", c.median_efficiency},
              {"efficiency_floored", c.efficiency_floored}};
}

Json to_json(const ExperimentResult& r) {
  Json cells = Json::array();
  for (const auto& c : r.cells) cells.push_back(to_json(c));
  const Json echo = to_json(r.config);
  return Json{{"config", echo},
              {"config_digest", config_digest(echo)},
              {"seed", r.config.seed},
              {"true_model", r.true_model ? Json(r.true_model->label()) : Json(nullptr)},
              {"metadata",
               {{"regressor_draws", "resampled per replicate"},
                {"penalty_count", "|alpha|, intercept excluded"},
                {"tau_rate_conditions", "not checked against delta"},
                {"seed_path", "seed/n_index/delta_index/replicate/stream"}}},
              {"cells", std::move(cells)}};
}

Json results_json(const std::vector<ExperimentResult>& results) {
  Json exps = Json::array();
  for (const auto& r : results) exps.push_back(to_json(r));
  return Json{{"tool_version", kToolVersion}, {"experiments", std::move(exps)}};
}

namespace {

[[noreturn]] void field_error(const std::string& where, const std::string& what) {
  throw ConfigError("field '" + where + "': " + what);
}

double as_real(const Json& j, const std::string& where) {
  if (!j.is_number()) field_error(where, "expected a number");
  return j.get<double>();
}

long long as_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) field_error(where, "expected an integer");
  return j.get<long long>();
}

std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) field_error(where, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const Json& j, const std::string& where) {
  if (!j.is_boolean()) field_error(where, "expected true or false");
  return j.get<bool>();
}

const Json& as_array(const Json& j, const std::string& where) {
  if (!j.is_array()) field_error(where, "expected an array");
  return j;
}

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) field_error(where, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) field_error(where.empty() ? k : where + "." + k, "unknown key");
  }
}

std::string sub(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

std::string idx(const std::string& where, std::size_t i) {
  return where + "[" + std::to_string(i) + "]";
}

// Rethrows a validation failure with the field path in front.
template <class F>
auto at_field(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind("field '", 0) == 0) throw;
    field_error(where, msg);
  }
}

Interval interval_from_json(const Json& j, const std::string& where) {
  as_array(j, where);
  if (j.size() != 2) field_error(where, "expected [lo, hi]");
  return {as_real(j[0], idx(where, 0)), as_real(j[1], idx(where, 1))};
}

}  // namespace

CovParams theta_from_json(const Json& j, const std::string& where) {
  CovParams t;
  if (j.is_array()) {
    if (j.size() != 3) field_error(where, "expected [v2, sigma2, kappa]");
    t = {as_real(j[0], idx(where, 0)), as_real(j[1], idx(where, 1)), as_real(j[2], idx(where, 2))};
  } else {
    check_keys(j, where, {"v2", "sigma2", "kappa"});
    for (const char* k : {"v2", "sigma2", "kappa"}) {
      if (!j.contains(k)) field_error(sub(where, k), "missing");
    }
    t = {as_real(j["v2"], sub(where, "v2")), as_real(j["sigma2"], sub(where, "sigma2")),
         as_real(j["kappa"], sub(where, "kappa"))};
  }
  at_field(where, [&] {
    t.validate();
    return 0;
  });
  return t;
}

ThetaBox box_from_json(const Json& j, const std::string& where) {
  check_keys(j, where, {"v2", "sigma2", "kappa"});
  ThetaBox b;
  for (const char* k : {"v2", "sigma2", "kappa"}) {
    if (!j.contains(k)) field_error(sub(where, k), "missing");
  }
  b.v2 = interval_from_json(j["v2"], sub(where, "v2"));
  b.sigma2 = interval_from_json(j["sigma2"], sub(where, "sigma2"));
  b.kappa = interval_from_json(j["kappa"], sub(where, "kappa"));
  at_field(where, [&] {
    b.validate();
    return 0;
  });
  return b;
}

RegressorSpec regressor_from_json(const Json& j, const std::string& where) {
  check_keys(j, where, {"kind", "variance", "kappa", "degree", "function"});
  if (!j.contains("kind")) field_error(sub(where, "kind"), "missing");
  RegressorSpec s;
  s.kind = at_field(sub(where, "kind"),
                    [&] { return parse_regressor_kind(as_string(j["kind"], sub(where, "kind"))); });
  if (j.contains("variance")) s.variance = as_real(j["variance"], sub(where, "variance"));
  if (j.contains("kappa")) s.kappa = as_real(j["kappa"], sub(where, "kappa"));
  if (j.contains("degree")) s.degree = static_cast<int>(as_int(j["degree"], sub(where, "degree")));
  if (j.contains("function")) {
    s.function = at_field(sub(where, "function"), [&] {
      return parse_named_function(as_string(j["function"], sub(where, "function")));
    });
  }
  at_field(where, [&] {
    s.validate();
    return 0;
  });
  return s;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  check_keys(j, "", {"label", "dim", "regressors", "beta0", "zeta", "zeta_coef", "theta0",
                     "universe", "models", "tau", "mode", "ns", "deltas", "replicates", "seed",
                     "known_theta", "mle", "compute_kl"});
  ExperimentConfig c;
  if (j.contains("label")) c.label = as_string(j["label"], "label");
  if (j.contains("dim")) c.dim = static_cast<int>(as_int(j["dim"], "dim"));
  if (j.contains("regressors")) {
    c.regressors.clear();
    const Json& a = as_array(j["regressors"], "regressors");
    for (std::size_t i = 0; i < a.size(); ++i) {
      c.regressors.push_back(regressor_from_json(a[i], idx("regressors", i)));
    }
  }
  if (j.contains("beta0")) {
    const Json& a = as_array(j["beta0"], "beta0");
    c.beta0.resize(static_cast<Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      c.beta0[static_cast<Index>(i)] = as_real(a[i], idx("beta0", i));
    }
  }
  if (j.contains("zeta") && !j["zeta"].is_null()) c.zeta = regressor_from_json(j["zeta"], "zeta");
  if (j.contains("zeta_coef")) c.zeta_coef = as_real(j["zeta_coef"], "zeta_coef");
  if (j.contains("theta0")) c.theta0 = theta_from_json(j["theta0"], "theta0");
  if (j.contains("universe")) {
    c.universe = at_field("universe", [&] { return parse_universe_kind(as_string(j["universe"], "universe")); });
  }
  if (j.contains("models")) {
    const Json& a = as_array(j["models"], "models");
    for (std::size_t i = 0; i < a.size(); ++i) {
      c.explicit_models.push_back(at_field(idx("models", i), [&] {
        return ModelAlpha::parse(as_string(a[i], idx("models", i)));
      }));
    }
  }
  if (j.contains("tau")) {
    c.tau_rules.clear();
    const Json& t = j["tau"];
    if (t.is_string()) {
      c.tau_rules.push_back(at_field("tau", [&] { return TauRule::parse(t.get<std::string>()); }));
    } else {
      as_array(t, "tau");
      for (std::size_t i = 0; i < t.size(); ++i) {
        c.tau_rules.push_back(at_field(idx("tau", i), [&] {
          return TauRule::parse(as_string(t[i], idx("tau", i)));
        }));
      }
    }
  }
  if (j.contains("mode")) {
    c.mode = at_field("mode", [&] { return parse_estimation_mode(as_string(j["mode"], "mode")); });
  }
  if (j.contains("ns")) {
    c.ns.clear();
    const Json& a = as_array(j["ns"], "ns");
    for (std::size_t i = 0; i < a.size(); ++i) c.ns.push_back(static_cast<Index>(as_int(a[i], idx("ns", i))));
  }
  if (j.contains("deltas")) {
    c.deltas.clear();
    const Json& a = as_array(j["deltas"], "deltas");
    for (std::size_t i = 0; i < a.size(); ++i) c.deltas.push_back(as_real(a[i], idx("deltas", i)));
  }
  if (j.contains("replicates")) c.replicates = static_cast<int>(as_int(j["replicates"], "replicates"));
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) field_error("seed", "expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("known_theta")) c.known_theta = as_bool(j["known_theta"], "known_theta");
  if (j.contains("mle")) {
    const Json& m = j["mle"];
    check_keys(m, "mle", {"box", "grid_resolution", "tolerance", "max_iterations", "multistart"});
    if (m.contains("box")) c.mle.box = box_from_json(m["box"], "mle.box");
    if (m.contains("grid_resolution")) {
      c.mle.grid_resolution = static_cast<int>(as_int(m["grid_resolution"], "mle.grid_resolution"));
    }
    if (m.contains("tolerance")) c.mle.tolerance = as_real(m["tolerance"], "mle.tolerance");
    if (m.contains("max_iterations")) {
      c.mle.max_iterations = static_cast<int>(as_int(m["max_iterations"], "mle.max_iterations"));
    }
    if (m.contains("multistart")) c.mle.multistart = static_cast<int>(as_int(m["multistart"], "mle.multistart"));
  }
  if (j.contains("compute_kl")) c.compute_kl = as_bool(j["compute_kl"], "compute_kl");
  if (c.known_theta) c.mle.box = ThetaBox::singleton(c.theta0);
  return c;
}

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(source + ": line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": invalid JSON");
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_json_text(ss.str(), path.string());
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& f : split_commas(text)) {
    double v = 0.0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(v)) {
      throw ConfigError(what + ": cannot parse '" + f + "' as a real number");
    }
    out.push_back(v);
  }
  return out;
}

// --- experiment outputs ---

namespace {

std::string function_label(const ExperimentResult& r, const CellResult& c) {
  return r.config.tau_rules.size() > 1 ? r.config.label + "/" + c.tau_rule : r.config.label;
}

}  // namespace

void write_frequency_csv(std::ostream& os, const std::vector<ExperimentResult>& results) {
  os << "function,n,delta,model,count\n";
  for (const auto& r : results) {
    for (const auto& c : r.cells) {
      const std::string prefix =
          csv_field(function_label(r, c)) + ',' + std::to_string(c.n) + ',' + fmt_short(c.delta) + ',';
      for (std::size_t m = 0; m < c.models.size(); ++m) {
        os << prefix << csv_field(c.models[m].label()) << ',' << c.counts[m] << '\n';
      }
      if (c.failures > 0) os << prefix << "failed," << c.failures << '\n';
    }
  }
}

void write_table1_csv(std::ostream& os, const std::vector<ExperimentResult>& results) {
  os << "function,n,model,frequency\n";
  for (const auto& r : results) {
    for (const auto& c : r.cells) {
      int ok = 0;
      for (int k : c.counts) ok += k;
      for (std::size_t m = 0; m < c.models.size(); ++m) {
        const double f = ok > 0 ? static_cast<double>(c.counts[m]) / ok : 0.0;
        os << csv_field(function_label(r, c)) << ',' << c.n << ',' << csv_field(c.models[m].label())
           << ',' << fmt_short(f) << '\n';
      }
    }
  }
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

constexpr std::array<const char*, 8> kPalette{"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                              "#59a14f", "#edc948", "#b07aa1", "#9c755f"};

}  // namespace

std::string frequency_svg(const std::vector<ExperimentResult>& results) {
  constexpr double bar = 14.0, gap = 22.0, left = 50.0, panel_h = 220.0, plot_h = 150.0, top = 30.0;

  struct Panel {
    std::string title;
    std::vector<const CellResult*> cells;
    const std::vector<ModelAlpha>* models;
    bool several_deltas;
  };
  std::vector<Panel> panels;
  for (const auto& r : results) {
    for (const auto& rule : r.config.tau_rules) {
      Panel p{r.config.label + " (" + rule.name() + ")", {}, nullptr, r.config.deltas.size() > 1};
      for (const auto& c : r.cells) {
        if (c.tau_rule == rule.name()) p.cells.push_back(&c);
      }
      if (!p.cells.empty()) {
        p.models = &p.cells.front()->models;
        panels.push_back(std::move(p));
      }
    }
  }

  double width = 400.0;
  for (const auto& p : panels) {
    const double group_w = static_cast<double>(p.models->size()) * bar + gap;
    width = std::max(width, left + static_cast<double>(p.cells.size()) * group_w + 160.0);
  }
  const double height = std::max(1.0, static_cast<double>(panels.size())) * panel_h;

  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const auto& p = panels[pi];
    const double y0 = static_cast<double>(pi) * panel_h;
    const double base = y0 + top + plot_h;
    const double group_w = static_cast<double>(p.models->size()) * bar + gap;
    os << "<text x=\"" << left << "\" y=\"" << y0 + 18 << "\" font-size=\"13\">"
       << xml_escape(p.title) << "</text>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << base << "\" x2=\"" << left + p.cells.size() * group_w
       << "\" y2=\"" << base << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << y0 + top << "\" x2=\"" << left << "\" y2=\"" << base
       << "\" stroke=\"black\"/>\n";
    for (double tick : {0.0, 0.5, 1.0}) {
      os << "<text x=\"" << left - 6 << "\" y=\"" << base - tick * plot_h + 4
         << "\" text-anchor=\"end\">" << tick << "</text>\n";
    }
    for (std::size_t g = 0; g < p.cells.size(); ++g) {
      const CellResult& c = *p.cells[g];
      int ok = 0;
      for (int k : c.counts) ok += k;
      const double gx = left + gap / 2 + static_cast<double>(g) * group_w;
      for (std::size_t m = 0; m < c.models.size(); ++m) {
        const double f = ok > 0 ? static_cast<double>(c.counts[m]) / ok : 0.0;
        os << "<rect x=\"" << gx + static_cast<double>(m) * bar << "\" y=\"" << base - f * plot_h
           << "\" width=\"" << bar - 2 << "\" height=\"" << f * plot_h << "\" fill=\""
           << kPalette[m % kPalette.size()] << "\"/>\n";
      }
      std::string label = "n=" + std::to_string(c.n);
      if (p.several_deltas) label += " d=" + fmt_short(c.delta);
      os << "<text x=\"" << gx + (group_w - gap) / 2 << "\" y=\"" << base + 14
         << "\" text-anchor=\"middle\">" << xml_escape(label) << "</text>\n";
    }
    const double lx = left + static_cast<double>(p.cells.size()) * group_w + 20;
    for (std::size_t m = 0; m < p.models->size(); ++m) {
      const double ly = y0 + top + static_cast<double>(m) * 16;
      os << "<rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"10\" height=\"10\" fill=\""
         << kPalette[m % kPalette.size()] << "\"/>\n";
      os << "<text x=\"" << lx + 14 << "\" y=\"" << ly + 9 << "\">"
         << xml_escape((*p.models)[m].label()) << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

// --- run manifest ---

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

std::string config_digest(const Json& config_echo) { return sha256_hex(config_echo.dump()); }

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

OutputFile describe_output(const std::filesystem::path& dir, const std::string& name) {
  std::ifstream is(dir / name, std::ios::binary);
  if (!is) throw ConfigError("cannot read output '" + (dir / name).string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  const std::string bytes = ss.str();
  return {name, bytes.size(), sha256_hex(bytes)};
}

OutputFile write_output(const std::filesystem::path& dir, const std::string& name,
                        const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw ConfigError("cannot open '" + (dir / name).string() + "' for writing");
  os << text;
  os.close();
  if (!os) throw ConfigError("failed writing '" + (dir / name).string() + "'");
  return {name, text.size(), sha256_hex(text)};
}

Json to_json(const RunManifest& m) {
  Json outs = Json::array();
  for (const auto& o : m.outputs) outs.push_back({{"path", o.path}, {"bytes", o.bytes}, {"sha256", o.sha256}});
  return Json{{"tool_version", m.tool_version}, {"command", m.command},
              {"config_digest", m.config_digest}, {"seed", m.seed},
              {"started_utc", m.started_utc},   {"finished_utc", m.finished_utc},
              {"outputs", std::move(outs)}};
}

}  // namespace geogic
