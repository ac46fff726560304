#include "geogic/design.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "geogic/covariance.hpp"
#include "geogic/error.hpp"

namespace geogic {

namespace {

void check_delta(double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw ConfigError("delta must lie in [0, 1), got " + std::to_string(delta));
  }
}

}  // namespace

double SiteSet::lattice_spacing() const {
  if (!is_lattice()) throw ConfigError("lattice spacing requested for a non-lattice site set");
  return std::pow(static_cast<double>(*side), -(1.0 - delta.value_or(0.0)));
}

SiteSet sites_1d(Index n, double delta) {
  if (n < 1) throw ConfigError("site count must be positive");
  check_delta(delta);
  SiteSet out;
  out.dim = 1;
  out.delta = delta;
  out.coords.resize(n, 1);
  const double h = std::pow(static_cast<double>(n), -(1.0 - delta));
  for (Index i = 0; i < n; ++i) out.coords(i, 0) = static_cast<double>(i + 1) * h;
  return out;
}

SiteSet sites_2d(Index n, double delta) {
  if (n < 1) throw ConfigError("site count must be positive");
  check_delta(delta);
  const auto m = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (m * m != n) {
    throw ConfigError("n = " + std::to_string(n) + " is not a perfect square");
  }
  SiteSet out;
  out.dim = 2;
  out.delta = delta;
  out.side = m;
  out.coords.resize(n, 2);
  const double h = std::pow(static_cast<double>(m), -(1.0 - delta));
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) {
      out.coords(i + j * m, 0) = static_cast<double>(i + 1) * h;
      out.coords(i + j * m, 1) = static_cast<double>(j + 1) * h;
    }
  }
  return out;
}

SiteSet sites_from_coords(Eigen::MatrixXd coords) {
  if (coords.cols() != 1 && coords.cols() != 2) {
    throw ConfigError("site coordinates must have one or two columns");
  }
  SiteSet out;
  out.dim = static_cast<int>(coords.cols());
  out.coords = std::move(coords);
  return out;
}

RegressorSpec RegressorSpec::white_noise(double v2) {
  RegressorSpec s;
  s.kind = RegressorKind::white_noise;
  s.variance = v2;
  s.validate();
  return s;
}

RegressorSpec RegressorSpec::exp_gp(double sigma2, double kappa) {
  RegressorSpec s;
  s.kind = RegressorKind::exp_gp;
  s.variance = sigma2;
  s.kappa = kappa;
  s.validate();
  return s;
}

RegressorSpec RegressorSpec::monomial(int degree) {
  RegressorSpec s;
  s.kind = RegressorKind::monomial;
  s.degree = degree;
  s.validate();
  return s;
}

RegressorSpec RegressorSpec::named(NamedFunction f) {
  RegressorSpec s;
  s.kind = RegressorKind::named_function;
  s.function = f;
  return s;
}

void RegressorSpec::validate() const {
  switch (kind) {
    case RegressorKind::white_noise:
      if (!(variance > 0.0) || !std::isfinite(variance))
        throw ConfigError("white-noise regressor needs variance > 0");
      break;
    case RegressorKind::exp_gp:
      if (!(variance > 0.0) || !(kappa > 0.0) || !std::isfinite(variance) || !std::isfinite(kappa))
        throw ConfigError("exp_gp regressor needs sigma2 > 0 and kappa > 0");
      break;
    case RegressorKind::monomial:
      if (degree < 1) throw ConfigError("monomial regressor needs degree >= 1");
      break;
    case RegressorKind::named_function:
      break;
  }
}

std::string RegressorSpec::describe() const {
  switch (kind) {
    case RegressorKind::white_noise: return "white_noise(v2=" + std::to_string(variance) + ")";
    case RegressorKind::exp_gp:
      return "exp_gp(sigma2=" + std::to_string(variance) + ", kappa=" + std::to_string(kappa) + ")";
    case RegressorKind::monomial: return "monomial(" + std::to_string(degree) + ")";
    case RegressorKind::named_function: return to_string(function);
  }
  return "?";
}

double named_function_value(NamedFunction f, double s) {
  if (s == 0.0) throw ConfigError("named regressor functions are undefined at s = 0");
  const double v = std::sin(std::numbers::pi / s);
  return f == NamedFunction::f1 ? s * s * v : s * v;
}

std::string to_string(NamedFunction f) { return f == NamedFunction::f1 ? "f1" : "f2"; }

NamedFunction parse_named_function(const std::string& name) {
  if (name == "f1") return NamedFunction::f1;
  if (name == "f2") return NamedFunction::f2;
  throw ConfigError("unknown regressor function '" + name + "' (expected f1 or f2)");
}

std::string to_string(RegressorKind k) {
  switch (k) {
    case RegressorKind::white_noise: return "white_noise";
    case RegressorKind::exp_gp: return "exp_gp";
    case RegressorKind::monomial: return "monomial";
    case RegressorKind::named_function: return "named_function";
  }
  return "?";
}

RegressorKind parse_regressor_kind(const std::string& name) {
  if (name == "white_noise") return RegressorKind::white_noise;
  if (name == "exp_gp") return RegressorKind::exp_gp;
  if (name == "monomial") return RegressorKind::monomial;
  if (name == "named_function") return RegressorKind::named_function;
  throw ConfigError("unknown regressor kind '" + name + "'");
}

Eigen::VectorXd gen_column(const RegressorSpec& spec, const SiteSet& sites, StreamRng& rng) {
  spec.validate();
  const Index n = sites.size();
  Eigen::VectorXd col(n);
  switch (spec.kind) {
    case RegressorKind::white_noise: {
      std::normal_distribution<double> normal(0.0, std::sqrt(spec.variance));
      for (Index i = 0; i < n; ++i) col(i) = normal(rng);
      break;
    }
    case RegressorKind::exp_gp: {
      std::normal_distribution<double> normal;
      Eigen::VectorXd u(n);
      for (Index i = 0; i < n; ++i) u(i) = normal(rng);
      const CovMatrix cov = make_covariance({0.0, spec.variance, spec.kappa}, sites);
      col = cov.apply_factor(u);
      break;
    }
    case RegressorKind::monomial: {
      if (sites.dim != 1) throw ConfigError("monomial regressors are defined for 1D sites only");
      const double delta = sites.delta.value_or(0.0);
      const double scale = std::pow(static_cast<double>(n), -delta * spec.degree);
      for (Index i = 0; i < n; ++i) col(i) = scale * std::pow(sites.coord(i), spec.degree);
      break;
    }
    case RegressorKind::named_function: {
      if (sites.dim != 1) throw ConfigError("f1/f2 regressors are defined for 1D sites only");
      for (Index i = 0; i < n; ++i) col(i) = named_function_value(spec.function, sites.coord(i));
      break;
    }
  }
  return col;
}

Eigen::MatrixXd gen_regressors(const std::vector<RegressorSpec>& specs, const SiteSet& sites,
                               SeedKey key) {
  const Index n = sites.size();
  const auto p = static_cast<Index>(specs.size());
  Eigen::MatrixXd x(n, p + 1);
  x.col(0).setOnes();
  for (Index j = 0; j < p; ++j) {
    StreamRng rng = key.stream(static_cast<std::uint64_t>(Stream::regressor_base) + j + 1);
    x.col(j + 1) = gen_column(specs[j], sites, rng);
  }
  return x;
}

}  // namespace geogic
