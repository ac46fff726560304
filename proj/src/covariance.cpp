#include "geogic/covariance.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>

#include "geogic/error.hpp"
#include "geogic/kernels.hpp"

namespace geogic {

namespace {

bool finite(double x) { return std::isfinite(x); }

}  // namespace

bool CovParams::valid() const {
  return finite(v2) && finite(sigma2) && finite(kappa) && v2 >= 0.0 && sigma2 > 0.0 &&
         kappa > 0.0;
}

void CovParams::validate() const {
  if (!valid()) {
    throw ConfigError("invalid covariance parameters " + to_string(*this) +
                      ": need v2 >= 0, sigma2 > 0, kappa > 0, all finite");
  }
}

ThetaBox ThetaBox::singleton(const CovParams& theta) {
  theta.validate();
  return ThetaBox{{theta.v2, theta.v2}, {theta.sigma2, theta.sigma2}, {theta.kappa, theta.kappa}};
}

bool ThetaBox::valid() const {
  auto ok = [](const Interval& iv, bool allow_zero) {
    return finite(iv.lo) && finite(iv.hi) && iv.lo <= iv.hi &&
           (allow_zero ? iv.lo >= 0.0 : iv.lo > 0.0);
  };
  return ok(v2, true) && ok(sigma2, false) && ok(kappa, false);
}

void ThetaBox::validate() const {
  if (!valid()) {
    std::ostringstream os;
    os << "invalid theta box: v2 [" << v2.lo << ", " << v2.hi << "], sigma2 [" << sigma2.lo
       << ", " << sigma2.hi << "], kappa [" << kappa.lo << ", " << kappa.hi << "]";
    throw ConfigError(os.str());
  }
}

bool ThetaBox::contains(const CovParams& t) const {
  return v2.contains(t.v2) && sigma2.contains(t.sigma2) && kappa.contains(t.kappa);
}

bool ThetaBox::is_singleton() const {
  return v2.degenerate() && sigma2.degenerate() && kappa.degenerate();
}

CovParams ThetaBox::clamp(const CovParams& t) const {
  return {std::clamp(t.v2, v2.lo, v2.hi), std::clamp(t.sigma2, sigma2.lo, sigma2.hi),
          std::clamp(t.kappa, kappa.lo, kappa.hi)};
}

std::string to_string(const CovParams& t) {
  std::ostringstream os;
  os.precision(10);
  os << "(v2=" << t.v2 << ", sigma2=" << t.sigma2 << ", kappa=" << t.kappa << ")";
  return os.str();
}

// ---------------------------------------------------------------------------

struct CovMatrix::Impl {
  virtual ~Impl() = default;
  virtual Index size() const = 0;
  virtual CovLayout layout() const = 0;
  virtual double log_det() const = 0;
  virtual Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const = 0;
  virtual Eigen::MatrixXd multiply(const Eigen::MatrixXd& rhs) const = 0;
  virtual Eigen::MatrixXd apply_factor(const Eigen::MatrixXd& u) const = 0;
  virtual Eigen::MatrixXd to_dense() const = 0;
  virtual Eigen::VectorXd diagonal() const = 0;
  virtual double jitter() const { return 0.0; }
};

namespace {

struct DenseImpl final : CovMatrix::Impl {
  Eigen::MatrixXd sigma;
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter_amount = 0.0;

  Index size() const override { return sigma.rows(); }
  CovLayout layout() const override { return CovLayout::dense; }
  double log_det() const override {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const override { return llt.solve(rhs); }
  Eigen::MatrixXd multiply(const Eigen::MatrixXd& rhs) const override { return sigma * rhs; }
  Eigen::MatrixXd apply_factor(const Eigen::MatrixXd& u) const override {
    return llt.matrixL() * u;
  }
  Eigen::MatrixXd to_dense() const override { return sigma; }
  Eigen::VectorXd diagonal() const override { return sigma.diagonal(); }
  double jitter() const override { return jitter_amount; }
};

bool cholesky_ok(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  if (llt.info() != Eigen::Success) return false;
  const auto d = llt.matrixLLT().diagonal();
  return (d.array() > 0.0).all() && d.allFinite();
}

void check_symmetric(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    throw ConfigError("covariance matrix must be square and nonempty");
  }
  if (!sigma.allFinite()) throw ConfigError("covariance matrix has non-finite entries");
  const double scale = std::max(sigma.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw ConfigError("covariance matrix is not symmetric (max asymmetry " +
                      std::to_string(asym) + ")");
  }
}

// First attempt is plain Cholesky. `on_failure` may throw a more specific
// error before the single jittered retry.
template <typename OnFailure>
std::shared_ptr<DenseImpl> factor_dense(Eigen::MatrixXd sigma, OnFailure on_failure) {
  check_symmetric(sigma);
  auto impl = std::make_shared<DenseImpl>();
  impl->llt.compute(sigma);
  if (!cholesky_ok(impl->llt)) {
    on_failure();
    const Index n = sigma.rows();
    const double jitter = 1e-10 * sigma.trace() / static_cast<double>(n);
    sigma.diagonal().array() += jitter;
    impl->llt.compute(sigma);
    if (!cholesky_ok(impl->llt)) {
      throw SingularityError("Cholesky factorization failed even after diagonal jitter " +
                             std::to_string(jitter));
    }
    impl->jitter_amount = jitter;
  }
  impl->sigma = std::move(sigma);
  return impl;
}

struct KroneckerImpl final : CovMatrix::Impl {
  double sigma2 = 1.0;
  Eigen::MatrixXd corr;  // m x m
  Eigen::LLT<Eigen::MatrixXd> llt;

  Index m() const { return corr.rows(); }
  Index size() const override { return m() * m(); }
  CovLayout layout() const override { return CovLayout::kronecker; }
  double log_det() const override {
    const double logdet_b = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const double mm = static_cast<double>(m());
    return 2.0 * mm * logdet_b + mm * mm * std::log(sigma2);
  }

  // Column c of rhs, viewed as an m x m matrix Y with Y(i, j) = c[i + j m].
  template <typename F>
  Eigen::MatrixXd per_column(const Eigen::MatrixXd& rhs, F f) const {
    const Index mm = m();
    Eigen::MatrixXd out(rhs.rows(), rhs.cols());
    for (Index c = 0; c < rhs.cols(); ++c) {
      Eigen::Map<const Eigen::MatrixXd> y(rhs.col(c).data(), mm, mm);
      Eigen::MatrixXd r = f(y);
      out.col(c) = Eigen::Map<const Eigen::VectorXd>(r.data(), mm * mm);
    }
    return out;
  }

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const override {
    return per_column(rhs, [&](const auto& y) -> Eigen::MatrixXd {
      Eigen::MatrixXd left = llt.solve(y);                     // B^{-1} Y
      Eigen::MatrixXd both = llt.solve(left.transpose());      // B^{-1} Y' B^{-1}
      return both.transpose() / sigma2;
    });
  }
  Eigen::MatrixXd multiply(const Eigen::MatrixXd& rhs) const override {
    return per_column(rhs, [&](const auto& y) -> Eigen::MatrixXd {
      return sigma2 * (corr * y * corr);
    });
  }
  Eigen::MatrixXd apply_factor(const Eigen::MatrixXd& u) const override {
    const double s = std::sqrt(sigma2);
    return per_column(u, [&](const auto& y) -> Eigen::MatrixXd {
      Eigen::MatrixXd l = llt.matrixL();
      return s * (l * y * l.transpose());
    });
  }
  Eigen::MatrixXd to_dense() const override {
    const Index mm = m();
    Eigen::MatrixXd out(mm * mm, mm * mm);
    for (Index j2 = 0; j2 < mm; ++j2)
      for (Index i2 = 0; i2 < mm; ++i2)
        for (Index j1 = 0; j1 < mm; ++j1)
          for (Index i1 = 0; i1 < mm; ++i1)
            out(i1 + j1 * mm, i2 + j2 * mm) = sigma2 * corr(i1, i2) * corr(j1, j2);
    return out;
  }
  Eigen::VectorXd diagonal() const override {
    Eigen::VectorXd d(size());
    for (Index j = 0; j < m(); ++j)
      for (Index i = 0; i < m(); ++i) d(i + j * m()) = sigma2 * corr(i, i) * corr(j, j);
    return d;
  }
};

// LDL' of a symmetric tridiagonal matrix (diag d, off-diagonal e).
struct Tridiag {
  Eigen::VectorXd pivots;
  Eigen::VectorXd mult;  // mult(i) = L(i+1, i)

  static std::optional<Tridiag> factor(const Eigen::VectorXd& d, const Eigen::VectorXd& e) {
    const Index n = d.size();
    Tridiag f;
    f.pivots.resize(n);
    f.mult.resize(std::max<Index>(n - 1, 0));
    f.pivots(0) = d(0);
    if (!(f.pivots(0) > 0.0)) return std::nullopt;
    for (Index i = 1; i < n; ++i) {
      f.mult(i - 1) = e(i - 1) / f.pivots(i - 1);
      f.pivots(i) = d(i) - f.mult(i - 1) * e(i - 1);
      if (!(f.pivots(i) > 0.0) || !std::isfinite(f.pivots(i))) return std::nullopt;
    }
    return f;
  }

  void solve_in_place(Eigen::Ref<Eigen::VectorXd> x) const {
    const Index n = x.size();
    for (Index i = 1; i < n; ++i) x(i) -= mult(i - 1) * x(i - 1);
    for (Index i = 0; i < n; ++i) x(i) /= pivots(i);
    for (Index i = n - 2; i >= 0; --i) x(i) -= mult(i) * x(i + 1);
  }

  double log_det() const { return pivots.array().log().sum(); }
};

// sigma2 * R + v2 * I where R(i, j) = exp(-kappa |s_i - s_j|). In sorted order
// R^{-1} = Q is tridiagonal, and Sigma = R (sigma2 I + v2 Q) = R T.
struct MarkovImpl final : CovMatrix::Impl {
  CovParams theta;
  Eigen::MatrixXd coords;              // original order, n x 1
  std::vector<Index> order;            // order[r] = original index of r-th smallest
  Eigen::VectorXd rho;                 // exp(-kappa gap), n - 1
  Eigen::VectorXd one_minus_rho2;      // n - 1
  Eigen::VectorXd q_diag, q_off;
  Tridiag q_factor;
  std::optional<Tridiag> t_factor;     // only when v2 > 0
  double logdet = 0.0;
  mutable std::once_flag dense_once;
  mutable std::shared_ptr<DenseImpl> dense_fallback;

  Index size() const override { return static_cast<Index>(order.size()); }
  CovLayout layout() const override { return CovLayout::markov; }
  double log_det() const override { return logdet; }

  Eigen::VectorXd gather(const Eigen::Ref<const Eigen::VectorXd>& b) const {
    Eigen::VectorXd out(size());
    for (Index r = 0; r < size(); ++r) out(r) = b(order[r]);
    return out;
  }
  void scatter(const Eigen::VectorXd& sorted, Eigen::Ref<Eigen::VectorXd> out) const {
    for (Index r = 0; r < size(); ++r) out(order[r]) = sorted(r);
  }
  Eigen::VectorXd q_times(const Eigen::VectorXd& x) const {
    const Index n = size();
    Eigen::VectorXd y = q_diag.cwiseProduct(x);
    for (Index i = 0; i + 1 < n; ++i) {
      y(i) += q_off(i) * x(i + 1);
      y(i + 1) += q_off(i) * x(i);
    }
    return y;
  }

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const override {
    Eigen::MatrixXd out(rhs.rows(), rhs.cols());
    for (Index c = 0; c < rhs.cols(); ++c) {
      Eigen::VectorXd y = q_times(gather(rhs.col(c)));
      if (t_factor) {
        t_factor->solve_in_place(y);
      } else {
        y /= theta.sigma2;
      }
      scatter(y, out.col(c));
    }
    return out;
  }

  Eigen::MatrixXd multiply(const Eigen::MatrixXd& rhs) const override {
    Eigen::MatrixXd out(rhs.rows(), rhs.cols());
    for (Index c = 0; c < rhs.cols(); ++c) {
      Eigen::VectorXd b = gather(rhs.col(c));
      Eigen::VectorXd rb = b;
      q_factor.solve_in_place(rb);
      scatter(theta.sigma2 * rb + theta.v2 * b, out.col(c));
    }
    return out;
  }

  Eigen::MatrixXd apply_factor(const Eigen::MatrixXd& u) const override {
    if (theta.v2 > 0.0) {
      std::call_once(dense_once, [&] {
        dense_fallback = factor_dense(to_dense(), [] {});
      });
      return dense_fallback->apply_factor(u);
    }
    // Forward recursion of the Ornstein-Uhlenbeck process: this is the
    // lower Cholesky factor of sigma2 R in sorted order.
    const double s = std::sqrt(theta.sigma2);
    Eigen::MatrixXd out(u.rows(), u.cols());
    for (Index c = 0; c < u.cols(); ++c) {
      Eigen::VectorXd w = gather(u.col(c));
      Eigen::VectorXd y(size());
      y(0) = s * w(0);
      for (Index r = 1; r < size(); ++r) {
        y(r) = rho(r - 1) * y(r - 1) + s * std::sqrt(one_minus_rho2(r - 1)) * w(r);
      }
      scatter(y, out.col(c));
    }
    return out;
  }

  Eigen::MatrixXd to_dense() const override { return kernels::assemble_exp_1d(theta, coords); }
  Eigen::VectorXd diagonal() const override {
    return Eigen::VectorXd::Constant(size(), theta.sigma2 + theta.v2);
  }
};

void require_1d(const SiteSet& sites) {
  if (sites.dim != 1 || sites.coords.cols() != 1) {
    throw ConfigError("expected one-dimensional sites");
  }
  if (sites.size() == 0) throw ConfigError("site set is empty");
  if (!sites.coords.allFinite()) throw ConfigError("site coordinates must be finite");
}

std::optional<std::pair<Index, Index>> find_duplicate(const SiteSet& sites) {
  const Index n = sites.size();
  std::vector<Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto key = [&](Index i) {
    return std::pair{sites.coords(i, 0), sites.dim == 2 ? sites.coords(i, 1) : 0.0};
  };
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return key(a) < key(b); });
  for (Index r = 1; r < n; ++r) {
    if (key(idx[r]) == key(idx[r - 1])) return std::pair{idx[r - 1], idx[r]};
  }
  return std::nullopt;
}

CovMatrix dense_for_sites(const CovParams& theta, const SiteSet& sites, Eigen::MatrixXd sigma) {
  auto impl = factor_dense(std::move(sigma), [&] {
    if (theta.v2 == 0.0) {
      if (auto dup = find_duplicate(sites)) {
        throw SingularityError("singular covariance: sites " + std::to_string(dup->first) +
                               " and " + std::to_string(dup->second) +
                               " coincide and the nugget v2 is zero");
      }
    }
  });
  return CovMatrix{std::move(impl)};
}

}  // namespace

// ---------------------------------------------------------------------------

CovMatrix CovMatrix::from_dense(Eigen::MatrixXd sigma) {
  return CovMatrix{factor_dense(std::move(sigma), [] {})};
}

CovMatrix CovMatrix::from_kronecker(double sigma2, Eigen::MatrixXd corr_factor) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ConfigError("Kronecker covariance needs sigma2 > 0");
  }
  check_symmetric(corr_factor);
  auto impl = std::make_shared<KroneckerImpl>();
  impl->sigma2 = sigma2;
  impl->llt.compute(corr_factor);
  if (!cholesky_ok(impl->llt)) {
    throw SingularityError("Kronecker correlation factor is not positive definite");
  }
  impl->corr = std::move(corr_factor);
  return CovMatrix{std::move(impl)};
}

Index CovMatrix::size() const { return impl_->size(); }
CovLayout CovMatrix::layout() const { return impl_->layout(); }
bool CovMatrix::jitter_applied() const { return impl_->jitter() > 0.0; }
double CovMatrix::jitter() const { return impl_->jitter(); }
double CovMatrix::log_det() const { return impl_->log_det(); }
Eigen::MatrixXd CovMatrix::solve(const Eigen::MatrixXd& rhs) const { return impl_->solve(rhs); }
Eigen::MatrixXd CovMatrix::multiply(const Eigen::MatrixXd& rhs) const {
  return impl_->multiply(rhs);
}
Eigen::MatrixXd CovMatrix::apply_factor(const Eigen::MatrixXd& u) const {
  return impl_->apply_factor(u);
}
Eigen::MatrixXd CovMatrix::to_dense() const { return impl_->to_dense(); }
Eigen::VectorXd CovMatrix::diagonal() const { return impl_->diagonal(); }

CovMatrix cov_matrix_1d(const CovParams& theta, const SiteSet& sites) {
  theta.validate();
  require_1d(sites);
  return dense_for_sites(theta, sites, kernels::assemble_exp_1d(theta, sites.coords));
}

CovMatrix cov_matrix_1d_markov(const CovParams& theta, const SiteSet& sites) {
  theta.validate();
  require_1d(sites);
  const Index n = sites.size();
  auto impl = std::make_shared<MarkovImpl>();
  impl->theta = theta;
  impl->coords = sites.coords;
  impl->order.resize(n);
  std::iota(impl->order.begin(), impl->order.end(), 0);
  std::stable_sort(impl->order.begin(), impl->order.end(),
                   [&](Index a, Index b) { return sites.coords(a, 0) < sites.coords(b, 0); });

  impl->rho.resize(std::max<Index>(n - 1, 0));
  impl->one_minus_rho2.resize(std::max<Index>(n - 1, 0));
  for (Index r = 0; r + 1 < n; ++r) {
    const double gap = sites.coords(impl->order[r + 1], 0) - sites.coords(impl->order[r], 0);
    if (!(gap > 0.0)) {
      throw SingularityError("sites " + std::to_string(impl->order[r]) + " and " +
                             std::to_string(impl->order[r + 1]) +
                             " coincide; the tridiagonal layout needs distinct sites");
    }
    impl->rho(r) = std::exp(-theta.kappa * gap);
    impl->one_minus_rho2(r) = -std::expm1(-2.0 * theta.kappa * gap);
  }

  // Precision of the unit-variance exponential kernel in sorted order.
  impl->q_diag.setZero(n);
  impl->q_off.resize(std::max<Index>(n - 1, 0));
  if (n == 1) impl->q_diag(0) = 1.0;
  for (Index r = 0; r + 1 < n; ++r) {
    const double c = 1.0 / impl->one_minus_rho2(r);
    impl->q_off(r) = -impl->rho(r) * c;
    impl->q_diag(r) += (r == 0 ? c : impl->rho(r) * impl->rho(r) * c);
    impl->q_diag(r + 1) += c;
  }
  auto qf = Tridiag::factor(impl->q_diag, impl->q_off);
  if (!qf) throw SingularityError("exponential correlation precision is not positive definite");
  impl->q_factor = std::move(*qf);

  const double logdet_r = impl->one_minus_rho2.array().log().sum();
  if (theta.v2 > 0.0) {
    Eigen::VectorXd t_diag = theta.v2 * impl->q_diag;
    t_diag.array() += theta.sigma2;
    Eigen::VectorXd t_off = theta.v2 * impl->q_off;
    impl->t_factor = Tridiag::factor(t_diag, t_off);
    if (!impl->t_factor) throw SingularityError("nugget system is not positive definite");
    impl->logdet = logdet_r + impl->t_factor->log_det();
  } else {
    impl->logdet = logdet_r + static_cast<double>(n) * std::log(theta.sigma2);
  }
  return CovMatrix{std::move(impl)};
}

Eigen::MatrixXd lattice_corr_factor(double kappa, Index m, double spacing) {
  const double rho = std::exp(-kappa * spacing);
  Eigen::MatrixXd b(m, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < m; ++i) b(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
  return b;
}

CovMatrix cov_matrix_2d_mult(const CovParams& theta, const SiteSet& grid, bool kronecker) {
  theta.validate();
  if (grid.dim != 2 || grid.coords.cols() != 2) throw ConfigError("expected two-dimensional sites");
  if (grid.size() == 0) throw ConfigError("site set is empty");
  if (kronecker) {
    if (!grid.is_lattice()) {
      const Index n = grid.size();
      const auto m = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
      if (m * m != n) {
        throw ConfigError("Kronecker layout requested but n = " + std::to_string(n) +
                          " is not a perfect square");
      }
      throw ConfigError("Kronecker layout requested but the sites are not a full lattice");
    }
    if (theta.v2 > 0.0) {
      throw ConfigError("Kronecker layout requested with a positive nugget v2; use the dense layout");
    }
    const Index m = *grid.side;
    return CovMatrix::from_kronecker(theta.sigma2,
                                     lattice_corr_factor(theta.kappa, m, grid.lattice_spacing()));
  }
  return dense_for_sites(theta, grid, kernels::assemble_exp_2d(theta, grid.coords));
}

CovMatrix make_covariance(const CovParams& theta, const SiteSet& sites, CovBackend backend) {
  if (sites.dim == 1) {
    if (backend == CovBackend::automatic && sites.size() > 1) {
      theta.validate();
      require_1d(sites);
      if (!find_duplicate(sites)) return cov_matrix_1d_markov(theta, sites);
    }
    return cov_matrix_1d(theta, sites);
  }
  const bool kron = backend == CovBackend::automatic && sites.is_lattice() && theta.v2 == 0.0;
  return cov_matrix_2d_mult(theta, sites, kron);
}

EigenBounds eigen_bound_diagnostic(std::span<const CovParams> theta_grid,
                                   const CovParams& theta0, const SiteSet& sites) {
  if (theta_grid.empty()) throw ConfigError("eigenvalue diagnostic needs a nonempty theta grid");
  const Eigen::MatrixXd sigma0 = make_covariance(theta0, sites, CovBackend::dense).to_dense();

  const auto count = static_cast<Index>(theta_grid.size());
  std::vector<double> lo(count), hi(count);
  std::vector<std::string> failures(count);
#pragma omp parallel for schedule(dynamic)
  for (Index g = 0; g < count; ++g) {
    try {
      const Eigen::MatrixXd sigma =
          make_covariance(theta_grid[g], sites, CovBackend::dense).to_dense();
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma0, sigma,
                                                                    Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success) throw SingularityError("generalized eigensolver failed");
      lo[g] = es.eigenvalues().minCoeff();
      hi[g] = es.eigenvalues().maxCoeff();
    } catch (const std::exception& e) {
      failures[g] = e.what();
    }
  }

  EigenBounds out;
  out.min_lambda_min = std::numeric_limits<double>::infinity();
  out.max_lambda_max = -std::numeric_limits<double>::infinity();
  for (Index g = 0; g < count; ++g) {
    if (!failures[g].empty()) {
      throw SingularityError("factorization failed at theta " + to_string(theta_grid[g]) + ": " +
                             failures[g]);
    }
    if (lo[g] < out.min_lambda_min) {
      out.min_lambda_min = lo[g];
      out.argmin_theta = theta_grid[g];
    }
    if (hi[g] > out.max_lambda_max) {
      out.max_lambda_max = hi[g];
      out.argmax_theta = theta_grid[g];
    }
  }
  return out;
}

std::vector<CovParams> theta_lattice(const ThetaBox& box, int per_axis) {
  box.validate();
  if (per_axis < 1) throw ConfigError("theta lattice needs at least one point per axis");
  auto axis = [&](const Interval& iv) {
    std::vector<double> v;
    if (iv.degenerate() || per_axis == 1) {
      v.push_back(iv.degenerate() ? iv.lo : 0.5 * (iv.lo + iv.hi));
      return v;
    }
    for (int k = 0; k < per_axis; ++k) {
      v.push_back(iv.lo + (iv.hi - iv.lo) * k / (per_axis - 1));
    }
    return v;
  };
  std::vector<CovParams> out;
  for (double v2 : axis(box.v2))
    for (double s2 : axis(box.sigma2))
      for (double k : axis(box.kappa)) out.push_back({v2, s2, k});
  return out;
}

}  // namespace geogic
