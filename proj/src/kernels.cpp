#include "qmotzkin/kernels.hpp"

#include <cmath>
#include <iomanip>
#include <memory>
#include <numbers>
#include <span>
#include <sstream>
#include <tuple>

#include "qmotzkin/chains.hpp"
#include "qmotzkin/errors.hpp"
#include "qmotzkin/qspecial.hpp"

namespace qmotzkin::kernels {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSmallArgument = 1e-8;
constexpr double kLargeArgument = 600.0;
constexpr std::size_t kGridCacheLimit = 64;
constexpr std::size_t kRowCacheLimit = 4096;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be positive");
  }
}

double rel_err(double lhs, double rhs) {
  return rhs == 0.0 ? std::abs(lhs) : std::abs(lhs - rhs) / std::abs(rhs);
}

LimitResult make_result(double lhs, double rhs) { return {lhs, rhs, rel_err(lhs, rhs)}; }

std::shared_ptr<const YakubovichGrid> shared_grid(double u_max, std::size_t panels) {
  static std::mutex mutex;
  static std::map<std::pair<double, std::size_t>, std::shared_ptr<const YakubovichGrid>> grids;
  const std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(u_max, panels);
  const auto it = grids.find(key);
  if (it != grids.end()) return it->second;
  if (grids.size() >= kGridCacheLimit) grids.clear();
  auto grid = std::make_shared<const YakubovichGrid>(u_max, panels);
  grids.emplace(key, grid);
  return grid;
}

QModelParams with_q_rho(QModelParams p, double q, double rho0) {
  p.q = q;
  p.rho0 = rho0;
  p.validate();
  return p;
}

QModelParams q_to_1_params(std::size_t N, double sigma, double rho0) {
  QModelParams p;
  p.q = std::exp(-2.0 / std::sqrt(static_cast<double>(N)));
  p.sigma = sigma;
  p.rho0 = rho0;
  p.validate();
  return p;
}

// Point probability P(X_k = n | X_0 = m) by tridiagonal iteration.
double kstep_point(const QModelParams& p, std::size_t m, std::size_t n, std::size_t k) {
  if (n > m + k) return 0.0;
  const chains::ChainSpec spec(p, m + k + 2);
  const auto dist = chains::kstep_distribution(chains::Distribution::point(m), k, spec, m + k);
  return dist.at(static_cast<long long>(n));
}

// P(X_0 = n) under the initial law with the model's rho0.
double initial_point(const QModelParams& p, std::size_t n) {
  const double scale = 1.0 / std::max(1e-300, -std::log(p.rho0));
  const auto height = static_cast<std::size_t>(60.0 * scale) + n + 64;
  const chains::ChainSpec spec(p, height);
  return chains::initial_law(chains::Which::X, spec).at(static_cast<long long>(n));
}

std::size_t checked_index(long long j, const char* what) {
  if (j < 0) throw DomainError(std::string(what) + " maps to a negative state");
  return static_cast<std::size_t>(j);
}

}  // namespace

double killed_bm_kernel(double t, double x, double y) {
  require_positive(t, "t");
  require_positive(x, "x");
  require_positive(y, "y");
  const double d = y - x;
  return std::exp(-d * d / (2.0 * t)) * -std::expm1(-2.0 * x * y / t) /
         std::sqrt(2.0 * kPi * t);
}

double bessel3d_transition(const KernelQuery& q) {
  require_positive(q.sigma, "sigma");
  return q.y / q.x * killed_bm_kernel(q.t / (1.0 + q.sigma), q.x, q.y);
}

double xi0_density(double x, double c) {
  require_positive(c, "c");
  return x > 0.0 ? c * c * x * std::exp(-c * x) : 0.0;
}

double bessel_k0(double s) {
  require_positive(s, "s");
  if (s < kSmallArgument) return -std::log(s / 2.0) - std::numbers::egamma;
  return qspecial::bessel_k_imag(0.0, s);
}

double log_bessel_k0(double s) {
  require_positive(s, "s");
  if (s < kLargeArgument) return std::log(bessel_k0(s));
  // Hankel expansion: K_0(s) ~ sqrt(pi/2s) e^{-s} sum_k (-1)^k ((2k-1)!!)^2 / (k! (8s)^k).
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 12; ++k) {
    term *= -(2.0 * k - 1.0) * (2.0 * k - 1.0) / (k * 8.0 * s);
    sum += term;
  }
  return 0.5 * std::log(kPi / (2.0 * s)) - s + std::log(sum);
}

bool bessel_accuracy_warning(double x) { return std::exp(-x) < kSmallArgument; }

YakubovichGrid::YakubovichGrid(double u_max, std::size_t panels) : u_max_(u_max) {
  require_positive(u_max, "u_max");
  if (panels == 0) throw DomainError("panels must be positive");
  quad::composite_nodes(0.0, u_max, panels, nodes_, weights_);
  spectral_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    spectral_[i] = 2.0 / kPi * weights_[i] * qspecial::inv_gamma_abs_imag_sq(nodes_[i]);
  }
}

const std::vector<double>& YakubovichGrid::bessel_row(double x) const {
  {
    const std::lock_guard<std::mutex> lock(mutex_);
    const auto it = cache_.find(x);
    if (it != cache_.end()) return it->second;
  }
  auto row = qspecial::bessel_k_imag_many(std::span<const double>(nodes_), std::exp(-x));
  const std::lock_guard<std::mutex> lock(mutex_);
  if (cache_.size() >= kRowCacheLimit) cache_.clear();
  return cache_.emplace(x, std::move(row)).first->second;
}

double YakubovichGrid::kernel(double t, double x, double y, double* abs_sum) const {
  require_positive(t, "t");
  const std::vector<double> kx = bessel_row(x);
  const std::vector<double> ky = bessel_row(y);
  double s = 0.0;
  double a = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double u = nodes_[i];
    const double v = spectral_[i] * std::exp(-t * u * u / 2.0) * kx[i] * ky[i];
    s += v;
    a += std::abs(v);
  }
  if (abs_sum) *abs_sum = a;
  return s;
}

constexpr double kBesselNoise = 1e-10;

double yakubovich_cutoff(double t) {
  require_positive(t, "t");
  return std::max(std::sqrt(80.0 / t), 10.0);
}

double yakubovich_kernel(const KernelQuery& q, const quad::Policy& quad_policy) {
  const double U = yakubovich_cutoff(q.t);
  const std::size_t per_panel = quad::rule16().nodes.size();
  std::size_t panels = std::max<std::size_t>(quad_policy.initial_panels, 1);
  double prev = shared_grid(U, panels)->kernel(q.t, q.x, q.y);
  for (;;) {
    panels *= 2;
    if (panels * per_panel > quad_policy.max_nodes) {
      throw ConvergenceError("yakubovich_kernel: quadrature did not converge");
    }
    double abs_sum = 0.0;
    const double cur = shared_grid(U, panels)->kernel(q.t, q.x, q.y, &abs_sum);
    if (!std::isfinite(cur)) throw ConvergenceError("yakubovich_kernel: non-finite value");
    // Tolerance floor set by the accuracy of the Bessel values.
    const double tol = std::max(quad_policy.rel_tol, kBesselNoise) * abs_sum;
    if (std::abs(cur - prev) <= tol) return std::max(cur, 0.0);
    prev = cur;
  }
}

double zeta_transition(const KernelQuery& q, const quad::Policy& quad_policy) {
  require_positive(q.sigma, "sigma");
  KernelQuery dilated = q;
  dilated.t = q.t / (1.0 + q.sigma);
  const double p = yakubovich_kernel(dilated, quad_policy);
  if (p == 0.0) return 0.0;
  return std::exp(log_bessel_k0(std::exp(-q.y)) - log_bessel_k0(std::exp(-q.x))) * p;
}

double zeta0_density(double x, double c) {
  require_positive(c, "c");
  const double log_norm = std::log(4.0) - c * std::log(2.0) - 2.0 * std::lgamma(c / 2.0);
  return std::exp(log_norm - c * x) * bessel_k0(std::exp(-x));
}

IndexMap::IndexMap(std::size_t N_, double sigma_) : N(N_), sigma(sigma_) {
  if (N == 0) throw DomainError("N must be at least 1");
  require_positive(sigma, "sigma");
}

long long IndexMap::centering() const {
  const double rn = std::sqrt(static_cast<double>(N));
  return static_cast<long long>(
      std::floor(rn * std::log(std::sqrt(2.0 * static_cast<double>(N) * (1.0 + sigma)))));
}

long long IndexMap::operator()(double z) const {
  const double rn = std::sqrt(static_cast<double>(N));
  return static_cast<long long>(std::floor(z * rn)) + centering();
}

LimitResult local_limit_error_fixed_q(std::size_t N, double t, double x, double y,
                                      const QModelParams& model) {
  require_positive(t, "t");
  require_positive(x, "x");
  require_positive(y, "y");
  if (N == 0) throw DomainError("N must be at least 1");
  model.validate();
  const double rn = std::sqrt(static_cast<double>(N));
  const auto m = static_cast<std::size_t>(std::floor(x * rn));
  const auto n = static_cast<std::size_t>(std::floor(y * rn));
  const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(N) * t));
  const double lhs = rn * kstep_point(model, m, n, k);
  const double rhs = bessel3d_transition({t, x, y, model.sigma});
  return make_result(lhs, rhs);
}

LimitResult initial_limit_fixed_q(std::size_t N, double x, double c,
                                  const QModelParams& model) {
  require_positive(x, "x");
  require_positive(c, "c");
  if (N == 0) throw DomainError("N must be at least 1");
  const double rn = std::sqrt(static_cast<double>(N));
  const auto p = with_q_rho(model, model.q, std::exp(-c / rn));
  const auto m = static_cast<std::size_t>(std::floor(x * rn));
  return make_result(rn * initial_point(p, m), xi0_density(x, c));
}

LimitResult local_limit_error_q_to_1(std::size_t N, double t, double x, double y,
                                     double sigma) {
  require_positive(t, "t");
  const IndexMap J(N, sigma);
  const auto p = q_to_1_params(N, sigma, 0.0);
  const std::size_t m = checked_index(J(x), "x");
  const std::size_t n = checked_index(J(y), "y");
  const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(N) * t));
  const double lhs = std::sqrt(static_cast<double>(N)) * kstep_point(p, m, n, k);
  const double rhs = zeta_transition({t, x, y, sigma});
  return make_result(lhs, rhs);
}

LimitResult initial_limit_q_to_1(std::size_t N, double x, double c, double sigma) {
  require_positive(c, "c");
  const IndexMap J(N, sigma);
  const double rn = std::sqrt(static_cast<double>(N));
  const auto p = q_to_1_params(N, sigma, std::exp(-c / rn));
  const std::size_t m = checked_index(J(x), "x");
  return make_result(rn * initial_point(p, m), zeta0_density(x, c));
}

LimitResult joint_mass_fixed_q(std::size_t N, double x0, double x1, double c,
                               const QModelParams& model) {
  require_positive(x0, "x0");
  require_positive(x1, "x1");
  require_positive(c, "c");
  if (N == 0) throw DomainError("N must be at least 1");
  const double rn = std::sqrt(static_cast<double>(N));
  const auto p = with_q_rho(model, model.q, std::exp(-c / rn));
  const auto m = static_cast<std::size_t>(std::floor(x0 * rn));
  const auto n = static_cast<std::size_t>(std::floor(x1 * rn));
  const double lhs = static_cast<double>(N) * initial_point(p, m) * kstep_point(p, m, n, N);
  const double rhs = xi0_density(x0, c) * bessel3d_transition({1.0, x0, x1, model.sigma});
  return make_result(lhs, rhs);
}

LimitResult joint_mass_q_to_1(std::size_t N, double x0, double x1, double c,
                              double sigma) {
  require_positive(c, "c");
  const IndexMap J(N, sigma);
  const double rn = std::sqrt(static_cast<double>(N));
  const auto p = q_to_1_params(N, sigma, std::exp(-c / rn));
  const std::size_t m = checked_index(J(x0), "x0");
  const std::size_t n = checked_index(J(x1), "x1");
  const double lhs = static_cast<double>(N) * initial_point(p, m) * kstep_point(p, m, n, N);
  const double rhs = zeta0_density(x0, c) * zeta_transition({1.0, x0, x1, sigma});
  return make_result(lhs, rhs);
}

std::string error_table_csv(const std::vector<ErrorRow>& rows) {
  std::ostringstream os;
  os << "N,t,x,y,lhs,rhs,rel_err\n" << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.N << ',' << r.t << ',' << r.x << ',' << r.y << ',' << r.result.lhs << ','
       << r.result.rhs << ',' << r.result.rel_err << '\n';
  }
  return os.str();
}

}  // namespace qmotzkin::kernels
