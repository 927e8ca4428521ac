#include "qmotzkin/ascpoly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qmotzkin/errors.hpp"

namespace qmotzkin::ascpoly {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRescaleHi = 1e150;
constexpr double kRescaleLo = 1e-150;
constexpr double kImagGuard = 1e-9;
constexpr double kImagDiscard = 1e-12;

void check_degree(std::size_t n) {
  if (n > kMaxDegree) {
    throw OverflowError("polynomial degree " + std::to_string(n) +
                        " exceeds the cap of " + std::to_string(kMaxDegree));
  }
}

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw OverflowError(std::string(what) + ": value overflowed");
  return v;
}

// Products entering the density, fixed per parameter set.
class DensityContext {
 public:
  DensityContext(const AscParams& p, const qspecial::TruncationPolicy& policy)
      : p_(p), policy_(policy) {
    if (!p.inside_unit_disc()) {
      throw DomainError("asc density requires |a| < 1 and |b| < 1");
    }
    const double q = p.q.value();
    prefactor_ = 2.0 / kPi *
                 qspecial::qpoch_infinite(q, p.q, policy).real() *
                 qspecial::qpoch_infinite(p.prod_ab(), p.q, policy).real();
    scale_ = std::max({1.0, std::abs(p.a), std::abs(p.b)}) / (1.0 - q);
  }

  // g(cos theta) sin theta.
  double weight(double theta) const {
    const double q = p_.q.value();
    const Complex e1 = std::polar(1.0, theta);
    const Complex e2 = e1 * e1;
    Complex num = 1.0;
    Complex den = 1.0;
    double qk = 1.0;
    for (std::size_t k = 0;; ++k) {
      if (qk * scale_ < policy_.rel_tol || k >= policy_.max_terms) break;
      num *= 1.0 - qk * q * e2;
      den *= (1.0 - p_.a * qk * e1) * (1.0 - p_.b * qk * e1);
      qk *= q;
    }
    const double s = std::sin(theta);
    return prefactor_ * s * s * std::norm(num) / std::norm(den);
  }

 private:
  AscParams p_;
  qspecial::TruncationPolicy policy_;
  double prefactor_ = 0.0;
  double scale_ = 1.0;
};

// (a;q)_k / (q;q)_k for k = 0..n.
std::vector<Complex> normalized_pochhammers(Complex a, double q, std::size_t n) {
  std::vector<Complex> out(n + 1);
  out[0] = 1.0;
  double qk = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    // factor (1 - a q^{k-1}) / (1 - q^k)
    const double qk1 = qk * q;
    out[k] = out[k - 1] * (1.0 - a * qk) / (1.0 - qk1);
    qk = qk1;
  }
  return out;
}

double real_with_guard(Complex z, const char* what) {
  const double scale = std::max(1.0, std::abs(z.real()));
  if (std::abs(z.imag()) > kImagGuard * scale) {
    throw AccuracyLoss(std::string(what) + ": imaginary residue " +
                       std::to_string(z.imag()) + " exceeds guard");
  }
  return z.real();
}

}  // namespace

AscParams::AscParams(Complex a_, Complex b_, QBase q_) : a(a_), b(b_), q(q_) {
  const double tol = 1e-13 * std::max({1.0, std::abs(a), std::abs(b)});
  const bool both_real = std::abs(a.imag()) <= tol && std::abs(b.imag()) <= tol;
  const bool conjugate = std::abs(a - std::conj(b)) <= tol;
  if (!both_real && !conjugate) {
    throw DomainError("AscParams: a and b must be real or complex conjugates");
  }
  if (!(std::abs(a * b) < 1.0)) throw DomainError("AscParams: |ab| must be < 1");
}

bool AscParams::inside_unit_disc() const {
  return std::abs(a) < 1.0 && std::abs(b) < 1.0;
}

void QModelParams::validate() const {
  if (!(q >= 0.0 && q < 1.0)) throw DomainError("q must lie in [0, 1)");
  if (!(sigma > 0.0 && sigma <= 1.0)) throw DomainError("sigma must lie in (0, 1]");
  if (!(rho0 >= 0.0 && rho0 < 1.0)) throw DomainError("rho0 must lie in [0, 1)");
  if (!(rho1 >= 0.0 && rho1 < 1.0)) throw DomainError("rho1 must lie in [0, 1)");
}

AscParams QModelParams::to_asc() const {
  validate();
  const Complex a = -q * Complex(sigma, std::sqrt(1.0 - sigma * sigma));
  return AscParams(a, std::conj(a), QBase(q));
}

SupportInterval QModelParams::support() const {
  validate();
  return {-2.0 * (1.0 - sigma) / (1.0 - q), 2.0 * (1.0 + sigma) / (1.0 - q)};
}

double ScaledValue::value() const { return mantissa * std::exp(log_scale); }

double ScaledValue::log_abs() const {
  return std::log(std::abs(mantissa)) + log_scale;
}

double asc_eval(std::size_t n, double x, const AscParams& p) {
  check_degree(n);
  const double q = p.q.value();
  const double s = p.sum_ab();
  const double ab = p.prod_ab();
  double prev = 0.0;
  double cur = 1.0;
  double qn = 1.0;  // q^k
  double qn1 = 0.0; // q^{k-1}, unused at k = 0
  for (std::size_t k = 0; k < n; ++k) {
    const double next =
        (k == 0) ? (2.0 * x - s) * cur
                 : (2.0 * x - s * qn) * cur - (1.0 - qn) * (1.0 - ab * qn1) * prev;
    prev = cur;
    cur = next;
    qn1 = qn;
    qn *= q;
  }
  return finite_or_throw(cur, "asc_eval");
}

ScaledValue asc_eval_normalized_scaled(std::size_t n, double x,
                                       const AscParams& p) {
  check_degree(n);
  const double q = p.q.value();
  const double s = p.sum_ab();
  const double ab = p.prod_ab();
  double prev = 0.0;
  double cur = 1.0;
  double log_scale = 0.0;
  double qn = 1.0;
  double qn1 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    // R_{k+1} (1 - q^{k+1}) = (2x - s q^k) R_k - (1 - ab q^{k-1}) R_{k-1}
    const double rhs = (k == 0) ? (2.0 * x - s) * cur
                                : (2.0 * x - s * qn) * cur - (1.0 - ab * qn1) * prev;
    const double next = rhs / (1.0 - qn * q);
    prev = cur;
    cur = next;
    qn1 = qn;
    qn *= q;
    const double mag = std::max(std::abs(cur), std::abs(prev));
    if (mag > kRescaleHi || (mag < kRescaleLo && mag > 0.0)) {
      const double shift = std::log(mag);
      cur /= mag;
      prev /= mag;
      log_scale += shift;
    }
  }
  return {finite_or_throw(cur, "asc_eval_normalized_scaled"), log_scale};
}

double asc_at_one(std::size_t n, const AscParams& p) {
  check_degree(n);
  const double q = p.q.value();
  const auto A = normalized_pochhammers(p.a, q, n);
  const auto B = normalized_pochhammers(p.b, q, n);
  Complex sum = 0.0;
  for (std::size_t k = 0; k <= n; ++k) sum += A[k] * B[n - k];
  return finite_or_throw(real_with_guard(sum, "asc_at_one"), "asc_at_one");
}

double asc_density_theta(double theta, const AscParams& p,
                         const qspecial::TruncationPolicy& policy) {
  return DensityContext(p, policy).weight(theta);
}

double asc_density(double x, const AscParams& p,
                   const qspecial::TruncationPolicy& policy) {
  if (!(std::abs(x) < 1.0)) throw DomainError("asc_density requires |x| < 1");
  const double theta = std::acos(x);
  return DensityContext(p, policy).weight(theta) / std::sin(theta);
}

quad::Result integrate_asc(const std::function<double(double)>& f,
                           const AscParams& p, const quad::Policy& policy) {
  const DensityContext ctx(p, {});
  return quad::integrate(
      [&](double theta) { return f(std::cos(theta)) * ctx.weight(theta); }, 0.0,
      kPi, policy);
}

quad::Result integrate_nu(const std::function<double(double)>& f,
                          const QModelParams& m, const quad::Policy& policy,
                          double y_lo, double y_hi) {
  const AscParams p = m.to_asc();
  const double q = m.q;
  const double sigma = m.sigma;
  auto to_x = [&](double y) {
    if (std::isinf(y)) return y > 0 ? 1.0 : -1.0;
    return std::clamp((1.0 - q) * y / 2.0 - sigma, -1.0, 1.0);
  };
  const double theta_lo = std::acos(to_x(y_hi));
  const double theta_hi = std::acos(to_x(y_lo));
  if (!(theta_hi > theta_lo)) return {};
  const DensityContext ctx(p, {});
  const double scale = 2.0 / (1.0 - q);
  return quad::integrate(
      [&](double theta) {
        const double y = scale * (std::cos(theta) + sigma);
        return f(y) * ctx.weight(theta);
      },
      theta_lo, theta_hi, policy);
}

std::vector<double> s_values(std::size_t n, const QModelParams& m) {
  check_degree(n);
  const AscParams p = m.to_asc();
  const auto A = normalized_pochhammers(p.a, m.q, n);
  std::vector<double> out(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    Complex sum = 0.0;
    for (std::size_t k = 0; k <= j; ++k) sum += A[k] * std::conj(A[j - k]);
    double re = real_with_guard(sum, "s_value");
    if (std::abs(sum.imag()) < kImagDiscard) re = sum.real();
    out[j] = finite_or_throw(re, "s_value");
  }
  return out;
}

double s_value(std::size_t n, const QModelParams& m) {
  return s_values(n, m).back();
}

std::vector<double> motzkin_poly_all(std::size_t n, double x,
                                     const QModelParams& m) {
  check_degree(n);
  m.validate();
  const QBase qb(m.q);
  std::vector<double> p(n + 1);
  p[0] = 1.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a_k = qspecial::q_number(k + 2, qb);
    const double b_k = 2.0 * m.sigma * qspecial::q_number(k + 1, qb);
    const double c_k = qspecial::q_number(k, qb);
    p[k + 1] = ((x - b_k) * p[k] - c_k * prev) / a_k;
    prev = p[k];
    finite_or_throw(p[k + 1], "motzkin_poly_eval");
  }
  return p;
}

double motzkin_poly_eval(std::size_t n, double x, const QModelParams& m) {
  return motzkin_poly_all(n, x, m).back();
}

double pi_tilde_value(std::size_t n, const QModelParams& m) {
  return s_value(n, m);
}

double pi_value(std::size_t n, const QModelParams& m) {
  return s_value(n, m) / qspecial::q_number(n + 1, QBase(m.q));
}

double asc_endpoint_limit_fixed_q(std::size_t M, double u, const AscParams& p) {
  if (M == 0) throw DomainError("M must be positive");
  const double Md = static_cast<double>(M);
  return asc_eval(M, 1.0 - u * u / (2.0 * Md * Md), p) / Md;
}

double asc_endpoint_limit_fixed_q_target(double u, const AscParams& p) {
  const double sinc = (u == 0.0) ? 1.0 : std::sin(u) / u;
  const Complex ab = qspecial::qpoch_infinite(p.a, p.q) *
                     qspecial::qpoch_infinite(p.b, p.q);
  return sinc * ab.real() / qspecial::qpoch_infinite(p.q.value(), p.q).real();
}

long long endpoint_degree_q_to_1(std::size_t M, double x, double sigma) {
  const double Md = static_cast<double>(M);
  return static_cast<long long>(std::floor(Md * x)) +
         static_cast<long long>(
             std::floor(Md * std::log(Md * std::sqrt(2.0 * (1.0 + sigma)))));
}

double asc_endpoint_limit_q_to_1(std::size_t M, double u, double x,
                                 double sigma) {
  if (M == 0) throw DomainError("M must be positive");
  if (!(sigma > 0.0 && sigma <= 1.0)) throw DomainError("sigma must lie in (0, 1]");
  const long long m = endpoint_degree_q_to_1(M, x, sigma);
  if (m < 0) {
    throw DomainError("degree index m = " + std::to_string(m) +
                      " is negative; x too small for this M");
  }
  const double Md = static_cast<double>(M);
  const double q = std::exp(-2.0 / Md);
  const QBase qb(q);
  const double alpha = std::acos(sigma);
  const Complex a = -q * std::polar(1.0, alpha);
  const AscParams p(a, std::conj(a), qb);
  const ScaledValue r =
      asc_eval_normalized_scaled(static_cast<std::size_t>(m), std::cos(u / Md), p);
  if (r.mantissa == 0.0) return 0.0;
  // (a;q)(b;q) = |(a;q)|^2 for conjugate a, b.
  const double log_qq = qspecial::log_qpoch_infinite(q, qb).real();
  const double log_ab = 2.0 * qspecial::log_qpoch_infinite(a, qb).real();
  const double log_val = 2.0 * log_qq - std::log(Md) - log_ab + r.log_abs();
  return std::copysign(std::exp(log_val), r.mantissa);
}

double asc_endpoint_limit_q_to_1_target(double u, double x) {
  return qspecial::bessel_k_imag(std::abs(u), std::exp(-x));
}

}  // namespace qmotzkin::ascpoly
