#include "qmotzkin/qspecial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qmotzkin/errors.hpp"
#include "qmotzkin/quadrature.hpp"

namespace qmotzkin::qspecial {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleTol = 1e-12;
constexpr double kExpUnderflow = 745.0;
// Beyond this argument K_{iu}(x) is subnormal.
constexpr double kBesselUnderflow = 700.0;

// log(1 + w) without cancellation for small |w|.
Complex clog1p(Complex w) {
  const double re = 0.5 * std::log1p(2.0 * w.real() + std::norm(w));
  const double im = std::atan2(w.imag(), 1.0 + w.real());
  return {re, im};
}

// q^z on the principal branch; q = 0 gives 0 for Re z > 0 and 1 for z = 0.
Complex qpow(double q, Complex z) {
  if (q == 0.0) {
    if (z == Complex(0.0, 0.0)) return 1.0;
    if (z.real() > 0.0) return 0.0;
    throw DomainError("q^z undefined at q = 0 for Re z <= 0");
  }
  return std::exp(z * std::log(q));
}

std::size_t checked_terms(std::size_t k, const TruncationPolicy& policy) {
  if (k >= policy.max_terms) {
    throw ConvergenceError("q-product truncation exceeded max_terms = " +
                           std::to_string(policy.max_terms));
  }
  return k;
}

}  // namespace

QBase::QBase(double q) : q_(q) {
  if (!(q >= 0.0 && q < 1.0)) {
    throw DomainError("q must satisfy 0 <= q < 1, got " + std::to_string(q));
  }
}

void TruncationPolicy::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw DomainError("TruncationPolicy.rel_tol must lie in (0, 1)");
  }
  if (max_terms < 1) throw DomainError("TruncationPolicy.max_terms must be >= 1");
}

double q_number(std::size_t n, QBase q) {
  double sum = 0.0;
  double pw = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum += pw;
    pw *= q;
  }
  return sum;
}

Complex qpoch_finite(Complex a, QBase q, std::size_t n) {
  Complex prod = 1.0;
  Complex term = a;
  for (std::size_t k = 0; k < n; ++k) {
    prod *= 1.0 - term;
    term *= q.value();
  }
  return prod;
}

double qpoch_finite(double a, QBase q, std::size_t n) {
  double prod = 1.0;
  double term = a;
  for (std::size_t k = 0; k < n; ++k) {
    prod *= 1.0 - term;
    term *= q.value();
  }
  return prod;
}

Complex qpoch_infinite(Complex a, QBase q, const TruncationPolicy& policy) {
  policy.validate();
  const double tail_scale = 1.0 / (1.0 - q.value());
  Complex prod = 1.0;
  Complex term = a;
  for (std::size_t k = 0;; ++k) {
    if (std::abs(term) * tail_scale < policy.rel_tol) return prod;
    checked_terms(k, policy);
    prod *= 1.0 - term;
    term *= q.value();
  }
}

Complex log_qpoch_infinite(Complex a, QBase q, const TruncationPolicy& policy) {
  policy.validate();
  const double tail_scale = 1.0 / (1.0 - q.value());
  Complex sum = 0.0;
  Complex term = a;
  for (std::size_t k = 0;; ++k) {
    if (std::abs(term) * tail_scale < policy.rel_tol) return sum;
    checked_terms(k, policy);
    if (term == Complex(1.0, 0.0)) {
      throw DomainError("log of a vanishing q-Pochhammer product");
    }
    sum += clog1p(-term);
    term *= q.value();
  }
}

Complex log_q_gamma(Complex z, QBase q, const TruncationPolicy& policy) {
  const double k = std::round(z.real());
  const bool near_nonpositive_int =
      k <= 0.0 && std::abs(z.real() - k) < kPoleTol;
  if (q.value() == 0.0) {
    if (z.real() <= 0.0) {
      throw DomainError("Gamma_q at q = 0 requires Re z > 0");
    }
    return 0.0;
  }
  if (near_nonpositive_int) {
    // Poles repeat along Im z with period 2 pi / |log q|.
    const double period = 2.0 * kPi / std::abs(std::log(q.value()));
    const double j = std::round(z.imag() / period);
    if (std::abs(z.imag() - j * period) < kPoleTol) {
      throw DomainError("Gamma_q pole at z = " + std::to_string(z.real()));
    }
  }
  const Complex qz = qpow(q.value(), z);
  return (1.0 - z) * std::log1p(-q.value()) +
         log_qpoch_infinite(q.value(), q, policy) -
         log_qpoch_infinite(qz, q, policy);
}

Complex q_gamma(Complex z, QBase q, const TruncationPolicy& policy) {
  return std::exp(log_q_gamma(z, q, policy));
}

Complex ramanujan_ratio(Complex z, Complex lambda, QBase q,
                        const TruncationPolicy& policy) {
  if (z.imag() == 0.0 && z.real() >= 1.0) {
    throw DomainError("ramanujan_ratio requires z outside [1, inf)");
  }
  const Complex shifted = z * qpow(q.value(), lambda);
  return std::exp(log_qpoch_infinite(z, q, policy) -
                  log_qpoch_infinite(shifted, q, policy));
}

namespace {

void check_tau(Complex tau) {
  if (!(tau.imag() > 0.0)) throw DomainError("theta requires Im tau > 0");
}

// Terms are summed until past the peak index n* = |Im v|/Im tau - 1/2 and
// the magnitude bound drops below rel_tol * |sum| (or underflows).
template <class TermFn, class BoundFn>
Complex sum_theta_series(Complex init, std::size_t first, double n_star,
                         TermFn term, BoundFn log_bound,
                         const TruncationPolicy& policy) {
  Complex sum = init;
  for (std::size_t n = first;; ++n) {
    checked_terms(n, policy);
    sum += term(n);
    const double nd = static_cast<double>(n);
    if (nd > n_star + 1.0) {
      const double lb = log_bound(n + 1);
      if (lb < -kExpUnderflow ||
          std::exp(lb) <= policy.rel_tol * std::abs(sum)) {
        return sum;
      }
    }
  }
}

}  // namespace

Complex theta1(Complex v, Complex tau, const TruncationPolicy& policy) {
  check_tau(tau);
  policy.validate();
  const Complex i(0.0, 1.0);
  const double im_tau = tau.imag();
  const double abs_im_v = std::abs(v.imag());
  const double n_star = abs_im_v / im_tau - 0.5;
  auto term = [&](std::size_t n) {
    const double h = static_cast<double>(n) + 0.5;
    const Complex base = i * kPi * tau * h * h;
    const Complex arg = i * (2.0 * h) * kPi * v;
    // 2 sin(w) = -i (e^{iw} - e^{-iw})
    const Complex val = -i * (std::exp(base + arg) - std::exp(base - arg));
    return (n % 2 == 0) ? val : -val;
  };
  auto log_bound = [&](std::size_t n) {
    const double h = static_cast<double>(n) + 0.5;
    return std::log(2.0) - kPi * im_tau * h * h + 2.0 * h * kPi * abs_im_v;
  };
  return sum_theta_series(0.0, 0, n_star, term, log_bound, policy);
}

Complex theta4(Complex v, Complex tau, const TruncationPolicy& policy) {
  check_tau(tau);
  policy.validate();
  const Complex i(0.0, 1.0);
  const double im_tau = tau.imag();
  const double abs_im_v = std::abs(v.imag());
  const double n_star = abs_im_v / im_tau;
  auto term = [&](std::size_t n) {
    const double nd = static_cast<double>(n);
    const Complex base = i * kPi * tau * nd * nd;
    const Complex arg = i * (2.0 * nd) * kPi * v;
    const Complex val = std::exp(base + arg) + std::exp(base - arg);
    return (n % 2 == 0) ? val : -val;
  };
  auto log_bound = [&](std::size_t n) {
    const double nd = static_cast<double>(n);
    return std::log(2.0) - kPi * im_tau * nd * nd + 2.0 * nd * kPi * abs_im_v;
  };
  return sum_theta_series(1.0, 1, n_star, term, log_bound, policy);
}

double gamma_abs_imag_sq(double u) {
  if (u == 0.0) throw DomainError("|Gamma(iu)|^2 has a pole at u = 0");
  const double au = std::abs(u);
  return kPi / (au * std::sinh(kPi * au));
}

double inv_gamma_abs_imag_sq(double u) {
  if (u == 0.0) return 0.0;
  const double au = std::abs(u);
  return au * std::sinh(kPi * au) / kPi;
}

std::vector<double> bessel_k_imag_many(std::span<const double> u, double x,
                                       const BesselPolicy& policy) {
  if (!(x > 0.0)) throw DomainError("bessel_k_imag requires x > 0");
  if (x < 1e-12) {
    throw AccuracyLoss("bessel_k_imag: x below 1e-12, truncation horizon too long");
  }
  std::vector<double> out(u.size(), 0.0);
  if (x >= kBesselUnderflow) return out;
  const double horizon = std::acosh(1.0 + kExpUnderflow / x);

  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> prev(u.size(), 0.0);
  std::vector<double> abs_int(u.size(), 0.0);
  auto evaluate = [&](std::size_t panels) {
    quad::composite_nodes(0.0, horizon, panels, nodes, weights);
    std::fill(out.begin(), out.end(), 0.0);
    std::fill(abs_int.begin(), abs_int.end(), 0.0);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double g = weights[k] * std::exp(-x * (std::cosh(nodes[k]) - 1.0));
      for (std::size_t j = 0; j < u.size(); ++j) {
        const double v = g * std::cos(u[j] * nodes[k]);
        out[j] += v;
        abs_int[j] += std::abs(v);
      }
    }
  };

  std::size_t panels = 4;
  evaluate(panels);
  for (;;) {
    prev = out;
    panels *= 2;
    if (panels * quad::rule16().nodes.size() > policy.max_nodes) {
      throw ConvergenceError("bessel_k_imag: quadrature did not converge");
    }
    evaluate(panels);
    bool done = true;
    for (std::size_t j = 0; j < u.size() && done; ++j) {
      done = std::abs(out[j] - prev[j]) <= policy.rel_tol * abs_int[j];
    }
    if (done) break;
  }
  const double scale = std::exp(-x);
  for (double& v : out) v *= scale;
  return out;
}

double bessel_k_imag(double u, double x, const BesselPolicy& policy) {
  const double uu[1] = {u};
  return bessel_k_imag_many(std::span<const double>(uu, 1), x, policy)[0];
}

}  // namespace qmotzkin::qspecial
