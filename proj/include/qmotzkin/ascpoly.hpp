#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "qmotzkin/quadrature.hpp"
#include "qmotzkin/qspecial.hpp"

namespace qmotzkin::ascpoly {

using qspecial::Complex;
using qspecial::QBase;

// Al-Salam-Chihara parameters. a and b are both real or complex conjugates,
// with |ab| < 1.
struct AscParams {
  Complex a;
  Complex b;
  QBase q{0.0};

  AscParams(Complex a_, Complex b_, QBase q_);

  double sum_ab() const { return (a + b).real(); }
  double prod_ab() const { return (a * b).real(); }
  bool inside_unit_disc() const;
};

// Interval [A, B] carrying the orthogonality measure of the path polynomials.
struct SupportInterval {
  double A;
  double B;
};

// Parameters (q, sigma, rho0, rho1) of the q-weighted Motzkin model.
struct QModelParams {
  double q = 0.0;
  double sigma = 1.0;
  double rho0 = 0.0;
  double rho1 = 0.0;

  // Throws DomainError unless q in [0,1), sigma in (0,1], rho0, rho1 in [0,1).
  void validate() const;
  // a = -q(sigma + i sqrt(1-sigma^2)), b = conj(a).
  AscParams to_asc() const;
  SupportInterval support() const;
};

// Value mantissa * exp(log_scale), used where plain doubles would overflow.
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;

  double value() const;
  double log_abs() const;
};

inline constexpr std::size_t kMaxDegree = 100000;

// Q_n(x; a, b | q) by the three-term recurrence. OverflowError for n beyond
// kMaxDegree or when the value leaves the double range.
double asc_eval(std::size_t n, double x, const AscParams& p);

// Q_n(x) / (q;q)_n in scaled form, stable for large n and q close to 1.
ScaledValue asc_eval_normalized_scaled(std::size_t n, double x,
                                       const AscParams& p);

// Q_n(1) / (q;q)_n from the convolution sum over (a;q)_k (b;q)_{n-k}.
double asc_at_one(std::size_t n, const AscParams& p);

// Orthogonality density g on (-1, 1). Requires |a|, |b| < 1.
double asc_density(double x, const AscParams& p,
                   const qspecial::TruncationPolicy& policy = {});

// g(cos theta) sin theta, smooth on [0, pi].
double asc_density_theta(double theta, const AscParams& p,
                         const qspecial::TruncationPolicy& policy = {});

// Integral of f(x) g(x) dx over [-1, 1], computed in theta = acos x.
quad::Result integrate_asc(const std::function<double(double)>& f,
                           const AscParams& p, const quad::Policy& policy = {});

// Integral of f(y) nu(dy) where nu is the orthogonality measure of the path
// polynomials on [A, B]; optionally restricted to y in [y_lo, y_hi].
quad::Result integrate_nu(const std::function<double(double)>& f,
                          const QModelParams& m, const quad::Policy& policy = {},
                          double y_lo = -std::numeric_limits<double>::infinity(),
                          double y_hi = std::numeric_limits<double>::infinity());

// s_n: the convolution sum of (a;q)_k (b;q)_{n-k} / ((q;q)_k (q;q)_{n-k})
// for the model's (a, b). Throws NumericGuard if the imaginary residue
// exceeds 1e-9.
double s_value(std::size_t n, const QModelParams& m);

// s_0..s_n in one pass.
std::vector<double> s_values(std::size_t n, const QModelParams& m);

// p_n(x) from x p_n = [n+2] p_{n+1} + 2 sigma [n+1] p_n + [n] p_{n-1}.
double motzkin_poly_eval(std::size_t n, double x, const QModelParams& m);

// p_0(x)..p_n(x).
std::vector<double> motzkin_poly_all(std::size_t n, double x,
                                     const QModelParams& m);

// pi_n = p_n(B) = s_n / [n+1]_q and pi~_n = [n+1]_q pi_n = s_n.
double pi_value(std::size_t n, const QModelParams& m);
double pi_tilde_value(std::size_t n, const QModelParams& m);

// (1/M) Q_M(1 - u^2 / (2 M^2)).
double asc_endpoint_limit_fixed_q(std::size_t M, double u, const AscParams& p);
// (sin u / u) (a, b; q)_inf / (q; q)_inf.
double asc_endpoint_limit_fixed_q_target(double u, const AscParams& p);

// With q = e^{-2/M}, a = -q e^{i alpha}, b = conj(a), sigma = cos alpha and
// m = floor(M x) + floor(M log(M sqrt(2(1+sigma)))), returns
// (q;q)^2_inf / (M (a,b;q)_inf) * Q_m(cos(u/M)) / (q;q)_m.
// DomainError if m < 0.
double asc_endpoint_limit_q_to_1(std::size_t M, double u, double x,
                                 double sigma);
// K_{i|u|}(e^{-x}).
double asc_endpoint_limit_q_to_1_target(double u, double x);

// Degree index m used by asc_endpoint_limit_q_to_1.
long long endpoint_degree_q_to_1(std::size_t M, double x, double sigma);

}  // namespace qmotzkin::ascpoly
