#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qmotzkin::qspecial {

using Complex = std::complex<double>;

// Base of a q-deformation; 0 <= q < 1.
class QBase {
 public:
  explicit QBase(double q);
  double value() const { return q_; }
  operator double() const { return q_; }

 private:
  double q_;
};

struct TruncationPolicy {
  double rel_tol = 1e-15;
  std::size_t max_terms = 10'000'000;

  // Throws DomainError unless rel_tol in (0, 1) and max_terms >= 1.
  void validate() const;
};

// [n]_q = 1 + q + ... + q^{n-1}.
double q_number(std::size_t n, QBase q);

// (a;q)_n.
Complex qpoch_finite(Complex a, QBase q, std::size_t n);
double qpoch_finite(double a, QBase q, std::size_t n);

// (a;q)_inf, truncated once |a| q^k / (1-q) < rel_tol. Throws
// ConvergenceError if that needs more than max_terms factors.
Complex qpoch_infinite(Complex a, QBase q, const TruncationPolicy& policy = {});

// Sum of principal logs of the factors of (a;q)_inf. The real part is
// log|(a;q)_inf|; the imaginary part is an argument (not reduced mod 2pi).
// Throws DomainError when a factor vanishes.
Complex log_qpoch_infinite(Complex a, QBase q,
                           const TruncationPolicy& policy = {});

// Gamma_q(z) = (1-q)^{1-z} (q;q)_inf / (q^z;q)_inf. Poles at z = 0, -1, ...
// (within 1e-12) raise DomainError. At q = 0 the value is 1 for Re z > 0.
Complex q_gamma(Complex z, QBase q, const TruncationPolicy& policy = {});
Complex log_q_gamma(Complex z, QBase q, const TruncationPolicy& policy = {});

// (z;q)_inf / (z q^lambda;q)_inf, which tends to (1-z)^lambda as q -> 1.
// Real z >= 1 is rejected.
Complex ramanujan_ratio(Complex z, Complex lambda, QBase q,
                        const TruncationPolicy& policy = {});

// Jacobi theta functions with nome e^{i pi tau}; Im tau > 0.
Complex theta1(Complex v, Complex tau, const TruncationPolicy& policy = {});
Complex theta4(Complex v, Complex tau, const TruncationPolicy& policy = {});

// |Gamma(iu)|^2 = pi / (u sinh(pi u)). Pole at u = 0.
double gamma_abs_imag_sq(double u);
// 1/|Gamma(iu)|^2 = u sinh(pi u) / pi, continuous with value 0 at u = 0.
double inv_gamma_abs_imag_sq(double u);

struct BesselPolicy {
  double rel_tol = 1e-12;
  std::size_t max_nodes = std::size_t{1} << 15;
};

// K_{iu}(x) = int_0^inf exp(-x cosh t) cos(u t) dt for x > 0.
// The integral is cut where x cosh t reaches 745 (exp underflow).
// x <= 0 raises DomainError, x < 1e-12 raises AccuracyLoss.
double bessel_k_imag(double u, double x, const BesselPolicy& policy = {});

// Same as bessel_k_imag for every entry of u, on one shared t-grid refined
// until all entries have converged.
std::vector<double> bessel_k_imag_many(std::span<const double> u, double x,
                                       const BesselPolicy& policy = {});

}  // namespace qmotzkin::qspecial
