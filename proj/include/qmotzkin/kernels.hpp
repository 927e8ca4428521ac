#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "qmotzkin/ascpoly.hpp"
#include "qmotzkin/quadrature.hpp"

namespace qmotzkin::kernels {

using ascpoly::QModelParams;

// Arguments of the limit transition kernels. sigma enters as the time
// dilation t / (1 + sigma).
struct KernelQuery {
  double t = 1.0;
  double x = 0.0;
  double y = 0.0;
  double sigma = 1.0;
};

// q_t(x, y) = (2 pi t)^{-1/2} (e^{-(y-x)^2/2t} - e^{-(y+x)^2/2t}).
// DomainError unless t, x, y > 0.
double killed_bm_kernel(double t, double x, double y);

// (y/x) q_{t/(1+sigma)}(x, y).
double bessel3d_transition(const KernelQuery& q);

// c^2 x e^{-cx} on x > 0, zero elsewhere. DomainError unless c > 0.
double xi0_density(double x, double c);

// K_0(s) for s > 0, switching to -log(s/2) - euler_gamma below 1e-8.
double bessel_k0(double s);

// log K_0(s), using the large-argument expansion where K_0 underflows.
double log_bessel_k0(double s);

// True when e^{-x} is small enough that K_{iu}(e^{-x}) loses accuracy.
bool bessel_accuracy_warning(double x);

// Values K_{iu}(e^{-x}) on composite Gauss-Legendre nodes over [0, u_max],
// cached per x.
class YakubovichGrid {
 public:
  YakubovichGrid(double u_max, std::size_t panels);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  double u_max() const { return u_max_; }

  const std::vector<double>& bessel_row(double x) const;

  // (2/pi) sum_i w_i e^{-t u_i^2/2} K_{iu_i}(e^{-x}) K_{iu_i}(e^{-y}) u_i sinh(pi u_i)/pi,
  // also returning the same sum of absolute values.
  double kernel(double t, double x, double y, double* abs_sum = nullptr) const;

 private:
  double u_max_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> spectral_;  // (2/pi) w_i u_i sinh(pi u_i) / pi
  mutable std::mutex mutex_;
  mutable std::map<double, std::vector<double>> cache_;
};

// Upper limit max(sqrt(80/t), 10) of the u-integral.
double yakubovich_cutoff(double t);

// p_t(x, y) by panel doubling on [0, yakubovich_cutoff(t)].
// ConvergenceError past quad_policy.max_nodes.
double yakubovich_kernel(const KernelQuery& q, const quad::Policy& quad_policy = {});

// [K_0(e^{-y}) / K_0(e^{-x})] p_{t/(1+sigma)}(x, y).
double zeta_transition(const KernelQuery& q, const quad::Policy& quad_policy = {});

// 4 / (2^c Gamma(c/2)^2) e^{-cx} K_0(e^{-x}).
double zeta0_density(double x, double c);

// J_z^N = floor(z sqrt N) + floor(sqrt N log sqrt(2 N (1 + sigma))).
struct IndexMap {
  std::size_t N = 1;
  double sigma = 1.0;

  IndexMap(std::size_t N_, double sigma_);
  long long centering() const;
  long long operator()(double z) const;
};

struct LimitResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
};

// sqrt(N) P(X_{floor(Nt)} = floor(y sqrt N) | X_0 = floor(x sqrt N)) against
// (y/x) q_{t/(1+sigma)}(x, y).
LimitResult local_limit_error_fixed_q(std::size_t N, double t, double x, double y,
                                      const QModelParams& model);

// sqrt(N) P(X_0 = floor(x sqrt N)) with rho0 = e^{-c/sqrt N} against c^2 x e^{-cx}.
LimitResult initial_limit_fixed_q(std::size_t N, double x, double c,
                                  const QModelParams& model);

// q = e^{-2/sqrt N}: sqrt(N) P(X_{floor(Nt)} = J_y | X_0 = J_x) against
// zeta_transition. DomainError if J_x or J_y is negative.
LimitResult local_limit_error_q_to_1(std::size_t N, double t, double x, double y,
                                     double sigma);

// q = e^{-2/sqrt N}, rho0 = e^{-c/sqrt N}: sqrt(N) P(X_0 = J_x) against
// zeta0_density(x, c).
LimitResult initial_limit_q_to_1(std::size_t N, double x, double c, double sigma);

// N P(X_0 = floor(x0 sqrt N), X_N = floor(x1 sqrt N)) with rho0 = e^{-c/sqrt N}
// against xi0_density(x0) bessel3d_transition(1, x0, x1).
LimitResult joint_mass_fixed_q(std::size_t N, double x0, double x1, double c,
                               const QModelParams& model);

// N P(X_0 = J_{x0}, X_N = J_{x1}) with q = e^{-2/sqrt N}, rho0 = e^{-c/sqrt N}
// against zeta0_density(x0) zeta_transition(1, x0, x1).
LimitResult joint_mass_q_to_1(std::size_t N, double x0, double x1, double c,
                              double sigma);

struct ErrorRow {
  std::size_t N = 0;
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  LimitResult result;
};

// Columns N, t, x, y, lhs, rhs, rel_err.
std::string error_table_csv(const std::vector<ErrorRow>& rows);

}  // namespace qmotzkin::kernels
