#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qmotzkin/ascpoly.hpp"
#include "qmotzkin/quadrature.hpp"

namespace qmotzkin::motzkin {

using ascpoly::QModelParams;
using ascpoly::ScaledValue;

// Altitudes gamma_0..gamma_L of a Motzkin path.
class MotzkinPath {
 public:
  MotzkinPath() = default;
  // Throws DomainError on a negative altitude or a jump of size > 1.
  explicit MotzkinPath(std::vector<int> altitudes);

  const std::vector<int>& altitudes() const { return h_; }
  std::size_t length() const { return h_.empty() ? 0 : h_.size() - 1; }
  int start() const { return h_.front(); }
  int end() const { return h_.back(); }
  int operator[](std::size_t k) const { return h_[k]; }

  bool operator==(const MotzkinPath& other) const = default;
  auto operator<=>(const MotzkinPath& other) const = default;

 private:
  std::vector<int> h_;
};

// Edge weights a_n (up), b_n (flat), c_n (down) at the left altitude n, and
// boundary weights alpha_n (start) and beta_n (end).
struct WeightModel {
  std::function<double(std::size_t)> a;
  std::function<double(std::size_t)> b;
  std::function<double(std::size_t)> c;
  std::function<double(std::size_t)> alpha;
  std::function<double(std::size_t)> beta;
  std::optional<QModelParams> q_params;
  std::string name;
  std::map<std::string, double> parameters;

  // a_n = [n+2]_q, b_n = 2 sigma [n+1]_q, c_n = [n]_q,
  // alpha_n = rho0^n [n+1]_q, beta_n = rho1^n.
  static WeightModel q_model(const QModelParams& p);
  // a = b = c = 1, alpha_n = rho0^n, beta_n = rho1^n.
  static WeightModel unit(double rho0, double rho1);
  // "q" (keys q, sigma, rho0, rho1) or "unit" (keys rho0, rho1).
  static WeightModel named(const std::string& name,
                           const std::map<std::string, double>& params);

  // Checks a_n > 0, b_n >= 0, c_n > 0 for n >= 1 on 0..n_max.
  void validate(std::size_t n_max = 64) const;
};

// key=value lines; q-models as q, sigma, rho0, rho1, others with model=name.
std::string serialize_model(const WeightModel& m);
WeightModel parse_model(const std::string& text);

// Comma-separated altitudes.
std::string serialize_path(const MotzkinPath& p);
MotzkinPath parse_path(const std::string& line);

// Vector held as values * exp(log_scale).
struct ScaledVector {
  std::vector<double> v;
  double log_scale = 0.0;

  // Divides by the largest magnitude and folds it into log_scale.
  void normalize();
  double dot_log(const std::vector<double>& w, double& sign) const;
};

// Truncation of M_t to states 0..size-1: super-diagonal a_n t, diagonal b_n,
// sub-diagonal c_n / t.
class TruncatedOperator {
 public:
  TruncatedOperator(const WeightModel& m, std::size_t size, double t = 1.0);

  std::size_t size() const { return a_.size(); }
  double t() const { return t_; }
  TruncatedOperator with_t(double t) const;

  double up(std::size_t n) const { return a_[n] * t_; }
  double flat(std::size_t n) const { return b_[n]; }
  double down(std::size_t n) const { return c_[n] / t_; }
  double a(std::size_t n) const { return a_[n]; }
  double b(std::size_t n) const { return b_[n]; }
  double c(std::size_t n) const { return c_[n]; }

  // Row vector times M_t.
  std::vector<double> apply_row(const std::vector<double>& v) const;
  // M_t times column vector.
  std::vector<double> apply_col(const std::vector<double>& v) const;
  void apply_row(ScaledVector& v) const;
  void apply_col(ScaledVector& v) const;

 private:
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> c_;
  double t_ = 1.0;
};

// Boundary vectors truncated so the neglected tail of alpha_m (m+1)^2 (and
// likewise for beta) is below tail_tol relative to the retained sum.
// DivergenceError if the weights do not decay within the scan limit; this is
// a numerical heuristic, not a proof of summability.
struct Boundary {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::size_t cap() const { return std::max(alpha.size(), beta.size()); }
};
Boundary truncate_boundary(const WeightModel& m, double tail_tol);

// Operator size that represents every path between retained boundary
// heights exactly.
std::size_t transfer_size(const Boundary& bd, std::size_t L);

inline constexpr std::size_t kMaxEnumerationLength = 14;

// All paths of length L from m to n. CapacityError if L > 14.
std::vector<MotzkinPath> enumerate_paths(std::size_t L, int m, int n);

// Product of step weights at left altitudes.
double path_weight(const MotzkinPath& p, const WeightModel& m);
int horizontal_count(const MotzkinPath& p);

// W^{(L)}_{m,n} on states 0..height_cap. CapacityError unless
// height_cap >= max(m, n, floor((m+n+L)/2)).
double partition_weight(std::size_t L, int m, int n, const WeightModel& model,
                        std::size_t height_cap);

struct TransferPolicy {
  double tail_tol = 1e-14;
  std::size_t height_cap = 0;  // 0 selects the size from the boundary tails
};

// C_L = V_alpha(1)^T M_1^L W_beta(1).
ScaledValue log_normalizing_constant(std::size_t L, const WeightModel& model,
                                     const TransferPolicy& policy = {});
// exp of the above; OverflowError if it does not fit a double.
double normalizing_constant(std::size_t L, const WeightModel& model,
                            const TransferPolicy& policy = {});

// E[z0^{g_0} prod t_j^{g_j - g_{j-1}} prod s_j^{g_{L-j} - g_{L+1-j}} z1^{g_L}]
// from the product of transfer operators.
double matrix_ansatz_expectation(double z0, double z1,
                                 const std::vector<double>& t,
                                 const std::vector<double>& s, std::size_t L,
                                 const WeightModel& model,
                                 const TransferPolicy& policy = {});

// Same expectation from the integral against the orthogonality measure.
// Requires a q-model.
double integral_expectation(double z0, double z1, const std::vector<double>& t,
                            const std::vector<double>& s, std::size_t L,
                            const WeightModel& model,
                            const quad::Policy& quad_policy = {},
                            const TransferPolicy& policy = {});

// C_L through the integral of x^L (V^T P)(W^T Q) dnu.
double integral_normalizing_constant(std::size_t L, const WeightModel& model,
                                     const quad::Policy& quad_policy = {},
                                     const TransferPolicy& policy = {});

// Exact sequential sampler for Pr_L on the truncated state space.
class PathSampler {
 public:
  PathSampler(std::size_t L, const WeightModel& model,
              const TransferPolicy& policy = {});

  std::size_t length() const { return L_; }
  std::size_t height_cap() const { return op_.size(); }

  // Draws one path using the given 64-bit generator state.
  template <class Rng>
  MotzkinPath draw(Rng& rng) const {
    return draw_with([&rng]() { return uniform(rng()); });
  }

  // count paths; path i uses the stream derived from (seed, i / chunk).
  std::vector<MotzkinPath> sample(std::size_t count, std::uint64_t seed) const;

  static double uniform(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  MotzkinPath draw_with(const std::function<double()>& next) const;

  std::size_t L_;
  TruncatedOperator op_;
  std::vector<double> alpha_;
  std::vector<std::vector<double>> backward_;  // u_k = M^{L-k} W, scaled
};

MotzkinPath sample_path(std::size_t L, const WeightModel& model,
                        std::uint64_t seed, const TransferPolicy& policy = {});

// Seed for the stream with the given index.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

// Heuristic check that sum alpha_n beta_m / ||p_m||^2 |x^L p_n p_m| is finite
// for q-models; general models only get the boundary decay scan.
void check_summability(const WeightModel& model, double tail_tol = 1e-14);

}  // namespace qmotzkin::motzkin
