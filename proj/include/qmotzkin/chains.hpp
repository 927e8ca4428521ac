#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmotzkin/ascpoly.hpp"
#include "qmotzkin/motzkin.hpp"
#include "qmotzkin/quadrature.hpp"

namespace qmotzkin::chains {

using ascpoly::QModelParams;

// Probabilities p[i] of the states offset + i.
struct Distribution {
  std::size_t offset = 0;
  std::vector<double> p;

  double at(long long n) const;
  double mass() const;
  double mean() const;
  double variance() const;
  std::size_t max_state() const { return offset + (p.empty() ? 0 : p.size() - 1); }

  static Distribution point(std::size_t n);
  // Drops zero entries at both ends.
  void trim();
  // Columns n, probability.
  std::string to_csv() const;
};

struct Row {
  double down = 0.0;
  double flat = 0.0;
  double up = 0.0;
};

// Boundary-limit chain of a q-model. The ratios pi_{n+1} / pi_n are built
// eagerly up to height(); rows above it throw CapacityError.
class ChainSpec {
 public:
  explicit ChainSpec(const QModelParams& params, std::size_t height = 4096);

  const QModelParams& params() const { return params_; }
  std::size_t height() const { return ratio_.size(); }
  double B() const { return B_; }

  // pi_{n+1} / pi_n.
  double pi_ratio(std::size_t n) const;
  // log pi_n and log s_n = log([n+1]_q pi_n).
  double log_pi(std::size_t n) const;
  double log_s(std::size_t n) const;

  // Row from a_n pi_{n+1} / (B pi_n), b_n / B, c_n pi_{n-1} / (B pi_n).
  Row row(std::size_t n) const;
  // Same row from the dual weights: c_{n+1} pi~_{n+1} / (B pi~_n) and
  // a_{n-1} pi~_{n-1} / (B pi~_n).
  Row dual_row(std::size_t n) const;

 private:
  QModelParams params_;
  double B_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> c_;
  std::vector<double> ratio_;
  std::vector<double> log_pi_;
};

Distribution transition_row(std::size_t n, const ChainSpec& spec);

enum class Which { X, Y };

// P(n) = rho^n s_n / C0 with rho = rho0 (X) or rho1 (Y) and
// C0 = (a rho, b rho; q)_inf / (rho; q)_inf^2, truncated once the neglected
// mass is below tail_tol.
Distribution initial_law(Which which, const ChainSpec& spec, double tail_tol = 1e-14);

// C0 from the q-Pochhammer closed form.
double initial_normalizer(double rho, const QModelParams& params);

// k steps of the chain. CapacityError unless height_cap >= max support + k.
Distribution kstep_distribution(const Distribution& start, std::size_t k,
                                const ChainSpec& spec, std::size_t height_cap);

// (pi_n / pi_m) B^{-k} int x^k p_m p~_n dnu.
double kstep_transition_integral(std::size_t m, std::size_t n, std::size_t k,
                                 const ChainSpec& spec,
                                 const quad::Policy& quad_policy = {});

// Trajectory X_0..X_steps; X_0 from initial_law(X) unless start is given.
std::vector<int> simulate_chain(const ChainSpec& spec, std::size_t steps,
                                std::uint64_t seed,
                                std::optional<std::size_t> start = std::nullopt);

// Law of a short altitude window, as (altitudes, probability) pairs sorted by
// altitudes.
using WindowLaw = std::vector<std::pair<std::vector<int>, double>>;

// Exact law of (gamma_0..gamma_K) under Pr_L, or of
// (gamma_L, gamma_{L-1}, .., gamma_{L-K}) when reversed is true.
WindowLaw finite_window_law(std::size_t L, std::size_t K, const QModelParams& params,
                            bool reversed, double tail_tol = 1e-14);

// Law of (X_0..X_K) (or Y) on the chain.
WindowLaw chain_window_law(Which which, std::size_t K, const ChainSpec& spec,
                           double tail_tol = 1e-14);

// Total variation distance; mass missing from either law counts as disjoint.
double total_variation(const WindowLaw& lhs, const WindowLaw& rhs);

// Correlation of (gamma_0, gamma_L) under Pr_L.
double endpoint_correlation(std::size_t L, const QModelParams& params,
                            double tail_tol = 1e-14);

}  // namespace qmotzkin::chains
