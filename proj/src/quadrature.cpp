#include "qmotzkin/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qmotzkin/errors.hpp"

namespace qmotzkin::quad {

Rule gauss_legendre(std::size_t n) {
  if (n == 0) throw DomainError("gauss_legendre: n must be positive");
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess for the i-th root (descending).
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double kk = static_cast<double>(k);
      const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

const Rule& rule16() {
  static const Rule r = gauss_legendre(16);
  return r;
}

void composite_nodes(double a, double b, std::size_t panels,
                     std::vector<double>& x, std::vector<double>& w) {
  const Rule& r = rule16();
  const std::size_t order = r.nodes.size();
  x.resize(panels * order);
  w.resize(panels * order);
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * h;
    for (std::size_t i = 0; i < order; ++i) {
      x[p * order + i] = mid + 0.5 * h * r.nodes[i];
      w[p * order + i] = 0.5 * h * r.weights[i];
    }
  }
}

Result composite(const std::function<double(double)>& f, double a, double b,
                 std::size_t panels) {
  const Rule& r = rule16();
  const double h = (b - a) / static_cast<double>(panels);
  Result res;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * h;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const double v = f(mid + 0.5 * h * r.nodes[i]);
      res.value += 0.5 * h * r.weights[i] * v;
      res.abs_value += 0.5 * h * r.weights[i] * std::abs(v);
    }
  }
  res.nodes = panels * r.nodes.size();
  return res;
}

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Policy& policy) {
  if (a == b) return {};
  std::size_t panels = policy.initial_panels == 0 ? 1 : policy.initial_panels;
  Result prev = composite(f, a, b, panels);
  for (;;) {
    panels *= 2;
    if (panels * rule16().nodes.size() > policy.max_nodes) {
      throw ConvergenceError("quadrature: no convergence within " +
                             std::to_string(policy.max_nodes) + " nodes");
    }
    Result cur = composite(f, a, b, panels);
    if (!std::isfinite(cur.value)) {
      throw ConvergenceError("quadrature: non-finite integrand");
    }
    if (std::abs(cur.value - prev.value) <= policy.rel_tol * cur.abs_value) {
      return cur;
    }
    prev = cur;
  }
}

}  // namespace qmotzkin::quad
