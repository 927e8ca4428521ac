#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qmotzkin::quad {

// Gauss-Legendre nodes and weights on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Computes the n-point rule by Newton iteration on P_n. Intended for small n
// (the composite integrator uses n = 16).
Rule gauss_legendre(std::size_t n);

// Shared immutable 16-point rule.
const Rule& rule16();

struct Policy {
  double rel_tol = 1e-12;
  std::size_t initial_panels = 4;
  std::size_t max_nodes = std::size_t{1} << 15;
};

struct Result {
  double value = 0.0;
  double abs_value = 0.0;  // integral of |f|, used as the accuracy scale
  std::size_t nodes = 0;
};

// Composite 16-point Gauss-Legendre on `panels` equal panels of [a, b].
Result composite(const std::function<double(double)>& f, double a, double b,
                 std::size_t panels);

// Composite rule with panel doubling until successive estimates differ by at
// most rel_tol * integral(|f|). Throws ConvergenceError past max_nodes.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Policy& policy = {});

// Fills x / w with the composite nodes and weights for `panels` panels.
void composite_nodes(double a, double b, std::size_t panels,
                     std::vector<double>& x, std::vector<double>& w);

}  // namespace qmotzkin::quad
