#pragma once

#include <functional>
#include <span>
#include <vector>

namespace multisum {

// Discrete measure: nodes with positive weights.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double total_weight() const;
};

// Gauss-Legendre rule on [a, b] with weights summing to b - a.
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Gauss rule for the standard normal density (weights sum to 1).
QuadratureRule gauss_hermite_normal(int n);

// Gauss rule for the density e^{-x} on [0, inf) (weights sum to 1).
QuadratureRule gauss_laguerre(int n);

// Composite Gauss-Legendre integral of f over [a, b], splitting at the given
// interior breakpoints and using panels no wider than max_panel.
double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, double max_panel,
                           int order = 16);

}  // namespace multisum
