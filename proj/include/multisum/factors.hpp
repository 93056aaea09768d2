#pragma once

#include <span>
#include <string>
#include <vector>

#include "multisum/distributions.hpp"

namespace multisum {

enum class FactorKind {
  hermite,                    // He_k / sqrt(k!) under N(0,1)
  rademacher_sign,            // g_1(x) = x
  centered_poisson_charlier,  // Charlier polynomials of Poisson(1) in x + 1
  centered_exponential_poly,  // (-1)^k L_k(x + 1), Laguerre
  tabulated,                  // columns of values on grid nodes
  standardized_identity,      // (x - mean) / sd of the axis law
};

// Family of centered one-variable functions g_1, g_2, ... attached to an axis.
class FactorFamily {
 public:
  static FactorFamily hermite();
  static FactorFamily rademacher_sign();
  static FactorFamily centered_poisson_charlier();
  static FactorFamily centered_exponential_poly();
  // columns[k-1][i] = g_k(nodes[i]); evaluation interpolates linearly.
  static FactorFamily tabulated(std::vector<double> nodes, std::vector<std::vector<double>> columns);
  static FactorFamily standardized_identity(double mean, double sd);

  FactorKind kind() const { return kind_; }
  std::string name() const;
  // Largest valid index (0 = unbounded).
  int max_index() const;
  // Axis law under which the family is centered (and orthonormal when listed).
  AxisDistribution natural_axis() const;
  bool orthonormal_by_construction() const;

  double operator()(int k, double x) const;
  // out[k-1] = g_k(x) for k = 1..kmax.
  void eval_upto(int kmax, double x, std::span<double> out) const;
  // Points where |g_k| may have kinks (roots); helps 1-D integration.
  std::vector<double> breakpoints(int k) const;

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<std::vector<double>>& columns() const { return columns_; }
  double shift() const { return mean_; }
  double scale() const { return sd_; }

  bool operator==(const FactorFamily& other) const;

 private:
  FactorKind kind_ = FactorKind::hermite;
  std::vector<double> nodes_;
  std::vector<std::vector<double>> columns_;
  double mean_ = 0, sd_ = 1;
};

// |g_k(X)|_p under the given axis law.
double factor_moment(const FactorFamily& family, int k, const AxisDistribution& axis, double p);

}  // namespace multisum
