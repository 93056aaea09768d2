#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "multisum/quadrature.hpp"
#include "multisum/rng.hpp"

namespace multisum {

enum class AxisKind {
  standard_normal,
  rademacher,
  centered_exponential,   // E - 1, E ~ Exp(1)
  compensated_poisson,    // N - 1, N ~ Poisson(1)
  log_weibull,            // symmetric, P(|x| > y) = exp(-[ln(1+y)]^{1+1/beta})
  grid,                   // discrete law on tabulated nodes
};

// Law of the i.i.d. variables on one axis.
class AxisDistribution {
 public:
  static AxisDistribution standard_normal();
  static AxisDistribution rademacher();
  static AxisDistribution centered_exponential();
  static AxisDistribution compensated_poisson();
  static AxisDistribution log_weibull(double beta);
  static AxisDistribution grid(std::vector<double> nodes, std::vector<double> weights);

  AxisKind kind() const { return kind_; }
  std::string name() const;
  double beta() const { return beta_; }
  const std::vector<double>& grid_nodes() const { return nodes_; }
  const std::vector<double>& grid_weights() const { return weights_; }

  // Deterministic variate for (replication, axis, coordinate).
  double sample(const RngSpec& rng, std::uint64_t rep, std::uint32_t axis,
                std::uint32_t index) const;
  // Transform of two uniforms in (0,1).
  double from_uniforms(double u1, double u2) const;

  // E f(X), accurate for smooth or piecewise smooth f; breakpoints mark kinks.
  double expect(const std::function<double(double)>& f,
                std::span<const double> breakpoints = {}) const;
  // ln E |g(X)|^p evaluated in log space so that large p does not overflow.
  double log_expect_abs_pow(const std::function<double(double)>& g, double p,
                            std::span<const double> breakpoints = {}) const;

  double mean() const;
  double variance() const;

  // Rule used for tensor quadrature of kernel moments.
  QuadratureRule quadrature(int n) const;

  bool operator==(const AxisDistribution& other) const;

 private:
  AxisKind kind_ = AxisKind::standard_normal;
  double beta_ = 0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> cdf_;
};

}  // namespace multisum
