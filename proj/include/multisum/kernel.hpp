#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "multisum/distributions.hpp"
#include "multisum/factors.hpp"
#include "multisum/psi.hpp"

namespace multisum {

// One coefficient lambda(k) of a degenerate kernel; k is 1-based per axis.
struct KernelTerm {
  std::vector<int> k;
  double w = 0;
};

// f(x) = sum_k lambda(k) prod_s g^{(s)}_{k_s}(x_s). Terms are kept sorted by k.
class DegenerateKernel {
 public:
  DegenerateKernel() = default;
  DegenerateKernel(std::vector<FactorFamily> factors, std::vector<AxisDistribution> axes,
                   std::vector<KernelTerm> terms, bool orthonormal);
  // Axis laws default to each family's natural law.
  DegenerateKernel(std::vector<FactorFamily> factors, std::vector<KernelTerm> terms,
                   bool orthonormal);

  int dimension() const { return static_cast<int>(factors_.size()); }
  // M = max over terms of max_s k_s.
  int degree() const { return degree_; }
  const std::vector<KernelTerm>& terms() const { return terms_; }
  const std::vector<FactorFamily>& factors() const { return factors_; }
  const std::vector<AxisDistribution>& axes() const { return axes_; }
  bool orthonormal() const { return orthonormal_; }
  // Largest index used on axis s.
  int max_index(int axis) const { return max_k_[axis]; }

  double sum_sq_weights() const;
  double l1_weights() const;

  DegenerateKernel scaled(double c) const;
  DegenerateKernel truncated(int m) const;
  DegenerateKernel with_axes(std::vector<AxisDistribution> axes) const;

  std::string digest() const;

 private:
  std::vector<FactorFamily> factors_;
  std::vector<AxisDistribution> axes_;
  std::vector<KernelTerm> terms_;
  std::vector<int> max_k_;
  int degree_ = 0;
  bool orthonormal_ = false;
};

double eval_kernel(const DegenerateKernel& kernel, std::span<const double> x);

struct MomentMethod {
  enum class Kind { quadrature, monte_carlo } kind = Kind::quadrature;
  int nodes = 64;
  std::uint64_t n = 100000;
  std::uint64_t seed = 0;

  static MomentMethod quadrature(int nodes = 64) { return {Kind::quadrature, nodes, 0, 0}; }
  static MomentMethod monte_carlo(std::uint64_t n, std::uint64_t seed) {
    return {Kind::monte_carlo, 64, n, seed};
  }
};

// |f(xi)|_p on the p-grid. Tabulated factors evaluated off their own grid
// fall back to Monte Carlo and set MomentCurve::warning.
MomentCurve kernel_moment_curve(const DegenerateKernel& kernel, const std::vector<double>& p_grid,
                                const MomentMethod& method = MomentMethod::quadrature());

// E f and E f^2 by tensor quadrature (used for centering and variance audits).
struct KernelMoments {
  double mean = 0;
  double second = 0;
};
KernelMoments kernel_quadrature_moments(const DegenerateKernel& kernel, int nodes = 64);

// Gram matrix E g_k g_l (k, l = 1..kmax) of a family under an axis law.
std::vector<std::vector<double>> factor_gram(const FactorFamily& family,
                                             const AxisDistribution& axis, int kmax,
                                             int nodes = 64);

// Per-axis values of the factors at sample points, kmax per axis.
struct FactorTable {
  int kmax = 0;
  std::size_t n = 0;
  std::vector<double> values;  // values[(k-1) * n + i]
  double at(int k, std::size_t i) const { return values[(k - 1) * n + i]; }
};
FactorTable tabulate_factors(const FactorFamily& family, int kmax, std::span<const double> x);

}  // namespace multisum
