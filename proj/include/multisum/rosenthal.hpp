#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "multisum/kernel.hpp"

namespace multisum {

inline constexpr double kRosenthalConstant = 1.77638;

// K(2) = 1 and C_R p / (e ln p) for p > 2. The jump at 2+ (1 -> ~1.88) is an
// artifact of using an upper bound above 2.
double rosenthal_K(double p);

// |L|^{1/2} |f|_p.
double trivial_bound(double f_moment, double p, std::uint64_t l_size);

// K(p)^d prod |g_s|_p for a rank-one kernel.
double klesov_bound(std::span<const double> factor_moments, double p);

// sum |lambda(k)| prod_s |g^{(s)}_{k_s}|_p for the given representation.
double dp_quasinorm(const DegenerateKernel& kernel, double p);

enum class BoundRoute { trivial, klesov_product, dp_quasinorm, theorem_w };

std::string route_name(BoundRoute route);

struct BoundReport {
  double p = 2;
  double value = 0;
  BoundRoute route = BoundRoute::trivial;
  std::optional<int> m_star;
  std::uint64_t l_size = 1;
  bool surrogate = false;
  std::string digest;
};

// Kernel with computable degenerate approximations Z_M and errors Q_{M,p}.
class ApproximableKernel {
 public:
  struct Approximation {
    DegenerateKernel z;
    double q = 0;
    bool surrogate = false;
  };
  virtual ~ApproximableKernel() = default;
  virtual int dimension() const = 0;
  virtual Approximation approximate(int m, double p) const = 0;
  virtual std::string digest() const = 0;
};

// Degenerate kernel truncated to terms with max index <= M.
class TruncatedDegenerate final : public ApproximableKernel {
 public:
  explicit TruncatedDegenerate(DegenerateKernel kernel, int quadrature_nodes = 64);
  int dimension() const override { return kernel_.dimension(); }
  Approximation approximate(int m, double p) const override;
  std::string digest() const override;

 private:
  DegenerateKernel kernel_;
  int nodes_;
};

// min over M in [1, M_max] of K^d D_p(Z_M) + |L|^{1/2} Q_{M,p}, with argmin.
BoundReport theorem_w_bound(const ApproximableKernel& kernel, double p, std::uint64_t l_size,
                            int m_max);

}  // namespace multisum
