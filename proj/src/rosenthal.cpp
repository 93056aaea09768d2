#include "multisum/rosenthal.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "multisum/digest.hpp"
#include "multisum/errors.hpp"

namespace multisum {

double rosenthal_K(double p) {
  if (!(p >= 2.0)) throw DomainError("rosenthal_K: p must be >= 2");
  if (p == 2.0) return 1.0;
  return kRosenthalConstant * p / (std::numbers::e * std::log(p));
}

double trivial_bound(double f_moment, double /*p*/, std::uint64_t l_size) {
  if (f_moment < 0) throw ArgumentError("trivial_bound: moment must be >= 0");
  if (l_size < 1) throw ArgumentError("trivial_bound: |L| must be >= 1");
  return std::sqrt(static_cast<double>(l_size)) * f_moment;
}

double klesov_bound(std::span<const double> factor_moments, double p) {
  if (factor_moments.empty()) throw ArgumentError("klesov_bound: need at least one factor");
  double k = rosenthal_K(p);
  double v = 1;
  for (double m : factor_moments) {
    if (m < 0) throw ArgumentError("klesov_bound: factor moments must be >= 0");
    v *= k * m;
  }
  return v;
}

double dp_quasinorm(const DegenerateKernel& kernel, double p) {
  std::map<std::pair<int, int>, double> cache;
  auto moment = [&](int s, int k) {
    auto key = std::make_pair(s, k);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    double v = factor_moment(kernel.factors()[s], k, kernel.axes()[s], p);
    cache.emplace(key, v);
    return v;
  };
  double total = 0;
  for (const auto& t : kernel.terms()) {
    if (t.w == 0) continue;
    double prod = std::fabs(t.w);
    for (int s = 0; s < kernel.dimension(); ++s) prod *= moment(s, t.k[s]);
    total += prod;
  }
  return total;
}

std::string route_name(BoundRoute route) {
  switch (route) {
    case BoundRoute::trivial: return "trivial";
    case BoundRoute::klesov_product: return "klesov_product";
    case BoundRoute::dp_quasinorm: return "dp_quasinorm";
    case BoundRoute::theorem_w: return "theorem_W";
  }
  return "unknown";
}

TruncatedDegenerate::TruncatedDegenerate(DegenerateKernel kernel, int quadrature_nodes)
    : kernel_(std::move(kernel)), nodes_(quadrature_nodes) {}

ApproximableKernel::Approximation TruncatedDegenerate::approximate(int m, double p) const {
  if (m < 1) throw ArgumentError("approximate: M must be >= 1");
  Approximation a{kernel_.truncated(m), 0.0, false};
  std::vector<KernelTerm> rest;
  for (const auto& t : kernel_.terms()) {
    int top = 0;
    for (int k : t.k) top = std::max(top, k);
    if (top > m && t.w != 0) rest.push_back(t);
  }
  if (!rest.empty()) {
    DegenerateKernel residual(kernel_.factors(), kernel_.axes(), std::move(rest),
                              kernel_.orthonormal());
    a.q = kernel_moment_curve(residual, {p}, MomentMethod::quadrature(nodes_)).values()[0];
  }
  return a;
}

std::string TruncatedDegenerate::digest() const { return kernel_.digest(); }

BoundReport theorem_w_bound(const ApproximableKernel& kernel, double p, std::uint64_t l_size,
                            int m_max) {
  if (m_max < 1) throw ArgumentError("theorem_w_bound: M_max must be >= 1");
  if (l_size < 1) throw ArgumentError("theorem_w_bound: |L| must be >= 1");
  const double kd = std::pow(rosenthal_K(p), kernel.dimension());
  const double root_l = std::sqrt(static_cast<double>(l_size));
  BoundReport rep;
  rep.p = p;
  rep.route = BoundRoute::theorem_w;
  rep.l_size = l_size;
  rep.value = kInfinity;
  for (int m = 1; m <= m_max; ++m) {
    auto a = kernel.approximate(m, p);
    double v = kd * dp_quasinorm(a.z, p) + root_l * a.q;
    rep.surrogate = rep.surrogate || a.surrogate;
    if (v < rep.value) {
      rep.value = v;
      rep.m_star = m;
    }
  }
  rep.digest = Digest().add(kernel.digest()).add(p).add(static_cast<std::uint64_t>(l_size)).add(m_max).hex();
  return rep;
}

}  // namespace multisum
