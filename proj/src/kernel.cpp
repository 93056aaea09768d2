#include "multisum/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "multisum/digest.hpp"
#include "multisum/empirical.hpp"
#include "multisum/errors.hpp"
#include "multisum/rng.hpp"

namespace multisum {

namespace {

std::vector<AxisDistribution> natural_axes(const std::vector<FactorFamily>& factors) {
  std::vector<AxisDistribution> axes;
  for (const auto& f : factors) axes.push_back(f.natural_axis());
  return axes;
}

}  // namespace

DegenerateKernel::DegenerateKernel(std::vector<FactorFamily> factors,
                                   std::vector<AxisDistribution> axes,
                                   std::vector<KernelTerm> terms, bool orthonormal)
    : factors_(std::move(factors)), axes_(std::move(axes)), terms_(std::move(terms)),
      orthonormal_(orthonormal) {
  const int d = dimension();
  if (d < 1) throw ArgumentError("DegenerateKernel: dimension must be >= 1");
  if (static_cast<int>(axes_.size()) != d)
    throw ArgumentError("DegenerateKernel: need one axis law per factor family");
  max_k_.assign(d, 0);
  for (const auto& t : terms_) {
    if (static_cast<int>(t.k.size()) != d)
      throw ArgumentError("DegenerateKernel: every index tuple needs d components");
    if (!std::isfinite(t.w)) throw ArgumentError("DegenerateKernel: weights must be finite");
    for (int s = 0; s < d; ++s) {
      if (t.k[s] < 1) throw ArgumentError("DegenerateKernel: indices are 1-based");
      int top = factors_[s].max_index();
      if (top > 0 && t.k[s] > top)
        throw ArgumentError("DegenerateKernel: index " + std::to_string(t.k[s]) +
                            " exceeds the size of the " + factors_[s].name() + " family");
      max_k_[s] = std::max(max_k_[s], t.k[s]);
      degree_ = std::max(degree_, t.k[s]);
    }
  }
  std::sort(terms_.begin(), terms_.end(),
            [](const KernelTerm& a, const KernelTerm& b) { return a.k < b.k; });
  for (std::size_t i = 1; i < terms_.size(); ++i)
    if (terms_[i].k == terms_[i - 1].k)
      throw ArgumentError("DegenerateKernel: duplicate index tuple");
}

DegenerateKernel::DegenerateKernel(std::vector<FactorFamily> factors,
                                   std::vector<KernelTerm> terms, bool orthonormal)
    : DegenerateKernel(factors, natural_axes(factors), std::move(terms), orthonormal) {}

double DegenerateKernel::sum_sq_weights() const {
  double s = 0;
  for (const auto& t : terms_) s += t.w * t.w;
  return s;
}

double DegenerateKernel::l1_weights() const {
  double s = 0;
  for (const auto& t : terms_) s += std::fabs(t.w);
  return s;
}

DegenerateKernel DegenerateKernel::scaled(double c) const {
  auto terms = terms_;
  for (auto& t : terms) t.w *= c;
  return DegenerateKernel(factors_, axes_, std::move(terms), orthonormal_);
}

DegenerateKernel DegenerateKernel::truncated(int m) const {
  std::vector<KernelTerm> keep;
  for (const auto& t : terms_)
    if (*std::max_element(t.k.begin(), t.k.end()) <= m) keep.push_back(t);
  return DegenerateKernel(factors_, axes_, std::move(keep), orthonormal_);
}

DegenerateKernel DegenerateKernel::with_axes(std::vector<AxisDistribution> axes) const {
  return DegenerateKernel(factors_, std::move(axes), terms_, orthonormal_);
}

std::string DegenerateKernel::digest() const {
  Digest h;
  h.add("degenerate_kernel").add(dimension()).add(orthonormal_ ? 1 : 0);
  for (int s = 0; s < dimension(); ++s) {
    const auto& f = factors_[s];
    h.add(f.name()).add(f.shift()).add(f.scale());
    for (double x : f.nodes()) h.add(x);
    for (const auto& c : f.columns())
      for (double x : c) h.add(x);
    const auto& a = axes_[s];
    h.add(a.name()).add(a.beta());
    for (double x : a.grid_nodes()) h.add(x);
    for (double x : a.grid_weights()) h.add(x);
  }
  for (const auto& t : terms_) {
    for (int k : t.k) h.add(k);
    h.add(t.w);
  }
  return h.hex();
}

double eval_kernel(const DegenerateKernel& kernel, std::span<const double> x) {
  const int d = kernel.dimension();
  if (static_cast<int>(x.size()) != d)
    throw ArgumentError("eval_kernel: point has " + std::to_string(x.size()) +
                        " coordinates, kernel dimension is " + std::to_string(d));
  std::vector<std::vector<double>> g(d);
  for (int s = 0; s < d; ++s) {
    int km = kernel.max_index(s);
    g[s].resize(km);
    kernel.factors()[s].eval_upto(km, x[s], g[s]);
  }
  double f = 0;
  for (const auto& t : kernel.terms()) {
    double prod = t.w;
    for (int s = 0; s < d; ++s) prod *= g[s][t.k[s] - 1];
    f += prod;
  }
  return f;
}

FactorTable tabulate_factors(const FactorFamily& family, int kmax, std::span<const double> x) {
  FactorTable t;
  t.kmax = kmax;
  t.n = x.size();
  t.values.assign(static_cast<std::size_t>(kmax) * x.size(), 0.0);
  std::vector<double> buf(std::max(kmax, 1));
  for (std::size_t i = 0; i < x.size(); ++i) {
    family.eval_upto(kmax, x[i], buf);
    for (int k = 0; k < kmax; ++k) t.values[k * t.n + i] = buf[k];
  }
  return t;
}

namespace {

bool quadrature_compatible(const FactorFamily& f, const AxisDistribution& a) {
  if (f.kind() != FactorKind::tabulated) return true;
  return a.kind() == AxisKind::grid && a.grid_nodes() == f.nodes();
}

// Visits every tensor node: callback(f value, weight).
template <class F>
void tensor_visit(const DegenerateKernel& kernel, int nodes, F&& visit) {
  const int d = kernel.dimension();
  std::vector<QuadratureRule> rules;
  std::vector<FactorTable> tables;
  for (int s = 0; s < d; ++s) {
    rules.push_back(kernel.axes()[s].quadrature(nodes));
    tables.push_back(tabulate_factors(kernel.factors()[s], kernel.max_index(s), rules[s].nodes));
  }
  std::vector<std::size_t> idx(d, 0);
  const auto& terms = kernel.terms();
  while (true) {
    double w = 1, f = 0;
    for (int s = 0; s < d; ++s) w *= rules[s].weights[idx[s]];
    for (const auto& t : terms) {
      double prod = t.w;
      for (int s = 0; s < d; ++s) prod *= tables[s].at(t.k[s], idx[s]);
      f += prod;
    }
    visit(f, w);
    int s = d - 1;
    while (s >= 0 && ++idx[s] == rules[s].size()) idx[s--] = 0;
    if (s < 0) break;
  }
}

std::size_t tensor_size(const DegenerateKernel& kernel, int nodes) {
  std::size_t n = 1;
  for (const auto& a : kernel.axes()) n *= a.quadrature(nodes).size();
  return n;
}

}  // namespace

KernelMoments kernel_quadrature_moments(const DegenerateKernel& kernel, int nodes) {
  KernelMoments m;
  tensor_visit(kernel, nodes, [&](double f, double w) {
    m.mean += w * f;
    m.second += w * f * f;
  });
  return m;
}

MomentCurve kernel_moment_curve(const DegenerateKernel& kernel, const std::vector<double>& p_grid,
                                const MomentMethod& method) {
  const int d = kernel.dimension();
  bool use_mc = method.kind == MomentMethod::Kind::monte_carlo;
  std::string warning;
  if (!use_mc) {
    for (int s = 0; s < d; ++s)
      if (!quadrature_compatible(kernel.factors()[s], kernel.axes()[s])) {
        use_mc = true;
        warning = "quadrature_unavailable_fallback_monte_carlo";
      }
    if (!use_mc && tensor_size(kernel, method.nodes) > (std::size_t{1} << 24)) {
      use_mc = true;
      warning = "tensor_grid_too_large_fallback_monte_carlo";
    }
  }

  if (!use_mc && kernel.terms().size() == 1) {
    // Independent axes: the norm factorizes, and 1-D integration handles the kinks of |g|.
    const auto& t = kernel.terms().front();
    std::vector<double> vals;
    for (double p : p_grid) {
      double v = std::fabs(t.w);
      for (int s = 0; s < d; ++s) v *= factor_moment(kernel.factors()[s], t.k[s], kernel.axes()[s], p);
      vals.push_back(v);
    }
    for (std::size_t i = 1; i < vals.size(); ++i) vals[i] = std::max(vals[i], vals[i - 1]);
    return MomentCurve(p_grid, vals);
  }

  if (!use_mc) {
    std::vector<double> fv, wv;
    tensor_visit(kernel, method.nodes, [&](double f, double w) {
      fv.push_back(std::fabs(f));
      wv.push_back(w);
    });
    std::vector<double> vals;
    for (double p : p_grid) {
      double s = 0;
      for (std::size_t i = 0; i < fv.size(); ++i) s += wv[i] * std::pow(fv[i], p);
      vals.push_back(std::pow(s, 1.0 / p));
    }
    // Remove rounding-level Lyapunov violations.
    for (std::size_t i = 1; i < vals.size(); ++i) vals[i] = std::max(vals[i], vals[i - 1]);
    return MomentCurve(p_grid, vals);
  }

  const std::uint64_t n = method.kind == MomentMethod::Kind::monte_carlo ? method.n : 100000;
  RngSpec rng{method.seed};
  std::vector<double> samples(n);
  std::vector<double> x(d);
  for (std::uint64_t r = 0; r < n; ++r) {
    for (int s = 0; s < d; ++s) {
      auto u = rng.uniforms(r, Stream::aux, static_cast<std::uint32_t>(s), 0);
      x[s] = kernel.axes()[s].from_uniforms(u[0], u[1]);
    }
    samples[r] = eval_kernel(kernel, x);
  }
  std::vector<double> vals, ses;
  for (double p : p_grid) {
    auto e = empirical_moment(std::span<const double>(samples), p);
    vals.push_back(e.value);
    ses.push_back(e.standard_error);
  }
  MomentCurve curve(p_grid, vals, ses);
  curve.warning = warning;
  return curve;
}

std::vector<std::vector<double>> factor_gram(const FactorFamily& family,
                                             const AxisDistribution& axis, int kmax, int nodes) {
  QuadratureRule rule = axis.quadrature(nodes);
  FactorTable t = tabulate_factors(family, kmax, rule.nodes);
  std::vector<std::vector<double>> g(kmax, std::vector<double>(kmax, 0.0));
  for (int a = 1; a <= kmax; ++a)
    for (int b = 1; b <= kmax; ++b) {
      double s = 0;
      for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * t.at(a, i) * t.at(b, i);
      g[a - 1][b - 1] = s;
    }
  return g;
}

}  // namespace multisum
