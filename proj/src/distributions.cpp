#include "multisum/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "multisum/errors.hpp"

namespace multisum {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double safe_log_abs(double v) {
  double a = std::fabs(v);
  return a > 0 ? std::log(a) : kNegInf;
}

double poisson_log_pmf(int k) { return -1.0 - std::lgamma(k + 1.0); }

}  // namespace

AxisDistribution AxisDistribution::standard_normal() { return {}; }

AxisDistribution AxisDistribution::rademacher() {
  AxisDistribution a;
  a.kind_ = AxisKind::rademacher;
  return a;
}

AxisDistribution AxisDistribution::centered_exponential() {
  AxisDistribution a;
  a.kind_ = AxisKind::centered_exponential;
  return a;
}

AxisDistribution AxisDistribution::compensated_poisson() {
  AxisDistribution a;
  a.kind_ = AxisKind::compensated_poisson;
  return a;
}

AxisDistribution AxisDistribution::log_weibull(double beta) {
  if (!(beta > 0)) throw ArgumentError("log_weibull: beta must be positive");
  AxisDistribution a;
  a.kind_ = AxisKind::log_weibull;
  a.beta_ = beta;
  return a;
}

AxisDistribution AxisDistribution::grid(std::vector<double> nodes, std::vector<double> weights) {
  if (nodes.empty() || nodes.size() != weights.size())
    throw ArgumentError("grid axis: nodes and weights must be nonempty and of equal length");
  double total = 0;
  for (double w : weights) {
    if (!(w > 0)) throw ArgumentError("grid axis: weights must be positive");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw ArgumentError("grid axis: weights must sum to 1");
  AxisDistribution a;
  a.kind_ = AxisKind::grid;
  a.nodes_ = std::move(nodes);
  a.weights_ = std::move(weights);
  double c = 0;
  for (double w : a.weights_) a.cdf_.push_back(c += w);
  a.cdf_.back() = 1.0;
  return a;
}

std::string AxisDistribution::name() const {
  switch (kind_) {
    case AxisKind::standard_normal: return "standard_normal";
    case AxisKind::rademacher: return "rademacher";
    case AxisKind::centered_exponential: return "centered_exponential";
    case AxisKind::compensated_poisson: return "compensated_poisson";
    case AxisKind::log_weibull: return "log_weibull";
    case AxisKind::grid: return "grid";
  }
  return "unknown";
}

bool AxisDistribution::operator==(const AxisDistribution& o) const {
  return kind_ == o.kind_ && beta_ == o.beta_ && nodes_ == o.nodes_ && weights_ == o.weights_;
}

double AxisDistribution::from_uniforms(double u1, double u2) const {
  switch (kind_) {
    case AxisKind::standard_normal:
      return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    case AxisKind::rademacher: return u1 < 0.5 ? -1.0 : 1.0;
    case AxisKind::centered_exponential: return -std::log(u1) - 1.0;
    case AxisKind::compensated_poisson: {
      int k = 0;
      double pk = std::exp(-1.0), cdf = pk;
      while (u1 > cdf && k < 170) {
        ++k;
        pk /= k;
        cdf += pk;
      }
      return k - 1.0;
    }
    case AxisKind::log_weibull: {
      double a = 1.0 + 1.0 / beta_;
      double t = std::pow(-std::log(u1), 1.0 / a);
      double mag = std::expm1(t);
      return u2 < 0.5 ? -mag : mag;
    }
    case AxisKind::grid: {
      auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u1);
      if (it == cdf_.end()) --it;
      return nodes_[static_cast<std::size_t>(it - cdf_.begin())];
    }
  }
  return 0;
}

double AxisDistribution::sample(const RngSpec& rng, std::uint64_t rep, std::uint32_t axis,
                                std::uint32_t index) const {
  auto u = rng.uniforms(rep, Stream::axis, axis, index);
  return from_uniforms(u[0], u[1]);
}

double AxisDistribution::expect(const std::function<double(double)>& f,
                                std::span<const double> breakpoints) const {
  switch (kind_) {
    case AxisKind::standard_normal: {
      const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
      return integrate_composite([&](double x) { return f(x) * c * std::exp(-0.5 * x * x); },
                                 -40.0, 40.0, breakpoints, 0.5);
    }
    case AxisKind::rademacher: return 0.5 * (f(-1.0) + f(1.0));
    case AxisKind::centered_exponential: {
      std::vector<double> bp;
      for (double x : breakpoints) bp.push_back(x + 1.0);
      return integrate_composite([&](double e) { return f(e - 1.0) * std::exp(-e); }, 0.0, 750.0,
                                 bp, 0.5);
    }
    case AxisKind::compensated_poisson: {
      double s = 0;
      for (int k = 0; k < 200; ++k) s += std::exp(poisson_log_pmf(k)) * f(k - 1.0);
      return s;
    }
    case AxisKind::log_weibull: {
      double a = 1.0 + 1.0 / beta_;
      double tmax = std::pow(745.0, 1.0 / a);
      std::vector<double> bp;
      for (double x : breakpoints) bp.push_back(std::log1p(std::fabs(x)));
      auto integrand = [&](double t) {
        if (t <= 0) return 0.0;
        double dens = a * std::pow(t, a - 1.0) * std::exp(-std::pow(t, a));
        double m = std::expm1(t);
        return 0.5 * dens * (f(m) + f(-m));
      };
      return integrate_composite(integrand, 0.0, tmax, bp, tmax / 800.0);
    }
    case AxisKind::grid: {
      double s = 0;
      for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * f(nodes_[i]);
      return s;
    }
  }
  return 0;
}

double AxisDistribution::log_expect_abs_pow(const std::function<double(double)>& g, double p,
                                            std::span<const double> breakpoints) const {
  switch (kind_) {
    case AxisKind::rademacher:
      return log_add(p * safe_log_abs(g(-1.0)), p * safe_log_abs(g(1.0))) + std::log(0.5);
    case AxisKind::grid: {
      double acc = kNegInf;
      for (std::size_t i = 0; i < nodes_.size(); ++i)
        acc = log_add(acc, p * safe_log_abs(g(nodes_[i])) + std::log(weights_[i]));
      return acc;
    }
    case AxisKind::compensated_poisson: {
      double acc = kNegInf;
      const int kend = static_cast<int>(std::min(1e6, 60.0 + 3.0 * p));
      for (int k = 0; k <= kend; ++k)
        acc = log_add(acc, p * safe_log_abs(g(k - 1.0)) + poisson_log_pmf(k));
      return acc;
    }
    default: break;
  }

  // Continuous laws: integrate exp(log integrand - peak) over a variable t.
  double lo = 0, hi = 0;
  std::function<double(double)> log_integrand;
  std::vector<double> bp;
  const double a = 1.0 + 1.0 / (beta_ > 0 ? beta_ : 1.0);
  switch (kind_) {
    case AxisKind::standard_normal: {
      const double lc = -0.5 * std::log(2.0 * std::numbers::pi);
      log_integrand = [&, lc](double x) { return p * safe_log_abs(g(x)) + lc - 0.5 * x * x; };
      hi = 40.0;
      lo = -hi;
      bp.assign(breakpoints.begin(), breakpoints.end());
      break;
    }
    case AxisKind::centered_exponential: {
      log_integrand = [&](double e) { return p * safe_log_abs(g(e - 1.0)) - e; };
      hi = 200.0;
      for (double x : breakpoints) bp.push_back(x + 1.0);
      break;
    }
    case AxisKind::log_weibull: {
      log_integrand = [&, a](double t) {
        if (t <= 0) return kNegInf;
        double m = std::expm1(t);
        double ld = std::log(0.5 * a) + (a - 1.0) * std::log(t) - std::pow(t, a);
        return ld + log_add(p * safe_log_abs(g(m)), p * safe_log_abs(g(-m)));
      };
      hi = std::pow(200.0, 1.0 / a);
      for (double x : breakpoints) bp.push_back(std::log1p(std::fabs(x)));
      break;
    }
    default: break;
  }

  double peak = kNegInf;
  for (int attempt = 0; attempt < 12; ++attempt) {
    const int scan = 4000;
    peak = kNegInf;
    for (int i = 0; i <= scan; ++i) peak = std::max(peak, log_integrand(lo + (hi - lo) * i / scan));
    double edge = log_integrand(hi);
    double edge_lo = kind_ == AxisKind::standard_normal ? log_integrand(lo) : kNegInf;
    if (std::max(edge, edge_lo) < peak - 60.0) break;
    hi *= 2.0;
    if (kind_ == AxisKind::standard_normal) lo = -hi;
  }
  if (!std::isfinite(peak)) return peak;
  double integral = integrate_composite(
      [&](double t) {
        double l = log_integrand(t);
        return l == kNegInf ? 0.0 : std::exp(l - peak);
      },
      lo, hi, bp, (hi - lo) / 2000.0);
  return peak + std::log(integral);
}

double AxisDistribution::mean() const {
  switch (kind_) {
    case AxisKind::grid:
    case AxisKind::log_weibull: return expect([](double x) { return x; });
    default: return 0.0;
  }
}

double AxisDistribution::variance() const {
  switch (kind_) {
    case AxisKind::grid:
    case AxisKind::log_weibull: {
      double m = mean();
      return expect([m](double x) { return (x - m) * (x - m); });
    }
    default: return 1.0;
  }
}

QuadratureRule AxisDistribution::quadrature(int n) const {
  switch (kind_) {
    case AxisKind::standard_normal: return gauss_hermite_normal(n);
    case AxisKind::rademacher: return {{-1.0, 1.0}, {0.5, 0.5}};
    case AxisKind::centered_exponential: {
      QuadratureRule r = gauss_laguerre(n);
      for (double& x : r.nodes) x -= 1.0;
      return r;
    }
    case AxisKind::compensated_poisson: {
      QuadratureRule r;
      for (int k = 0; k < 60; ++k) {
        r.nodes.push_back(k - 1.0);
        r.weights.push_back(std::exp(poisson_log_pmf(k)));
      }
      return r;
    }
    case AxisKind::log_weibull: {
      double a = 1.0 + 1.0 / beta_;
      double tmax = std::pow(745.0, 1.0 / a);
      int panels = std::max(1, n / 8);
      QuadratureRule base = gauss_legendre(8, 0.0, 1.0);
      QuadratureRule r;
      double h = tmax / panels;
      for (int j = 0; j < panels; ++j)
        for (std::size_t i = 0; i < base.size(); ++i) {
          double t = (j + base.nodes[i]) * h;
          double w = base.weights[i] * h * a * std::pow(t, a - 1.0) * std::exp(-std::pow(t, a));
          double m = std::expm1(t);
          r.nodes.push_back(-m);
          r.weights.push_back(0.5 * w);
          r.nodes.push_back(m);
          r.weights.push_back(0.5 * w);
        }
      return r;
    }
    case AxisKind::grid: return {nodes_, weights_};
  }
  return {};
}

}  // namespace multisum
