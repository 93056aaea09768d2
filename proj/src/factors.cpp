#include "multisum/factors.hpp"

#include <algorithm>
#include <cmath>

#include "multisum/errors.hpp"

namespace multisum {

FactorFamily FactorFamily::hermite() { return {}; }

FactorFamily FactorFamily::rademacher_sign() {
  FactorFamily f;
  f.kind_ = FactorKind::rademacher_sign;
  return f;
}

FactorFamily FactorFamily::centered_poisson_charlier() {
  FactorFamily f;
  f.kind_ = FactorKind::centered_poisson_charlier;
  return f;
}

FactorFamily FactorFamily::centered_exponential_poly() {
  FactorFamily f;
  f.kind_ = FactorKind::centered_exponential_poly;
  return f;
}

FactorFamily FactorFamily::tabulated(std::vector<double> nodes,
                                     std::vector<std::vector<double>> columns) {
  if (nodes.empty() || columns.empty())
    throw ArgumentError("tabulated factor: nodes and columns must be nonempty");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1]))
      throw ArgumentError("tabulated factor: nodes must be strictly ascending");
  for (const auto& c : columns)
    if (c.size() != nodes.size())
      throw ArgumentError("tabulated factor: every column needs one value per node");
  FactorFamily f;
  f.kind_ = FactorKind::tabulated;
  f.nodes_ = std::move(nodes);
  f.columns_ = std::move(columns);
  return f;
}

FactorFamily FactorFamily::standardized_identity(double mean, double sd) {
  if (!(sd > 0)) throw ArgumentError("standardized_identity: sd must be positive");
  FactorFamily f;
  f.kind_ = FactorKind::standardized_identity;
  f.mean_ = mean;
  f.sd_ = sd;
  return f;
}

std::string FactorFamily::name() const {
  switch (kind_) {
    case FactorKind::hermite: return "hermite";
    case FactorKind::rademacher_sign: return "rademacher_sign";
    case FactorKind::centered_poisson_charlier: return "centered_poisson_charlier";
    case FactorKind::centered_exponential_poly: return "centered_exponential_poly";
    case FactorKind::tabulated: return "tabulated";
    case FactorKind::standardized_identity: return "standardized_identity";
  }
  return "unknown";
}

int FactorFamily::max_index() const {
  switch (kind_) {
    case FactorKind::rademacher_sign:
    case FactorKind::standardized_identity: return 1;
    case FactorKind::tabulated: return static_cast<int>(columns_.size());
    default: return 0;
  }
}

AxisDistribution FactorFamily::natural_axis() const {
  switch (kind_) {
    case FactorKind::hermite: return AxisDistribution::standard_normal();
    case FactorKind::rademacher_sign: return AxisDistribution::rademacher();
    case FactorKind::centered_poisson_charlier: return AxisDistribution::compensated_poisson();
    case FactorKind::centered_exponential_poly: return AxisDistribution::centered_exponential();
    default: throw PreconditionError(name() + " factors have no default axis law; give one explicitly");
  }
}

bool FactorFamily::orthonormal_by_construction() const {
  return kind_ != FactorKind::tabulated;
}

bool FactorFamily::operator==(const FactorFamily& o) const {
  return kind_ == o.kind_ && nodes_ == o.nodes_ && columns_ == o.columns_ && mean_ == o.mean_ &&
         sd_ == o.sd_;
}

void FactorFamily::eval_upto(int kmax, double x, std::span<double> out) const {
  if (kmax < 1) return;
  int top = max_index();
  if (top > 0 && kmax > top)
    throw ArgumentError(name() + " factor: index " + std::to_string(kmax) + " exceeds family size " +
                        std::to_string(top));
  switch (kind_) {
    case FactorKind::hermite: {
      double prev = 1.0, cur = x;
      out[0] = cur;
      for (int n = 1; n < kmax; ++n) {
        double next = (x * cur - std::sqrt(static_cast<double>(n)) * prev) / std::sqrt(n + 1.0);
        prev = cur;
        cur = next;
        out[n] = cur;
      }
      return;
    }
    case FactorKind::rademacher_sign: out[0] = x; return;
    case FactorKind::standardized_identity: out[0] = (x - mean_) / sd_; return;
    case FactorKind::centered_poisson_charlier: {
      const double n1 = x + 1.0;
      double prev = 1.0, cur = n1 - 1.0;
      out[0] = cur;
      for (int n = 1; n < kmax; ++n) {
        double next = ((n1 - n - 1.0) * cur - std::sqrt(static_cast<double>(n)) * prev) /
                      std::sqrt(n + 1.0);
        prev = cur;
        cur = next;
        out[n] = cur;
      }
      return;
    }
    case FactorKind::centered_exponential_poly: {
      const double e = x + 1.0;
      double prev = 1.0, cur = 1.0 - e;
      out[0] = -cur;
      for (int n = 1; n < kmax; ++n) {
        double next = ((2.0 * n + 1.0 - e) * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
        out[n] = (n + 1) % 2 ? -cur : cur;
      }
      return;
    }
    case FactorKind::tabulated: {
      std::size_t hi = std::upper_bound(nodes_.begin(), nodes_.end(), x) - nodes_.begin();
      for (int k = 0; k < kmax; ++k) {
        const auto& col = columns_[k];
        if (hi == 0) {
          out[k] = col.front();
        } else if (hi == nodes_.size()) {
          out[k] = col.back();
        } else {
          double t = (x - nodes_[hi - 1]) / (nodes_[hi] - nodes_[hi - 1]);
          out[k] = t == 0 ? col[hi - 1] : (1 - t) * col[hi - 1] + t * col[hi];
        }
      }
      return;
    }
  }
}

double FactorFamily::operator()(int k, double x) const {
  if (k < 1) throw ArgumentError("factor index must be >= 1");
  std::vector<double> buf(k);
  eval_upto(k, x, buf);
  return buf[k - 1];
}

std::vector<double> FactorFamily::breakpoints(int k) const {
  switch (kind_) {
    case FactorKind::hermite: return gauss_hermite_normal(k).nodes;
    case FactorKind::centered_exponential_poly: {
      auto r = gauss_laguerre(k).nodes;
      for (double& v : r) v -= 1.0;
      return r;
    }
    case FactorKind::standardized_identity: return {mean_};
    case FactorKind::rademacher_sign: return {0.0};
    default: return {};
  }
}

double factor_moment(const FactorFamily& family, int k, const AxisDistribution& axis, double p) {
  if (!(p > 0)) throw DomainError("factor_moment: p must be positive");
  std::vector<double> buf(k);
  auto bp = family.breakpoints(k);
  double lm = axis.log_expect_abs_pow(
      [&](double x) {
        family.eval_upto(k, x, buf);
        return buf[k - 1];
      },
      p, bp);
  double v = std::exp(lm / p);
  if (!std::isfinite(v))
    throw DomainError("factor_moment: |" + family.name() + "_" + std::to_string(k) + "|_" +
                      std::to_string(p) + " is not finite under " + axis.name());
  return v;
}

}  // namespace multisum
