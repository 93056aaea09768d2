#include "multisum/psi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "multisum/errors.hpp"
#include "multisum/rosenthal.hpp"

namespace multisum {

struct PsiFunction::Rep {
  PsiFamily family = PsiFamily::power_log;
  std::vector<double> params;
  std::vector<PsiFunction> children;
  std::vector<double> tab_p, tab_v, tab_logv;
  double lower = 1.0;
  double upper = kInfinity;
  bool closed = false;
};

namespace {

constexpr double kE = std::numbers::e;

std::string fmt(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

PsiFunction PsiFunction::power_log(double m, double r) {
  if (!(m > 0) || !std::isfinite(r)) throw ArgumentError("power_log: need m > 0 and finite r");
  auto rep = std::make_shared<Rep>();
  rep->family = PsiFamily::power_log;
  rep->params = {m, r};
  return PsiFunction(rep);
}

PsiFunction PsiFunction::extremal(double r) {
  if (!(r > 1)) throw ArgumentError("extremal: need r > 1");
  auto rep = std::make_shared<Rep>();
  rep->family = PsiFamily::extremal;
  rep->params = {r};
  rep->upper = r;
  rep->closed = true;
  return PsiFunction(rep);
}

PsiFunction PsiFunction::bounded_support(double b, double gamma, double r) {
  if (!(b > 1) || !std::isfinite(b) || !(gamma > -1))
    throw ArgumentError("bounded_support: need finite b > 1 and gamma > -1");
  auto rep = std::make_shared<Rep>();
  rep->family = PsiFamily::bounded_support;
  rep->params = {b, gamma, r};
  rep->upper = b;
  rep->closed = false;
  return PsiFunction(rep);
}

PsiFunction PsiFunction::exp_power(double beta, double c) {
  if (!(beta > 0) || !(c > 0)) throw ArgumentError("exp_power: need beta > 0 and C > 0");
  auto rep = std::make_shared<Rep>();
  rep->family = PsiFamily::exp_power;
  rep->params = {beta, c};
  return PsiFunction(rep);
}

PsiFunction PsiFunction::product_of(std::vector<PsiFunction> factors) {
  if (factors.empty()) throw ArgumentError("product_of: empty factor list");
  auto rep = std::make_shared<Rep>();
  rep->family = PsiFamily::product_of;
  rep->lower = 1.0;
  rep->upper = kInfinity;
  rep->closed = false;
  for (const auto& f : factors) {
    rep->lower = std::max(rep->lower, f.support_lower());
    if (f.support_upper() < rep->upper) {
      rep->upper = f.support_upper();
      rep->closed = f.upper_closed();
    } else if (f.support_upper() == rep->upper) {
      rep->closed = rep->closed && f.upper_closed();
    }
  }
  if (std::isinf(rep->upper)) rep->closed = false;
  if (rep->lower > rep->upper || (rep->lower == rep->upper && !rep->closed))
    throw DomainError("product_of: supports have empty intersection");
  rep->children = std::move(factors);
  return PsiFunction(rep);
}

PsiFunction PsiFunction::rosenthal_scaled(PsiFunction base, int d) {
  if (d < 0) throw ArgumentError("rosenthal_scaled: d must be >= 0");
  auto rep = std::make_shared<Rep>();
  rep->family = PsiFamily::rosenthal_scaled;
  rep->params = {static_cast<double>(d)};
  rep->lower = base.support_lower();
  rep->upper = base.support_upper();
  rep->closed = base.upper_closed();
  rep->children = {std::move(base)};
  return PsiFunction(rep);
}

PsiFunction PsiFunction::tabulated(std::vector<double> p, std::vector<double> values) {
  if (p.empty() || p.size() != values.size())
    throw ArgumentError("tabulated psi: p-grid and values must be nonempty and of equal length");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(values[i] > 0) || !std::isfinite(values[i]))
      throw ArgumentError("tabulated psi: values must be finite and positive");
    if (i > 0 && !(p[i] > p[i - 1]))
      throw ArgumentError("tabulated psi: p-grid must be strictly ascending");
  }
  if (!(p.front() >= 1.0)) throw ArgumentError("tabulated psi: p-grid must start at p >= 1");
  auto rep = std::make_shared<Rep>();
  rep->family = PsiFamily::tabulated;
  rep->lower = p.front();
  rep->upper = p.back();
  rep->closed = true;
  for (double v : values) rep->tab_logv.push_back(std::log(v));
  rep->tab_p = std::move(p);
  rep->tab_v = std::move(values);
  return PsiFunction(rep);
}

PsiFamily PsiFunction::family() const { return rep_->family; }

std::string PsiFunction::family_name() const {
  switch (rep_->family) {
    case PsiFamily::power_log: return "power_log";
    case PsiFamily::extremal: return "extremal";
    case PsiFamily::bounded_support: return "bounded_support";
    case PsiFamily::exp_power: return "exp_power";
    case PsiFamily::product_of: return "product_of";
    case PsiFamily::rosenthal_scaled: return "rosenthal_scaled";
    case PsiFamily::tabulated: return "tabulated";
  }
  return "unknown";
}

const std::vector<double>& PsiFunction::params() const { return rep_->params; }
const std::vector<PsiFunction>& PsiFunction::children() const { return rep_->children; }
const std::vector<double>& PsiFunction::table_p() const { return rep_->tab_p; }
const std::vector<double>& PsiFunction::table_values() const { return rep_->tab_v; }
double PsiFunction::support_lower() const { return rep_->lower; }
double PsiFunction::support_upper() const { return rep_->upper; }
bool PsiFunction::upper_closed() const { return rep_->closed; }

bool PsiFunction::in_support(double p) const {
  if (std::isnan(p)) return false;
  const double tol = 1e-12 * std::max(1.0, std::fabs(p));
  if (p < rep_->lower - tol) return false;
  if (rep_->closed) return p <= rep_->upper + tol;
  return p < rep_->upper;
}

std::string PsiFunction::support_string() const {
  return "[" + fmt(rep_->lower) + ", " + fmt(rep_->upper) + (rep_->closed ? "]" : ")");
}

double PsiFunction::log_value(double p) const {
  if (!in_support(p))
    throw DomainError(family_name() + ": p = " + fmt(p) + " is outside the support " +
                      support_string());
  const auto& P = rep_->params;
  switch (rep_->family) {
    case PsiFamily::power_log: {
      double v = std::log(p) / P[0];
      if (P[1] != 0) v -= P[1] * std::log(std::log(p + kE - 1.0));
      return v;
    }
    case PsiFamily::extremal: return 0.0;
    case PsiFamily::bounded_support: {
      double b = P[0], gamma = P[1], r = P[2];
      double gap = b - p;
      double v = -(gamma + 1.0) / b * std::log(gap);
      if (r != 0) v += r / b * std::log(std::log(1.0 / gap + kE));
      return v;
    }
    case PsiFamily::exp_power: return P[1] * std::pow(p, P[0]);
    case PsiFamily::product_of: {
      double v = 0;
      for (const auto& c : rep_->children) v += c.log_value(p);
      return v;
    }
    case PsiFamily::rosenthal_scaled: {
      double d = P[0];
      double k = p >= 2.0 ? rosenthal_K(p) : 1.0;
      return d * std::log(k) + rep_->children[0].log_value(p);
    }
    case PsiFamily::tabulated: {
      const auto& tp = rep_->tab_p;
      const auto& lv = rep_->tab_logv;
      if (tp.size() == 1 || p <= tp.front()) return lv.front();
      if (p >= tp.back()) return lv.back();
      std::size_t hi = std::upper_bound(tp.begin(), tp.end(), p) - tp.begin();
      double t = (p - tp[hi - 1]) / (tp[hi] - tp[hi - 1]);
      return (1 - t) * lv[hi - 1] + t * lv[hi];
    }
  }
  return 0.0;
}

double PsiFunction::operator()(double p) const {
  const double lv = log_value(p);  // also the support check
  switch (rep_->family) {
    case PsiFamily::power_log:
      if (rep_->params[1] == 0) return std::pow(p, 1.0 / rep_->params[0]);
      break;
    case PsiFamily::extremal: return 1.0;
    case PsiFamily::tabulated: {
      const auto& tp = rep_->tab_p;
      auto it = std::find(tp.begin(), tp.end(), p);
      if (it != tp.end()) return rep_->tab_v[it - tp.begin()];
      break;
    }
    default: break;
  }
  return std::exp(lv);
}

double eval_psi(const PsiFunction& psi, double p) { return psi(p); }

MomentCurve::MomentCurve(std::vector<double> p, std::vector<double> values,
                         std::vector<double> standard_errors)
    : p_(std::move(p)), values_(std::move(values)), se_(std::move(standard_errors)) {
  if (p_.size() != values_.size())
    throw ArgumentError("MomentCurve: p-grid and values differ in length");
  if (!se_.empty() && se_.size() != p_.size())
    throw ArgumentError("MomentCurve: standard errors differ in length");
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (!(p_[i] >= 1.0)) throw ArgumentError("MomentCurve: p must be >= 1");
    if (!(values_[i] >= 0) || !std::isfinite(values_[i]))
      throw ArgumentError("MomentCurve: values must be finite and nonnegative");
    if (i > 0) {
      if (!(p_[i] > p_[i - 1])) throw ArgumentError("MomentCurve: p-grid must be strictly ascending");
      if (values_[i] < values_[i - 1] * (1.0 - 1e-9))
        throw ArgumentError("MomentCurve: values must be nondecreasing in p");
    }
  }
}

double gls_norm(const MomentCurve& curve, const PsiFunction& psi) {
  if (curve.size() == 0) throw ArgumentError("gls_norm: empty moment curve");
  double best = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    double v = curve.values()[i];
    double lp = psi.log_value(curve.p()[i]);
    double ratio = v > 0 ? std::exp(std::log(v) - lp) : 0.0;
    best = std::max(best, ratio);
  }
  return best;
}

PsiFunction natural_psi(const MomentCurve& curve) {
  return PsiFunction::tabulated(curve.p(), curve.values());
}

namespace {

// Objective x p - p ln psi(p).
double yf_objective(const PsiFunction& psi, double x, double p) {
  return x * p - p * psi.log_value(p);
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

double golden_max(const PsiFunction& psi, double x, double a, double b, double& arg) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = yf_objective(psi, x, c), fd = yf_objective(psi, x, d);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::fabs(b)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = yf_objective(psi, x, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = yf_objective(psi, x, d);
    }
  }
  if (fc > fd) {
    arg = c;
    return fc;
  }
  arg = d;
  return fd;
}

}  // namespace

ConjugateResult young_fenchel_detail(const PsiFunction& psi, double x, const ConjugateOptions& o) {
  const double lo = psi.support_lower();
  const double b = psi.support_upper();
  const int n = std::max(o.grid_points, 8);
  std::vector<double> grid;
  bool unbounded = std::isinf(b);

  if (unbounded) {
    double hi = std::max(o.default_upper, lo * 10.0);
    grid = log_grid(lo, hi, n);
    const double per_decade = (n - 1) / std::log10(hi / lo);
    // Extend by decades while the best point sits at the top edge.
    while (true) {
      std::size_t best = 0;
      double fbest = -kInfinity;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        double f = yf_objective(psi, x, grid[i]);
        if (f > fbest) {
          fbest = f;
          best = i;
        }
      }
      if (best + 1 < grid.size()) break;
      if (grid.back() >= o.extension_cap) {
        // Increasing over the last decade at the cap: divergent sup.
        double top = grid.back();
        if (yf_objective(psi, x, top) > yf_objective(psi, x, top / 10.0))
          return {kInfinity, top, true};
        break;
      }
      double from = grid.back();
      int extra = static_cast<int>(std::ceil(per_decade));
      for (int i = 1; i <= extra; ++i) grid.push_back(from * std::pow(10.0, double(i) / extra));
    }
  } else {
    const double span = b - lo;
    if (span <= 0) {
      double f = yf_objective(psi, x, lo);
      return {f, lo, false};
    }
    // Log-spaced in p plus points clustered toward b.
    grid = log_grid(lo, b, n / 2);
    if (!psi.upper_closed()) grid.pop_back();
    for (int i = 1; i <= n / 2; ++i) {
      double p = b - span * std::pow(10.0, -14.0 * i / (n / 2));
      if (psi.in_support(p) && p > lo) grid.push_back(p);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }

  std::size_t best = 0;
  double fbest = -kInfinity;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double f = yf_objective(psi, x, grid[i]);
    if (f > fbest) {
      fbest = f;
      best = i;
    }
  }
  ConjugateResult res{fbest, grid[best], false};
  double a = grid[best == 0 ? 0 : best - 1];
  double c = grid[best + 1 < grid.size() ? best + 1 : best];
  if (c > a) {
    double arg;
    double f = golden_max(psi, x, a, c, arg);
    if (f > res.value) {
      res.value = f;
      res.argmax = arg;
    }
  }
  return res;
}

double young_fenchel(const PsiFunction& psi, double x, const ConjugateOptions& opts) {
  return young_fenchel_detail(psi, x, opts).value;
}

double TailBound::threshold() const { return std::numbers::e * gls_norm; }

double tail_bound_eval(const TailBound& tb, double y, const ConjugateOptions& opts) {
  if (y < 0 || std::isnan(y)) throw ArgumentError("tail_bound_eval: y must be >= 0");
  if (!(tb.gls_norm > 0)) throw ArgumentError("tail_bound_eval: gls_norm must be positive");
  if (y < tb.threshold()) return 1.0;
  double v = young_fenchel(tb.psi, std::log(y / tb.gls_norm), opts);
  if (std::isinf(v)) return 0.0;
  return std::min(1.0, std::exp(-v));
}

PsiFunction compose_psi_product(const std::vector<PsiFunction>& factors, int rosenthal_power) {
  if (factors.empty()) throw ArgumentError("compose_psi_product: empty factor list");
  if (rosenthal_power < 0) throw ArgumentError("compose_psi_product: d must be >= 0");
  PsiFunction base = factors.size() == 1 ? factors.front() : PsiFunction::product_of(factors);
  if (rosenthal_power == 0) return base;
  return PsiFunction::rosenthal_scaled(base, rosenthal_power);
}

}  // namespace multisum
