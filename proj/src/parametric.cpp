#include "multisum/parametric.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>

#include "multisum/digest.hpp"
#include "multisum/errors.hpp"
#include "multisum/rosenthal.hpp"
#include "multisum/simulate.hpp"

namespace multisum {

namespace {

std::vector<AxisDistribution> natural_axes_of(const std::vector<FactorFamily>& factors) {
  std::vector<AxisDistribution> axes;
  for (const auto& f : factors) axes.push_back(f.natural_axis());
  return axes;
}

}  // namespace

ParametricKernel::ParametricKernel(std::vector<std::vector<double>> grid,
                                   std::vector<FactorFamily> factors,
                                   std::vector<AxisDistribution> axes,
                                   const std::vector<ParametricEntry>& entries, bool orthonormal)
    : grid_(std::move(grid)), factors_(std::move(factors)), axes_(std::move(axes)),
      orthonormal_(orthonormal) {
  if (grid_.empty()) throw ArgumentError("ParametricKernel: parameter grid is empty");
  const int d = dimension();
  if (d < 1) throw ArgumentError("ParametricKernel: dimension must be >= 1");
  if (static_cast<int>(axes_.size()) != d)
    throw ArgumentError("ParametricKernel: need one axis law per factor family");
  std::map<std::vector<int>, std::size_t> index;
  for (const auto& e : entries) {
    if (e.v_index < 0 || static_cast<std::size_t>(e.v_index) >= grid_.size())
      throw ArgumentError("ParametricKernel: v_index " + std::to_string(e.v_index) +
                          " is off the grid");
    index.emplace(e.k, 0);
  }
  for (const auto& [k, q] : index) keys_.push_back(k);
  std::size_t q = 0;
  for (auto& [k, slot] : index) slot = q++;
  lambda_.assign(grid_.size(), std::vector<double>(keys_.size(), 0.0));
  std::vector<std::vector<bool>> seen(grid_.size(), std::vector<bool>(keys_.size(), false));
  for (const auto& e : entries) {
    std::size_t j = index.at(e.k);
    if (seen[e.v_index][j]) throw ArgumentError("ParametricKernel: duplicate (v, k) entry");
    seen[e.v_index][j] = true;
    lambda_[e.v_index][j] = e.w;
  }
  // Validates every slice (arity, index ranges, finiteness).
  for (std::size_t v = 0; v < grid_.size(); ++v) slice(v);
}

ParametricKernel::ParametricKernel(std::vector<std::vector<double>> grid,
                                   std::vector<FactorFamily> factors,
                                   const std::vector<ParametricEntry>& entries, bool orthonormal)
    : ParametricKernel(std::move(grid), factors, natural_axes_of(factors), entries, orthonormal) {}

std::size_t ParametricKernel::index_of(const std::vector<double>& coords) const {
  for (std::size_t v = 0; v < grid_.size(); ++v)
    if (grid_[v] == coords) return v;
  throw ArgumentError("point is not on the parameter grid");
}

DegenerateKernel ParametricKernel::slice(std::size_t v) const {
  if (v >= grid_.size()) throw ArgumentError("ParametricKernel::slice: index off the grid");
  std::vector<KernelTerm> terms;
  for (std::size_t q = 0; q < keys_.size(); ++q)
    if (lambda_[v][q] != 0.0) terms.push_back({keys_[q], lambda_[v][q]});
  return DegenerateKernel(factors_, axes_, std::move(terms), orthonormal_);
}

std::string ParametricKernel::digest() const {
  Digest h;
  h.add("parametric");
  for (const auto& f : factors_) h.add(f.name());
  for (const auto& a : axes_) h.add(a.name()).add(a.beta());
  for (std::size_t v = 0; v < grid_.size(); ++v) {
    for (double c : grid_[v]) h.add(c);
    for (std::size_t q = 0; q < keys_.size(); ++q) {
      for (int k : keys_[q]) h.add(k);
      h.add(lambda_[v][q]);
    }
  }
  h.add(orthonormal_ ? 1 : 0);
  return h.hex();
}

double sigma_lambda(const ParametricKernel& pk) {
  double best = 0;
  for (std::size_t v = 0; v < pk.size(); ++v) {
    double s = 0;
    for (double w : pk.weights(v)) s += std::fabs(w);
    best = std::max(best, s);
  }
  return best;
}

double rho_lambda(const ParametricKernel& pk, std::size_t v1, std::size_t v2) {
  if (v1 >= pk.size() || v2 >= pk.size())
    throw ArgumentError("rho_lambda: grid index out of range");
  const auto& a = pk.weights(v1);
  const auto& b = pk.weights(v2);
  double s = 0;
  for (std::size_t q = 0; q < a.size(); ++q) s += std::fabs(a[q] - b[q]);
  return s;
}

double rho_lambda(const ParametricKernel& pk, const std::vector<double>& v1,
                  const std::vector<double>& v2) {
  return rho_lambda(pk, pk.index_of(v1), pk.index_of(v2));
}

EntropyProfile EntropyProfile::from_counts(const std::vector<double>& eps,
                                           const std::vector<double>& n) {
  if (eps.size() != n.size()) throw ArgumentError("EntropyProfile: eps and N differ in length");
  EntropyProfile prof;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0 && eps[i] <= 1)) throw ArgumentError("EntropyProfile: eps must lie in (0, 1]");
    if (!(n[i] > 0)) throw ArgumentError("EntropyProfile: covering numbers must be positive");
    prof.rows.push_back({eps[i], n[i], std::log(n[i]), std::nan(""), false});
  }
  std::sort(prof.rows.begin(), prof.rows.end(),
            [](const EntropyRow& a, const EntropyRow& b) { return a.eps > b.eps; });
  return prof;
}

int greedy_cover(std::size_t n, const DistanceFn& dist, double eps) {
  if (n == 0) return 0;
  std::vector<double> mind(n);
  for (std::size_t i = 0; i < n; ++i) mind[i] = dist(0, i);
  int centers = 1;
  while (true) {
    std::size_t far = std::max_element(mind.begin(), mind.end()) - mind.begin();
    if (mind[far] <= eps) break;
    ++centers;
    for (std::size_t i = 0; i < n; ++i) mind[i] = std::min(mind[i], dist(far, i));
  }
  return centers;
}

namespace {

bool cover_search(const std::vector<std::uint32_t>& masks, std::uint32_t full,
                  std::uint32_t covered, int left) {
  if (covered == full) return true;
  if (left == 0) return false;
  int u = std::countr_one(covered);
  for (std::size_t c = 0; c < masks.size(); ++c)
    if ((masks[c] >> u) & 1u)
      if (cover_search(masks, full, covered | masks[c], left - 1)) return true;
  return false;
}

}  // namespace

int exact_min_cover(std::size_t n, const DistanceFn& dist, double eps) {
  if (n == 0) return 0;
  if (n > 20) throw ArgumentError("exact_min_cover: exhaustive search limited to 20 points");
  std::vector<std::uint32_t> masks(n, 0);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = 0; i < n; ++i)
      if (dist(c, i) <= eps) masks[c] |= 1u << i;
  const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1);
  for (int k = 1; k <= static_cast<int>(n); ++k)
    if (cover_search(masks, full, 0, k)) return k;
  return static_cast<int>(n);
}

EntropyProfile covering_profile(std::size_t n, const DistanceFn& dist,
                                const std::vector<double>& eps_grid, double scale) {
  if (n == 0) throw ArgumentError("covering_profile: empty grid");
  if (!(scale > 0)) throw ArgumentError("covering_profile: scale must be positive");
  DistanceFn scaled = [&](std::size_t i, std::size_t j) { return scale * dist(i, j); };
  EntropyProfile prof;
  for (double eps : eps_grid) {
    if (!(eps > 0 && eps <= 1)) throw ArgumentError("covering_profile: eps must lie in (0, 1]");
    EntropyRow row;
    row.eps = eps;
    row.greedy = greedy_cover(n, scaled, eps);
    row.exact = n <= 20;
    row.n = row.exact ? exact_min_cover(n, scaled, eps) : row.greedy;
    row.h = std::log(row.n);
    prof.rows.push_back(row);
  }
  std::sort(prof.rows.begin(), prof.rows.end(),
            [](const EntropyRow& a, const EntropyRow& b) { return a.eps > b.eps; });
  return prof;
}

EntropyProfile covering_profile(const ParametricKernel& pk, const std::vector<double>& eps_grid,
                                double scale) {
  const std::size_t n = pk.size();
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = rho_lambda(pk, i, j);
  return covering_profile(n, [&](std::size_t i, std::size_t j) { return d[i * n + j]; }, eps_grid,
                          scale);
}

double fit_entropy_exponent(const EntropyProfile& profile, double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& r : profile.rows) {
    if (r.eps < lo || r.eps > hi) continue;
    double x = -std::log(r.eps), y = std::log(r.n);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::nan("");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

namespace {

// int_0^1 f over a profile given ascending eps; piecewise power-law between
// grid points, power-law extrapolation below the smallest eps, constant above
// the largest.
EntropyIntegral integrate_profile(const std::vector<double>& eps, const std::vector<double>& f) {
  EntropyIntegral out;
  const std::size_t m = eps.size();
  if (m == 0) throw ArgumentError("entropy integral: empty profile");
  for (double v : f)
    if (!std::isfinite(v)) {
      out.value = kInfinity;
      out.divergent = true;
      return out;
    }
  double total = 0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    double a = eps[i], b = eps[i + 1], fa = f[i], fb = f[i + 1];
    if (!(fa > 0 && fb > 0)) {
      total += 0.5 * (fa + fb) * (b - a);
      continue;
    }
    double s = std::log(fb / fa) / std::log(b / a) + 1.0;
    double r = b / a;
    total += std::fabs(s) < 1e-12 ? fa * a * std::log(r) : fa * a / s * (std::pow(r, s) - 1.0);
  }
  if (eps.back() < 1) total += f.back() * (1.0 - eps.back());
  // Tail below the smallest eps: f ~ eps^{-s} fitted on the lowest points.
  std::size_t k = std::min<std::size_t>(m, std::max<std::size_t>(2, m / 4));
  double s = 0;
  if (k >= 2 && f[0] > 0) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < k; ++i) {
      double x = std::log(eps[i]), y = std::log(f[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    s = -(k * sxy - sx * sy) / (k * sxx - sx * sx);
    if (!std::isfinite(s)) s = 0;
  }
  out.tail_exponent = s;
  if (s >= 1.0 - 1e-9) {
    out.value = kInfinity;
    out.divergent = true;
    return out;
  }
  total += f[0] * eps[0] / (1.0 - s);
  out.value = total;
  return out;
}

void ascending(const EntropyProfile& profile, std::vector<double>& eps, std::vector<double>& h) {
  eps.clear();
  h.clear();
  for (auto it = profile.rows.rbegin(); it != profile.rows.rend(); ++it) {
    eps.push_back(it->eps);
    h.push_back(it->h);
  }
  for (std::size_t i = 1; i < eps.size(); ++i)
    if (!(eps[i] > eps[i - 1])) throw ArgumentError("entropy integral: eps grid has duplicates");
}

}  // namespace

EntropyIntegral entropy_integral_power(const EntropyProfile& profile, double p) {
  if (!(p >= 2)) throw DomainError("entropy_integral_power: p must be >= 2");
  std::vector<double> eps, h;
  ascending(profile, eps, h);
  std::vector<double> f(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) f[i] = std::exp(h[i] / p);
  return integrate_profile(eps, f);
}

double entropy_w(const PsiFunction& tau, double x) {
  const double b = tau.support_upper();
  double y_lo = (std::isinf(b) ? 0.0 : 1.0 / b) + 1e-9;
  double y_hi = std::min(1.0, 1.0 / tau.support_lower());
  if (!(y_hi > y_lo)) throw DomainError("entropy_w: tau support does not meet [1, b)");
  auto g = [&](double y) {
    try {
      return x * y + tau.log_value(1.0 / y);
    } catch (const DomainError&) {
      return kInfinity;
    }
  };
  const int n = 512;
  std::vector<double> ys(n);
  int best = 0;
  double fbest = kInfinity;
  for (int i = 0; i < n; ++i) {
    ys[i] = y_lo * std::pow(y_hi / y_lo, static_cast<double>(i) / (n - 1));
    double v = g(ys[i]);
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  double a = ys[std::max(0, best - 1)], c = ys[std::min(n - 1, best + 1)];
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = c - phi * (c - a), x2 = a + phi * (c - a);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 200 && c - a > 1e-14 * c; ++it) {
    if (f1 < f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - phi * (c - a);
      f1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (c - a);
      f2 = g(x2);
    }
  }
  return std::min({fbest, f1, f2});
}

EntropyIntegral entropy_integral_exp(const EntropyProfile& profile, const PsiFunction& tau) {
  std::vector<double> eps, h;
  ascending(profile, eps, h);
  std::vector<double> f(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) f[i] = std::exp(entropy_w(tau, h[i]));
  return integrate_profile(eps, f);
}

EmpiricalDist FieldSample::marginal(std::size_t v) const {
  return EmpiricalDist(paths.at(v), digests.at(v), seed);
}

EmpiricalDist FieldSample::sup_dist() const {
  Digest h;
  h.add("sup");
  for (const auto& d : digests) h.add(d);
  return EmpiricalDist(sup, h.hex(), seed);
}

FieldSample simulate_Q_L(const ParametricKernel& pk, const IndexSet& L,
                         const std::vector<AxisDistribution>& dists, std::uint64_t n,
                         const RngSpec& rng, unsigned workers) {
  if (n < 1) throw ArgumentError("simulate_Q_L: N must be >= 1");
  if (static_cast<int>(dists.size()) != pk.dimension())
    throw ArgumentError("simulate_Q_L: need one axis law per kernel axis");
  SumEvaluator ev(pk.factors(), pk.keys(), L);
  const std::size_t nv = pk.size();
  FieldSample fs;
  fs.seed = rng.seed;
  fs.paths.assign(nv, std::vector<double>(n));
  fs.sup.assign(n, 0.0);
  parallel_chunks(n, workers, [&](std::uint64_t first, std::uint64_t last, unsigned) {
    std::vector<std::vector<double>> samples;
    std::vector<double> t;
    for (std::uint64_t r = first; r < last; ++r) {
      draw_axis_samples(dists, ev.coords_needed(), rng, r, samples);
      ev.key_sums(samples, t);
      double m = 0;
      for (std::size_t v = 0; v < nv; ++v) {
        double q = ev.contract(pk.weights(v), t);
        fs.paths[v][r] = q;
        m = std::max(m, std::fabs(q));
      }
      fs.sup[r] = m;
    }
  });
  for (std::size_t v = 0; v < nv; ++v)
    fs.digests.push_back(simulation_digest(pk.slice(v), L, dists, n, rng.seed));
  return fs;
}

FieldSample sample_Q_infty(const ParametricKernel& pk, std::uint64_t n, const RngSpec& rng,
                           unsigned workers) {
  if (n < 1) throw ArgumentError("sample_Q_infty: N must be >= 1");
  const int d = pk.dimension();
  std::vector<int> kmax(d, 0);
  for (const auto& k : pk.keys())
    for (int s = 0; s < d; ++s) kmax[s] = std::max(kmax[s], k[s]);
  const std::size_t nv = pk.size();
  FieldSample fs;
  fs.seed = rng.seed;
  fs.paths.assign(nv, std::vector<double>(n));
  fs.sup.assign(n, 0.0);
  parallel_chunks(n, workers, [&](std::uint64_t first, std::uint64_t last, unsigned) {
    std::vector<std::vector<double>> beta;
    for (std::uint64_t r = first; r < last; ++r) {
      draw_limit_normals(kmax, rng, r, beta);
      double m = 0;
      for (std::size_t v = 0; v < nv; ++v) {
        const auto& w = pk.weights(v);
        double s = 0;
        for (std::size_t q = 0; q < w.size(); ++q) {
          if (w[q] == 0.0) continue;
          double prod = w[q];
          for (int a = 0; a < d; ++a) prod *= beta[a][pk.keys()[q][a] - 1];
          s += prod;
        }
        fs.paths[v][r] = s;
        m = std::max(m, std::fabs(s));
      }
      fs.sup[r] = m;
    }
  });
  for (std::size_t v = 0; v < nv; ++v)
    fs.digests.push_back(limit_digest(pk.slice(v).terms(), d, n, rng.seed));
  return fs;
}

Estimate empirical_covariance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw ArgumentError("empirical_covariance: need two paired samples of size >= 2");
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double c = 0, c2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double z = (a[i] - ma) * (b[i] - mb);
    c += z;
    c2 += z * z;
  }
  c /= n;
  double var = std::max(0.0, c2 / n - c * c);
  return {c, std::sqrt(var / n)};
}

ParametricReport check_parametric_nclt(const ParametricKernel& pk, const ParametricLevel& level,
                                       const std::vector<AxisDistribution>& dists,
                                       const std::vector<IndexSet>& family, const RngSpec& rng,
                                       const ParametricOptions& opts) {
  if (!pk.orthonormal())
    throw PreconditionError("parametric NCLT check needs orthonormal slices");
  if (family.empty()) throw ArgumentError("parametric NCLT check: empty index-set family");
  if (static_cast<int>(dists.size()) != pk.dimension())
    throw ArgumentError("parametric NCLT check: need one axis law per kernel axis");
  const std::size_t nv = pk.size();
  for (std::size_t v = 0; v < nv; ++v)
    if (!(pk.slice(v).sum_sq_weights() > 0))
      throw PreconditionError("parametric NCLT check: slice " + std::to_string(v) +
                              " has zero variance");
  const int d = pk.dimension();
  const VerifyOptions& vo = opts.verify;

  ParametricReport rep;
  rep.p = level.kind == ParametricLevel::Kind::power ? level.p : 2.0;
  rep.level = level.kind == ParametricLevel::Kind::power ? "power" : "exponential";
  rep.sigma = sigma_lambda(pk);
  rep.g = 1;
  for (int s = 0; s < d; ++s) {
    int kmax = 0;
    for (const auto& k : pk.keys()) kmax = std::max(kmax, k[s]);
    double best = 0;
    for (int k = 1; k <= kmax; ++k)
      best = std::max(best, factor_moment(pk.factors()[s], k, dists[s], rep.p));
    rep.g *= best;
  }
  const double kd = std::pow(rosenthal_K(rep.p), d);
  std::vector<double> eps = opts.eps_grid;
  if (eps.empty())
    for (int i = 0; i < 48; ++i) eps.push_back(std::pow(10.0, -3.0 + 3.0 * i / 47.0));
  if (level.kind == ParametricLevel::Kind::power) {
    rep.scale = kd * rep.g;
    rep.profile = covering_profile(pk, eps, rep.scale);
    rep.integral = entropy_integral_power(rep.profile, rep.p);
    rep.hypotheses_met = std::isfinite(rep.g) && !rep.integral.divergent;
  } else {
    if (!level.tau) throw ArgumentError("exponential level needs tau");
    rep.scale = 1;
    rep.profile = covering_profile(pk, eps, 1.0);
    rep.integral = entropy_integral_exp(rep.profile, *level.tau);
    rep.hypotheses_met = std::isfinite(rep.sigma) && !rep.integral.divergent;
  }
  rep.majorant = kd * rep.g * rep.sigma + opts.budget * rep.integral.value;

  FieldSample limit = sample_Q_infty(pk, vo.n_limit, rng.derive(1), vo.workers);
  rep.per_point.resize(nv);
  std::vector<EmpiricalDist> limit_marg;
  for (std::size_t v = 0; v < nv; ++v) {
    limit_marg.push_back(limit.marginal(v));
    rep.per_point[v].family = "v=" + std::to_string(v);
    rep.per_point[v].sigma2 = pk.slice(v).sum_sq_weights();
    rep.per_point[v].limit_variance = empirical_variance(limit_marg.back());
    rep.per_point[v].variance_consistent = true;
  }
  rep.sup_ok = true;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& L = family[i];
    auto rp = rect_pair(L);
    FieldSample fs = simulate_Q_L(pk, L, dists, vo.n, rng.derive(1000 + i), vo.workers);
    SupMomentRow row;
    row.cardinality = L.cardinality();
    row.moment = empirical_moment(std::span<const double>(fs.sup), rep.p);
    if (row.moment.value > rep.majorant + 3.0 * row.moment.standard_error) rep.sup_ok = false;
    rep.sup_moments.push_back(row);
    for (std::size_t v = 0; v < nv; ++v) {
      EmpiricalDist m = fs.marginal(v);
      KsStage st;
      st.label = "stage=" + std::to_string(i + 1);
      st.cardinality = L.cardinality();
      st.kappa_minus = rp.kappa_minus;
      st.kappa_plus = rp.kappa_plus;
      st.inner_min_side = rp.inner.min_side();
      st.outer_min_side = rp.outer.min_side();
      st.ks = ks_distance(m, limit_marg[v]);
      st.variance = empirical_variance(m);
      auto& pr = rep.per_point[v];
      double se = std::hypot(st.variance.standard_error, pr.limit_variance.standard_error);
      if (std::fabs(st.variance.value - pr.limit_variance.value) > 3.0 * se)
        pr.variance_consistent = false;
      pr.stages.push_back(st);
    }
  }
  bool ks_all = true;
  for (auto& pr : rep.per_point) {
    summarize_stages(pr, vo);
    ks_all = ks_all && pr.ks_verdict == Verdict::pass;
  }
  if (!rep.hypotheses_met)
    rep.verdict = Verdict::hypotheses_not_met;
  else
    rep.verdict = ks_all && rep.sup_ok ? Verdict::pass : Verdict::fail;
  return rep;
}

ParametricKernel holder_rotation_kernel(int n, double theta) {
  if (n < 1) throw ArgumentError("holder_rotation_kernel: need at least one grid point");
  std::vector<std::vector<double>> grid;
  std::vector<ParametricEntry> entries;
  for (int i = 0; i < n; ++i) {
    double v = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    grid.push_back({v});
    entries.push_back({i, {1, 1}, std::cos(theta * v)});
    entries.push_back({i, {1, 2}, std::sin(theta * v)});
  }
  return ParametricKernel(grid, {FactorFamily::hermite(), FactorFamily::hermite()}, entries, true);
}

}  // namespace multisum
