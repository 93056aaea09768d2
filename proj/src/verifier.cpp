#include "multisum/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "multisum/errors.hpp"
#include "multisum/rosenthal.hpp"
#include "multisum/simulate.hpp"

namespace multisum {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::hypotheses_not_met: return "hypotheses_not_met";
  }
  return "unknown";
}

namespace {

void check_nclt_preconditions(const DegenerateKernel& kernel,
                              const std::vector<AxisDistribution>& dists) {
  if (!kernel.orthonormal())
    throw PreconditionError("NCLT verification needs a kernel flagged orthonormal");
  if (!(kernel.sum_sq_weights() > 0))
    throw PreconditionError("NCLT verification needs sum lambda^2 > 0 (degenerate limit)");
  if (static_cast<int>(dists.size()) != kernel.dimension())
    throw ArgumentError("NCLT verification: need one axis law per kernel axis");
}

ConvergenceReport run_pipeline(const DegenerateKernel& kernel,
                               const std::vector<AxisDistribution>& dists,
                               const std::vector<IndexSet>& sets,
                               const std::vector<std::string>& labels, const RngSpec& rng,
                               const VerifyOptions& opts) {
  ConvergenceReport rep;
  rep.sigma2 = kernel.sum_sq_weights();
  EmpiricalDist limit =
      sample_S_infty(kernel.terms(), kernel.dimension(), opts.n_limit, rng.derive(1), opts.workers);
  rep.limit_variance = empirical_variance(limit);
  rep.variance_consistent = true;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& L = sets[i];
    auto rp = rect_pair(L);
    EmpiricalDist s = simulate_S_L(kernel, L, dists, opts.n, rng.derive(1000 + i), opts.workers);
    KsStage st;
    st.label = labels[i];
    st.cardinality = L.cardinality();
    st.kappa_minus = rp.kappa_minus;
    st.kappa_plus = rp.kappa_plus;
    st.inner_min_side = rp.inner.min_side();
    st.outer_min_side = rp.outer.min_side();
    st.ks = ks_distance(s, limit);
    st.variance = empirical_variance(s);
    double se = std::hypot(st.variance.standard_error, rep.limit_variance.standard_error);
    if (std::fabs(st.variance.value - rep.limit_variance.value) > 3.0 * se)
      rep.variance_consistent = false;
    rep.stages.push_back(st);
  }
  summarize_stages(rep, opts);
  return rep;
}

}  // namespace

void summarize_stages(ConvergenceReport& rep, const VerifyOptions& opts) {
  rep.ks_threshold = opts.ks_threshold;
  rep.noise_budget = 2.0 * ks_critical(opts.n, opts.n_limit);
  rep.ks_nonincreasing = true;
  for (std::size_t i = 1; i < rep.stages.size(); ++i)
    if (rep.stages[i].ks > rep.stages[i - 1].ks + rep.noise_budget) rep.ks_nonincreasing = false;
  rep.final_below_threshold = !rep.stages.empty() && rep.stages.back().ks <= opts.ks_threshold;
  rep.ks_verdict =
      rep.ks_nonincreasing && rep.final_below_threshold ? Verdict::pass : Verdict::fail;
  rep.verdict = rep.ks_verdict;
}

ConvergenceReport verify_rect_nclt(const DegenerateKernel& kernel,
                                   const std::vector<AxisDistribution>& dists,
                                   const std::vector<int>& sizes, const RngSpec& rng,
                                   const VerifyOptions& opts) {
  check_nclt_preconditions(kernel, dists);
  if (sizes.empty()) throw ArgumentError("verify_rect_nclt: empty size list");
  std::vector<IndexSet> sets;
  std::vector<std::string> labels;
  for (int n : sizes) {
    sets.push_back(cube(kernel.dimension(), n));
    labels.push_back("n=" + std::to_string(n));
  }
  auto rep = run_pipeline(kernel, dists, sets, labels, rng, opts);
  rep.family = "rect";
  return rep;
}

ConvergenceReport verify_irregular_nclt(const DegenerateKernel& kernel,
                                        const std::vector<AxisDistribution>& dists,
                                        const std::vector<IndexSet>& family, const RngSpec& rng,
                                        const VerifyOptions& opts,
                                        const std::string& family_name) {
  check_nclt_preconditions(kernel, dists);
  if (family.empty()) throw ArgumentError("verify_irregular_nclt: empty family");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < family.size(); ++i)
    labels.push_back("stage=" + std::to_string(i + 1));
  auto rep = run_pipeline(kernel, dists, family, labels, rng, opts);
  rep.family = family_name;
  rep.conditions = nclt_condition_report(family, opts.kappa_threshold);
  rep.verdict = rep.conditions->any_met() ? rep.ks_verdict : Verdict::hypotheses_not_met;
  return rep;
}

double fit_p_over_log_exponent(const std::vector<double>& p, const std::vector<double>& value,
                               double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < lo - 1e-12 || p[i] > hi + 1e-12 || !(value[i] > 0)) continue;
    double x = std::log(p[i] / std::log(p[i])), y = std::log(value[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::nan("");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SandwichReport verify_moment_sandwich(const DegenerateKernel& kernel,
                                      const std::vector<AxisDistribution>& dists,
                                      const std::vector<IndexSet>& l_list,
                                      const std::vector<double>& p_grid, const RngSpec& rng,
                                      const VerifyOptions& opts,
                                      std::optional<ShapeFitRequest> shape) {
  if (l_list.empty() || p_grid.empty())
    throw ArgumentError("verify_moment_sandwich: need index sets and a p-grid");
  const int d = kernel.dimension();
  DegenerateKernel k = kernel.with_axes(dists);
  SandwichReport rep;
  rep.rank_one = k.terms().size() == 1;

  auto lower_at = [&](double p) {
    if (!rep.rank_one) return std::nan("");
    const auto& t = k.terms().front();
    double v = std::fabs(t.w);
    for (int s = 0; s < d; ++s) v *= factor_moment(k.factors()[s], t.k[s], k.axes()[s], p);
    return v;
  };
  auto upper_at = [&](double p) { return std::pow(rosenthal_K(p), d) * dp_quasinorm(k, p); };

  std::vector<EmpiricalDist> sims;
  for (std::size_t i = 0; i < l_list.size(); ++i)
    sims.push_back(simulate_S_L(k, l_list[i], dists, opts.n, rng.derive(2000 + i), opts.workers));

  rep.pass = true;
  for (double p : p_grid) {
    SandwichRow row;
    row.p = p;
    row.lower = lower_at(p);
    row.upper = upper_at(p);
    row.empirical = {-1, 0};
    for (std::size_t i = 0; i < sims.size(); ++i) {
      auto e = empirical_moment(sims[i], p);
      if (e.value > row.empirical.value) {
        row.empirical = e;
        row.argmax_cardinality = l_list[i].cardinality();
      }
    }
    const double slack = 3.0 * row.empirical.standard_error;
    row.lower_ok = std::isnan(row.lower) || row.lower <= row.empirical.value + slack + 1e-12;
    row.upper_ok = row.empirical.value <= row.upper + slack + 1e-12;
    rep.pass = rep.pass && row.lower_ok && row.upper_ok;
    rep.rows.push_back(row);
  }

  if (shape && rep.rank_one) {
    std::vector<double> qp, lower, upper;
    for (int i = 0; i <= 8; ++i) {
      double p = shape->p_lo * std::pow(shape->p_hi / shape->p_lo, i / 8.0);
      qp.push_back(p);
      lower.push_back(lower_at(p));
      upper.push_back(upper_at(p));
    }
    auto add_fit = [&](const std::string& name, const std::vector<double>& p,
                       const std::vector<double>& v, double expected) {
      ShapeFit f;
      f.name = name;
      f.p_lo = shape->p_lo;
      f.p_hi = shape->p_hi;
      f.expected_exponent = expected;
      f.fitted_exponent = fit_p_over_log_exponent(p, v, shape->p_lo, shape->p_hi);
      f.relative_deviation = std::fabs(f.fitted_exponent - expected) / expected;
      f.within_tolerance = f.relative_deviation <= shape->tolerance;
      rep.shape_fits.push_back(f);
    };
    add_fit("lower_quadrature_S1", qp, lower, d);
    add_fit("upper_klesov", qp, upper, 2.0 * d);
    // Empirical |S_1|_p, when a singleton is among the tested sets.
    for (std::size_t i = 0; i < l_list.size(); ++i)
      if (l_list[i].cardinality() == 1) {
        std::vector<double> ep, ev;
        for (double p : p_grid) {
          ep.push_back(p);
          ev.push_back(empirical_moment(sims[i], p).value);
        }
        add_fit("empirical_S1", ep, ev, d);
        break;
      }
  }
  return rep;
}

PsiFunction kernel_composite_psi(const DegenerateKernel& kernel,
                                 const std::vector<double>& p_grid) {
  if (p_grid.empty() || p_grid.front() < 2.0)
    throw DomainError("kernel_composite_psi: p-grid must be nonempty and start at p >= 2");
  std::vector<PsiFunction> factors;
  for (int s = 0; s < kernel.dimension(); ++s) {
    std::vector<double> vals;
    for (double p : p_grid) {
      double best = 0;
      for (int k = 1; k <= kernel.max_index(s); ++k)
        best = std::max(best, factor_moment(kernel.factors()[s], k, kernel.axes()[s], p));
      vals.push_back(best);
    }
    for (std::size_t i = 1; i < vals.size(); ++i) vals[i] = std::max(vals[i], vals[i - 1]);
    factors.push_back(natural_psi(MomentCurve(p_grid, vals)));
  }
  return compose_psi_product(factors, kernel.dimension());
}

TailDominationReport verify_tail_domination(const DegenerateKernel& kernel,
                                            const std::vector<AxisDistribution>& dists,
                                            const std::vector<IndexSet>& l_list,
                                            const PsiFunction& psi_composite, double gls_norm,
                                            const RngSpec& rng, const VerifyOptions& opts,
                                            std::optional<double> log_weibull_beta) {
  if (l_list.empty()) throw ArgumentError("verify_tail_domination: empty index-set list");
  TailDominationReport rep;
  rep.gls_norm = gls_norm;
  TailBound tb{gls_norm, psi_composite};
  rep.threshold = tb.threshold();

  std::vector<EmpiricalDist> sims;
  double ymax = 0;
  for (std::size_t i = 0; i < l_list.size(); ++i) {
    sims.push_back(simulate_S_L(kernel, l_list[i], dists, opts.n, rng.derive(3000 + i), opts.workers));
    ymax = std::max({ymax, std::fabs(sims.back().values().front()),
                     std::fabs(sims.back().values().back())});
  }
  const int ny = 400;
  std::vector<double> ys(ny), bounds(ny);
  for (int j = 0; j < ny; ++j) {
    ys[j] = std::expm1(std::log1p(ymax) * j / (ny - 1));
    bounds[j] = tail_bound_eval(tb, ys[j]);
  }
  const double floor = 10.0 / opts.n;
  rep.pass = true;
  for (std::size_t i = 0; i < sims.size(); ++i) {
    TailSetSummary sum;
    sum.cardinality = l_list[i].cardinality();
    for (int j = 0; j < ny; ++j) {
      double emp = empirical_tail(sims[i], ys[j]);
      if (emp < floor) continue;
      ++sum.checked;
      sum.worst_ratio = std::max(sum.worst_ratio, emp / bounds[j]);
      if (emp > bounds[j]) ++sum.violations;
    }
    rep.checked += sum.checked;
    rep.violations += sum.violations;
    rep.sets.push_back(sum);
  }
  rep.pass = rep.violations == 0;

  // Growth exponent of the composite psi on its upper half (ln psi vs ln p).
  {
    double lo = psi_composite.support_lower(), hi = psi_composite.support_upper();
    if (std::isinf(hi)) hi = lo * 64;
    double a = std::sqrt(lo * hi);
    rep.fitted_growth_exponent =
        (psi_composite.log_value(hi) - psi_composite.log_value(a)) / std::log(hi / a);
  }

  if (log_weibull_beta) {
    TailEnvelope env;
    env.exponent = 1.0 + 1.0 / *log_weibull_beta;
    env.c_upper = kInfinity;
    env.c_lower = 0;
    for (int j = 0; j < ny; ++j) {
      double l = std::pow(std::log1p(ys[j]), env.exponent);
      if (ys[j] >= rep.threshold && bounds[j] > 0 && bounds[j] < 1)
        env.c_upper = std::min(env.c_upper, -std::log(bounds[j]) / l);
    }
    // Lower envelope from the singleton (or first) set.
    std::size_t idx = 0;
    for (std::size_t i = 0; i < l_list.size(); ++i)
      if (l_list[i].cardinality() == 1) idx = i;
    for (int j = 1; j < ny; ++j) {
      double emp = empirical_tail(sims[idx], ys[j]);
      if (emp < floor) continue;
      double l = std::pow(std::log1p(ys[j]), env.exponent);
      env.c_lower = std::max(env.c_lower, -std::log(emp) / l);
    }
    env.confirmed = std::isfinite(env.c_upper) && env.c_upper > 0 && env.c_lower > 0;
    rep.envelope = env;
  }
  return rep;
}

}  // namespace multisum
