#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "multisum/empirical.hpp"
#include "multisum/index_set.hpp"
#include "multisum/kernel.hpp"
#include "multisum/psi.hpp"
#include "multisum/rng.hpp"

namespace multisum {

enum class Verdict { pass, fail, hypotheses_not_met };
std::string verdict_name(Verdict v);

struct VerifyOptions {
  std::uint64_t n = 20000;         // replications per stage
  std::uint64_t n_limit = 100000;  // replications of the limit law
  double ks_threshold = 0.05;
  double kappa_threshold = 0.1;
  unsigned workers = 1;
};

struct KsStage {
  std::string label;
  std::uint64_t cardinality = 0;
  double kappa_minus = 0, kappa_plus = 0;
  int inner_min_side = 0, outer_min_side = 0;
  double ks = 0;
  Estimate variance;
};

struct ConvergenceReport {
  std::string family;
  std::vector<KsStage> stages;
  double sigma2 = 0;
  Estimate limit_variance;
  double noise_budget = 0;
  double ks_threshold = 0.05;
  bool ks_nonincreasing = false;
  bool final_below_threshold = false;
  bool variance_consistent = false;
  std::optional<ConditionReport> conditions;
  Verdict ks_verdict = Verdict::fail;
  Verdict verdict = Verdict::fail;
};

// Fills the KS flags and verdicts of a report whose stages are already set.
void summarize_stages(ConvergenceReport& rep, const VerifyOptions& opts);

// S_L on n x ... x n boxes against S_infinity.
ConvergenceReport verify_rect_nclt(const DegenerateKernel& kernel,
                                   const std::vector<AxisDistribution>& dists,
                                   const std::vector<int>& sizes, const RngSpec& rng,
                                   const VerifyOptions& opts = {});

// Same pipeline on an arbitrary family; verdict gated by the condition report.
ConvergenceReport verify_irregular_nclt(const DegenerateKernel& kernel,
                                        const std::vector<AxisDistribution>& dists,
                                        const std::vector<IndexSet>& family, const RngSpec& rng,
                                        const VerifyOptions& opts = {},
                                        const std::string& family_name = "irregular");

struct SandwichRow {
  double p = 2;
  double lower = 0;  // |lambda| prod |g|_p for rank-one kernels, NaN otherwise
  Estimate empirical;
  std::uint64_t argmax_cardinality = 0;
  double upper = 0;  // K^d D_p
  bool lower_ok = true, upper_ok = true;
};

struct ShapeFit {
  std::string name;
  double p_lo = 0, p_hi = 0;
  double fitted_exponent = 0;
  double expected_exponent = 0;
  double relative_deviation = 0;
  bool within_tolerance = false;
};

struct SandwichReport {
  std::vector<SandwichRow> rows;
  bool rank_one = false;
  bool pass = false;
  std::vector<ShapeFit> shape_fits;
};

struct ShapeFitRequest {
  double p_lo = 4, p_hi = 16;
  double tolerance = 0.10;
};

SandwichReport verify_moment_sandwich(const DegenerateKernel& kernel,
                                      const std::vector<AxisDistribution>& dists,
                                      const std::vector<IndexSet>& l_list,
                                      const std::vector<double>& p_grid, const RngSpec& rng,
                                      const VerifyOptions& opts = {},
                                      std::optional<ShapeFitRequest> shape = std::nullopt);

// Slope of ln(value) against ln(p / ln p) by least squares over p in [lo, hi].
double fit_p_over_log_exponent(const std::vector<double>& p, const std::vector<double>& value,
                               double lo, double hi);

struct TailSetSummary {
  std::uint64_t cardinality = 0;
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_ratio = 0;  // max empirical / bound over checked points
};

struct TailEnvelope {
  double exponent = 0;   // 1 + 1/beta
  double c_upper = 0;    // bound <= exp(-c_upper [ln(1+y)]^exponent)
  double c_lower = 0;    // empirical >= exp(-c_lower [ln(1+y)]^exponent), touching once
  bool confirmed = false;
};

struct TailDominationReport {
  double gls_norm = 1;
  double threshold = 0;
  std::vector<TailSetSummary> sets;
  std::size_t violations = 0;
  std::size_t checked = 0;
  double fitted_growth_exponent = 0;  // slope of ln psi vs ln p on the composite
  std::optional<TailEnvelope> envelope;
  bool pass = false;
};

// Composite psi of the kernel: K^d prod_s psi_s with psi_s(p) = max_k |g^{(s)}_k|_p,
// tabulated on the p-grid (which must start at p >= 2).
PsiFunction kernel_composite_psi(const DegenerateKernel& kernel, const std::vector<double>& p_grid);

TailDominationReport verify_tail_domination(const DegenerateKernel& kernel,
                                            const std::vector<AxisDistribution>& dists,
                                            const std::vector<IndexSet>& l_list,
                                            const PsiFunction& psi_composite, double gls_norm,
                                            const RngSpec& rng, const VerifyOptions& opts = {},
                                            std::optional<double> log_weibull_beta = std::nullopt);

}  // namespace multisum
