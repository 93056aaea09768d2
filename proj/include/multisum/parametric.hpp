#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "multisum/empirical.hpp"
#include "multisum/index_set.hpp"
#include "multisum/kernel.hpp"
#include "multisum/psi.hpp"
#include "multisum/rng.hpp"
#include "multisum/verifier.hpp"

namespace multisum {

struct ParametricEntry {
  int v_index = 0;
  std::vector<int> k;
  double w = 0;
};

// lambda(v, k) over a finite grid V; every slice is a DegenerateKernel on the
// shared factor families and axis laws.
class ParametricKernel {
 public:
  ParametricKernel() = default;
  ParametricKernel(std::vector<std::vector<double>> grid, std::vector<FactorFamily> factors,
                   std::vector<AxisDistribution> axes, const std::vector<ParametricEntry>& entries,
                   bool orthonormal);
  // Axis laws default to the natural law of each family.
  ParametricKernel(std::vector<std::vector<double>> grid, std::vector<FactorFamily> factors,
                   const std::vector<ParametricEntry>& entries, bool orthonormal);

  std::size_t size() const { return grid_.size(); }
  int dimension() const { return static_cast<int>(factors_.size()); }
  const std::vector<std::vector<double>>& grid() const { return grid_; }
  // Union of keys over V, sorted.
  const std::vector<std::vector<int>>& keys() const { return keys_; }
  // weights(v)[q] = lambda(v, keys()[q]).
  const std::vector<double>& weights(std::size_t v) const { return lambda_.at(v); }
  const std::vector<FactorFamily>& factors() const { return factors_; }
  const std::vector<AxisDistribution>& axes() const { return axes_; }
  bool orthonormal() const { return orthonormal_; }

  // Grid index of a point given by coordinates; ArgumentError when off grid.
  std::size_t index_of(const std::vector<double>& coords) const;
  DegenerateKernel slice(std::size_t v) const;
  std::string digest() const;

 private:
  std::vector<std::vector<double>> grid_;
  std::vector<FactorFamily> factors_;
  std::vector<AxisDistribution> axes_;
  std::vector<std::vector<int>> keys_;
  std::vector<std::vector<double>> lambda_;
  bool orthonormal_ = false;
};

double sigma_lambda(const ParametricKernel& pk);
double rho_lambda(const ParametricKernel& pk, std::size_t v1, std::size_t v2);
double rho_lambda(const ParametricKernel& pk, const std::vector<double>& v1,
                  const std::vector<double>& v2);

struct EntropyRow {
  double eps = 1;
  double n = 1;       // covering number used downstream (real-valued for analytic profiles)
  double h = 0;       // ln n
  double greedy = 1;  // farthest-point count, NaN for analytic profiles
  bool exact = false;
};

// Rows sorted by descending eps.
struct EntropyProfile {
  std::vector<EntropyRow> rows;
  static EntropyProfile from_counts(const std::vector<double>& eps, const std::vector<double>& n);
};

using DistanceFn = std::function<double(std::size_t, std::size_t)>;

// Minimal number of centers in V covering V within eps (exhaustive; n <= 20 points).
int exact_min_cover(std::size_t n, const DistanceFn& dist, double eps);
// Farthest-point covering started at point 0.
int greedy_cover(std::size_t n, const DistanceFn& dist, double eps);

// Covering numbers of V under scale * dist. Exact counts when |V| <= 20,
// greedy counts (an upper bound) otherwise.
EntropyProfile covering_profile(std::size_t n, const DistanceFn& dist,
                                const std::vector<double>& eps_grid, double scale = 1.0);
EntropyProfile covering_profile(const ParametricKernel& pk, const std::vector<double>& eps_grid,
                                double scale = 1.0);

// Slope of ln N against ln(1/eps) over rows with eps in [lo, hi].
double fit_entropy_exponent(const EntropyProfile& profile, double lo, double hi);

struct EntropyIntegral {
  double value = 0;
  double tail_exponent = 0;  // fitted integrand exponent near eps = 0
  bool divergent = false;
};

// int_0^1 N(eps)^{1/p} d eps.
EntropyIntegral entropy_integral_power(const EntropyProfile& profile, double p);
// w(x) = inf_{y in (1/b, 1]} (x y + ln tau(1/y)).
double entropy_w(const PsiFunction& tau, double x);
// int_0^1 exp(w(H(eps))) d eps.
EntropyIntegral entropy_integral_exp(const EntropyProfile& profile, const PsiFunction& tau);

// Replications of the field Q_L(v), v in V, on shared axis samples.
struct FieldSample {
  std::vector<std::vector<double>> paths;  // paths[v][rep]
  std::vector<double> sup;                 // max_v |Q(v)| per rep
  std::vector<std::string> digests;
  std::uint64_t seed = 0;
  EmpiricalDist marginal(std::size_t v) const;
  EmpiricalDist sup_dist() const;
};

FieldSample simulate_Q_L(const ParametricKernel& pk, const IndexSet& L,
                         const std::vector<AxisDistribution>& dists, std::uint64_t n,
                         const RngSpec& rng, unsigned workers = 1);
// Q_inf(v) = sum_k lambda(v, k) prod_s beta^{(s)}(k_s) with one beta array per replication.
FieldSample sample_Q_infty(const ParametricKernel& pk, std::uint64_t n, const RngSpec& rng,
                           unsigned workers = 1);

// Sample covariance of paired draws with its standard error.
Estimate empirical_covariance(const std::vector<double>& a, const std::vector<double>& b);

struct ParametricLevel {
  enum class Kind { power, exponential } kind = Kind::power;
  double p = 2;
  std::optional<PsiFunction> tau;
  static ParametricLevel power(double p) { return {Kind::power, p, std::nullopt}; }
  static ParametricLevel exponential(PsiFunction tau) { return {Kind::exponential, 2, tau}; }
};

struct ParametricOptions {
  VerifyOptions verify;
  std::vector<double> eps_grid;  // empty: 48 log-spaced points on [1e-3, 1]
  double budget = 1.0;           // multiplies the entropy integral in the majorant
};

struct SupMomentRow {
  std::uint64_t cardinality = 0;
  Estimate moment;  // |sup_v |Q_L(v)||_p
};

struct ParametricReport {
  std::string level;
  double p = 2;
  double sigma = 0;
  double g = 0;      // prod_s max_k |g_k|_p
  double scale = 1;  // K^d G for the power level, 1 for the exponential level
  EntropyProfile profile;
  EntropyIntegral integral;
  bool hypotheses_met = false;
  double majorant = 0;
  std::vector<SupMomentRow> sup_moments;
  bool sup_ok = false;
  std::vector<ConvergenceReport> per_point;  // one KS pipeline per grid point
  Verdict verdict = Verdict::fail;
};

ParametricReport check_parametric_nclt(const ParametricKernel& pk, const ParametricLevel& level,
                                       const std::vector<AxisDistribution>& dists,
                                       const std::vector<IndexSet>& family, const RngSpec& rng,
                                       const ParametricOptions& opts = {});

// lambda(v, (1,1)) = cos(theta v), lambda(v, (1,2)) = sin(theta v) on n equispaced v in [0, 1],
// Hermite factors: orthonormal slices, Lipschitz in v.
ParametricKernel holder_rotation_kernel(int n, double theta);

}  // namespace multisum
