#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "multisum/distributions.hpp"
#include "multisum/empirical.hpp"
#include "multisum/index_set.hpp"
#include "multisum/kernel.hpp"
#include "multisum/rng.hpp"

namespace multisum {

// Evaluates the per-key sums T[k] = sum_{c in L} prod_s g^{(s)}_{k_s}(x_s(c_s))
// for a fixed ordered key list; S_L = |L|^{-1/2} sum_k lambda(k) T[k].
// Rect sets factor as products of per-axis partial sums.
class SumEvaluator {
 public:
  SumEvaluator(std::vector<FactorFamily> factors, std::vector<std::vector<int>> keys,
               const IndexSet& L);
  SumEvaluator(const DegenerateKernel& kernel, const IndexSet& L);

  int dimension() const { return static_cast<int>(factors_.size()); }
  const std::vector<std::vector<int>>& keys() const { return keys_; }
  // Number of sample values needed on each axis.
  const std::vector<int>& coords_needed() const { return need_; }
  double inv_sqrt_card() const { return inv_sqrt_card_; }

  // Fills t (size = keys().size()).
  void key_sums(const std::vector<std::vector<double>>& samples, std::vector<double>& t) const;
  // |L|^{-1/2} sum_i weights[i] t[i], in key order.
  double contract(const std::vector<double>& weights, const std::vector<double>& t) const;

 private:
  std::vector<FactorFamily> factors_;
  std::vector<std::vector<int>> keys_;
  std::vector<int> kmax_;
  std::vector<int> need_;
  bool rect_ = false;
  std::vector<int> cells_;
  std::size_t card_ = 0;
  double inv_sqrt_card_ = 1;
};

// S_L for given per-axis samples (samples[s][i] is the variable at coordinate i+1).
double compute_S_L(const DegenerateKernel& kernel, const IndexSet& L,
                   const std::vector<std::vector<double>>& axis_samples);
// Direct cell-by-cell evaluation; reference for the factorized path.
double compute_S_L_naive(const DegenerateKernel& kernel, const IndexSet& L,
                         const std::vector<std::vector<double>>& axis_samples);

// Draws the axis samples of one replication.
void draw_axis_samples(const std::vector<AxisDistribution>& dists, const std::vector<int>& need,
                       const RngSpec& rng, std::uint64_t rep,
                       std::vector<std::vector<double>>& out);

// Runs body(rep) for rep in [0, n) on `workers` threads in contiguous chunks.
// body receives (first, last, worker index).
void parallel_chunks(std::uint64_t n, unsigned workers,
                     const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& body);

EmpiricalDist simulate_S_L(const DegenerateKernel& kernel, const IndexSet& L,
                           const std::vector<AxisDistribution>& dists, std::uint64_t n,
                           const RngSpec& rng, unsigned workers = 1);
// Content digests of the two sample batches above.
std::string simulation_digest(const DegenerateKernel& kernel, const IndexSet& L,
                              const std::vector<AxisDistribution>& dists, std::uint64_t n,
                              std::uint64_t seed);
std::string limit_digest(const std::vector<KernelTerm>& sorted_terms, int d, std::uint64_t n,
                         std::uint64_t seed);

// Uses the kernel's own axis laws.
EmpiricalDist simulate_S_L(const DegenerateKernel& kernel, const IndexSet& L, std::uint64_t n,
                           const RngSpec& rng, unsigned workers = 1);

// Standard normal beta^{(s)}(k), k = 1..kmax, for one replication of the limit.
void draw_limit_normals(const std::vector<int>& kmax, const RngSpec& rng, std::uint64_t rep,
                        std::vector<std::vector<double>>& beta);

// sum_k lambda(k) prod_s beta^{(s)}(k_s), fresh beta per replication.
EmpiricalDist sample_S_infty(const std::vector<KernelTerm>& lambda, int d, std::uint64_t n,
                             const RngSpec& rng, unsigned workers = 1);

}  // namespace multisum
