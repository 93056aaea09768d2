#include "multisum/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "multisum/digest.hpp"
#include "multisum/errors.hpp"

namespace multisum {

namespace {

std::vector<std::vector<int>> kernel_keys(const DegenerateKernel& kernel) {
  std::vector<std::vector<int>> keys;
  for (const auto& t : kernel.terms()) keys.push_back(t.k);
  return keys;
}

std::vector<double> kernel_weights(const DegenerateKernel& kernel) {
  std::vector<double> w;
  for (const auto& t : kernel.terms()) w.push_back(t.w);
  return w;
}

}  // namespace

SumEvaluator::SumEvaluator(std::vector<FactorFamily> factors, std::vector<std::vector<int>> keys,
                           const IndexSet& L)
    : factors_(std::move(factors)), keys_(std::move(keys)) {
  const int d = dimension();
  if (L.dimension() != d)
    throw ArgumentError("index set dimension " + std::to_string(L.dimension()) +
                        " does not match kernel dimension " + std::to_string(d));
  kmax_.assign(d, 0);
  for (const auto& k : keys_)
    for (int s = 0; s < d; ++s) kmax_[s] = std::max(kmax_[s], k[s]);
  need_ = L.max_coords();
  rect_ = L.kind() == IndexKind::rect;
  card_ = L.cardinality();
  inv_sqrt_card_ = 1.0 / std::sqrt(static_cast<double>(card_));
  if (!rect_) cells_ = L.flat_cells();
}

SumEvaluator::SumEvaluator(const DegenerateKernel& kernel, const IndexSet& L)
    : SumEvaluator(kernel.factors(), kernel_keys(kernel), L) {}

void SumEvaluator::key_sums(const std::vector<std::vector<double>>& samples,
                            std::vector<double>& t) const {
  const int d = dimension();
  if (static_cast<int>(samples.size()) != d)
    throw ArgumentError("compute_S_L: need one sample array per axis");
  for (int s = 0; s < d; ++s)
    if (static_cast<int>(samples[s].size()) < need_[s])
      throw ArgumentError("compute_S_L: axis " + std::to_string(s + 1) + " has " +
                          std::to_string(samples[s].size()) + " samples but L uses coordinate " +
                          std::to_string(need_[s]));
  std::vector<FactorTable> tab(d);
  for (int s = 0; s < d; ++s)
    tab[s] = tabulate_factors(factors_[s], kmax_[s],
                              std::span<const double>(samples[s].data(), need_[s]));
  t.assign(keys_.size(), 0.0);
  if (rect_) {
    // Per-axis partial sums A_s[k] = sum_i g_k(x_i).
    std::vector<std::vector<double>> a(d);
    for (int s = 0; s < d; ++s) {
      a[s].assign(kmax_[s], 0.0);
      for (int k = 1; k <= kmax_[s]; ++k) {
        double acc = 0;
        for (int i = 0; i < need_[s]; ++i) acc += tab[s].at(k, i);
        a[s][k - 1] = acc;
      }
    }
    for (std::size_t q = 0; q < keys_.size(); ++q) {
      double prod = 1;
      for (int s = 0; s < d; ++s) prod *= a[s][keys_[q][s] - 1];
      t[q] = prod;
    }
    return;
  }
  if (d == 2) {
    // Group cells by first coordinate: T[k] += g1_{k1}(x_i) * sum_j g2_{k2}(y_j).
    std::vector<double> row(kmax_[1]);
    std::size_t c = 0;
    while (c < card_) {
      int i = cells_[2 * c];
      std::fill(row.begin(), row.end(), 0.0);
      for (; c < card_ && cells_[2 * c] == i; ++c) {
        int j = cells_[2 * c + 1] - 1;
        for (int k = 1; k <= kmax_[1]; ++k) row[k - 1] += tab[1].at(k, j);
      }
      for (std::size_t q = 0; q < keys_.size(); ++q)
        t[q] += tab[0].at(keys_[q][0], i - 1) * row[keys_[q][1] - 1];
    }
    return;
  }
  for (std::size_t c = 0; c < card_; ++c) {
    const int* cell = &cells_[c * d];
    for (std::size_t q = 0; q < keys_.size(); ++q) {
      double prod = 1;
      for (int s = 0; s < d; ++s) prod *= tab[s].at(keys_[q][s], cell[s] - 1);
      t[q] += prod;
    }
  }
}

double SumEvaluator::contract(const std::vector<double>& weights,
                              const std::vector<double>& t) const {
  double s = 0;
  for (std::size_t q = 0; q < t.size(); ++q) s += weights[q] * t[q];
  return s * inv_sqrt_card_;
}

double compute_S_L(const DegenerateKernel& kernel, const IndexSet& L,
                   const std::vector<std::vector<double>>& axis_samples) {
  SumEvaluator ev(kernel, L);
  std::vector<double> t;
  ev.key_sums(axis_samples, t);
  return ev.contract(kernel_weights(kernel), t);
}

double compute_S_L_naive(const DegenerateKernel& kernel, const IndexSet& L,
                         const std::vector<std::vector<double>>& axis_samples) {
  const int d = kernel.dimension();
  if (L.dimension() != d) throw ArgumentError("compute_S_L_naive: dimension mismatch");
  auto cells = L.flat_cells();
  std::vector<double> x(d);
  double s = 0;
  for (std::size_t c = 0; c < L.cardinality(); ++c) {
    for (int a = 0; a < d; ++a) {
      int coord = cells[c * d + a];
      if (coord > static_cast<int>(axis_samples[a].size()))
        throw ArgumentError("compute_S_L_naive: coordinate out of sample range");
      x[a] = axis_samples[a][coord - 1];
    }
    s += eval_kernel(kernel, x);
  }
  return s / std::sqrt(static_cast<double>(L.cardinality()));
}

void draw_axis_samples(const std::vector<AxisDistribution>& dists, const std::vector<int>& need,
                       const RngSpec& rng, std::uint64_t rep,
                       std::vector<std::vector<double>>& out) {
  out.resize(dists.size());
  for (std::size_t s = 0; s < dists.size(); ++s) {
    out[s].resize(need[s]);
    for (int i = 0; i < need[s]; ++i)
      out[s][i] = dists[s].sample(rng, rep, static_cast<std::uint32_t>(s),
                                  static_cast<std::uint32_t>(i));
  }
}

void parallel_chunks(std::uint64_t n, unsigned workers,
                     const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& body) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    body(0, n, 0);
    return;
  }
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    std::uint64_t first = n * w / workers, last = n * (w + 1) / workers;
    pool.emplace_back([&, first, last, w] {
      try {
        body(first, last, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

EmpiricalDist simulate_S_L(const DegenerateKernel& kernel, const IndexSet& L,
                           const std::vector<AxisDistribution>& dists, std::uint64_t n,
                           const RngSpec& rng, unsigned workers) {
  if (n < 1) throw ArgumentError("simulate_S_L: N must be >= 1");
  if (static_cast<int>(dists.size()) != kernel.dimension())
    throw ArgumentError("simulate_S_L: need one axis law per kernel axis");
  SumEvaluator ev(kernel, L);
  const auto weights = kernel_weights(kernel);
  std::vector<double> out(n);
  parallel_chunks(n, workers, [&](std::uint64_t first, std::uint64_t last, unsigned) {
    std::vector<std::vector<double>> samples;
    std::vector<double> t;
    for (std::uint64_t r = first; r < last; ++r) {
      draw_axis_samples(dists, ev.coords_needed(), rng, r, samples);
      ev.key_sums(samples, t);
      out[r] = ev.contract(weights, t);
    }
  });
  return EmpiricalDist(std::move(out), simulation_digest(kernel, L, dists, n, rng.seed), rng.seed);
}

std::string simulation_digest(const DegenerateKernel& kernel, const IndexSet& L,
                              const std::vector<AxisDistribution>& dists, std::uint64_t n,
                              std::uint64_t seed) {
  Digest h;
  h.add("S_L").add(kernel.digest()).add(L.digest());
  for (const auto& a : dists) h.add(a.name()).add(a.beta());
  h.add(n).add(seed);
  return h.hex();
}

std::string limit_digest(const std::vector<KernelTerm>& sorted_terms, int d, std::uint64_t n,
                         std::uint64_t seed) {
  Digest h;
  h.add("S_inf").add(d);
  for (const auto& t : sorted_terms) {
    for (int k : t.k) h.add(k);
    h.add(t.w);
  }
  h.add(n).add(seed);
  return h.hex();
}

EmpiricalDist simulate_S_L(const DegenerateKernel& kernel, const IndexSet& L, std::uint64_t n,
                           const RngSpec& rng, unsigned workers) {
  return simulate_S_L(kernel, L, kernel.axes(), n, rng, workers);
}

void draw_limit_normals(const std::vector<int>& kmax, const RngSpec& rng, std::uint64_t rep,
                        std::vector<std::vector<double>>& beta) {
  static const AxisDistribution normal = AxisDistribution::standard_normal();
  beta.resize(kmax.size());
  for (std::size_t s = 0; s < kmax.size(); ++s) {
    beta[s].resize(kmax[s]);
    for (int k = 1; k <= kmax[s]; ++k) {
      auto u = rng.uniforms(rep, Stream::limit, static_cast<std::uint32_t>(s),
                            static_cast<std::uint32_t>(k));
      beta[s][k - 1] = normal.from_uniforms(u[0], u[1]);
    }
  }
}

EmpiricalDist sample_S_infty(const std::vector<KernelTerm>& lambda, int d, std::uint64_t n,
                             const RngSpec& rng, unsigned workers) {
  if (n < 1) throw ArgumentError("sample_S_infty: N must be >= 1");
  if (d < 1) throw ArgumentError("sample_S_infty: d must be >= 1");
  std::vector<KernelTerm> terms = lambda;
  std::sort(terms.begin(), terms.end(),
            [](const KernelTerm& a, const KernelTerm& b) { return a.k < b.k; });
  std::vector<int> kmax(d, 0);
  for (const auto& t : terms) {
    if (static_cast<int>(t.k.size()) != d) throw ArgumentError("sample_S_infty: key arity != d");
    for (int s = 0; s < d; ++s) {
      if (t.k[s] < 1) throw ArgumentError("sample_S_infty: indices are 1-based");
      kmax[s] = std::max(kmax[s], t.k[s]);
    }
  }
  std::vector<double> out(n);
  parallel_chunks(n, workers, [&](std::uint64_t first, std::uint64_t last, unsigned) {
    std::vector<std::vector<double>> beta;
    for (std::uint64_t r = first; r < last; ++r) {
      draw_limit_normals(kmax, rng, r, beta);
      double s = 0;
      for (const auto& t : terms) {
        double prod = t.w;
        for (int a = 0; a < d; ++a) prod *= beta[a][t.k[a] - 1];
        s += prod;
      }
      out[r] = s;
    }
  });
  return EmpiricalDist(std::move(out), limit_digest(terms, d, n, rng.seed), rng.seed);
}

}  // namespace multisum
