#include "multisum/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "multisum/errors.hpp"

namespace multisum {

double QuadratureRule::total_weight() const {
  double s = 0;
  for (double w : weights) s += w;
  return s;
}

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights are mu0
// times the squared first components of the eigenvectors.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                            double mu0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  const auto n = diag.size();
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    double v = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v * v;
  }
  return rule;
}

const QuadratureRule& legendre_reference(int n) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  QuadratureRule rule = golub_welsch(diag, off, 2.0);
  // Newton polish on P_n for full double accuracy of the nodes.
  for (int i = 0; i < n; ++i) {
    double x = rule.nodes[i];
    double dp = 1;
    for (int it2 = 0; it2 < 3; ++it2) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      x -= p1 / dp;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw ArgumentError("gauss_legendre: n must be >= 1");
  const QuadratureRule& ref = legendre_reference(n);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * ref.nodes[i];
    rule.weights[i] = half * ref.weights[i];
  }
  return rule;
}

QuadratureRule gauss_hermite_normal(int n) {
  if (n < 1) throw ArgumentError("gauss_hermite_normal: n must be >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(static_cast<double>(k));
  return golub_welsch(diag, off, 1.0);
}

QuadratureRule gauss_laguerre(int n) {
  if (n < 1) throw ArgumentError("gauss_laguerre: n must be >= 1");
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + 1.0;
  for (int k = 1; k < n; ++k) off(k - 1) = k;
  return golub_welsch(diag, off, 1.0);
}

double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, double max_panel, int order) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  const QuadratureRule& ref = legendre_reference(order);
  double total = 0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    double lo = cuts[s], hi = cuts[s + 1];
    if (!(hi > lo)) continue;
    int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_panel)));
    double h = (hi - lo) / panels;
    for (int j = 0; j < panels; ++j) {
      double pa = lo + j * h;
      double half = 0.5 * h, mid = pa + half;
      double acc = 0;
      for (int i = 0; i < order; ++i) acc += ref.weights[i] * f(mid + half * ref.nodes[i]);
      total += half * acc;
    }
  }
  return total;
}

}  // namespace multisum
