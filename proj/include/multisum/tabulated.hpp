#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "multisum/kernel.hpp"
#include "multisum/quadrature.hpp"
#include "multisum/rosenthal.hpp"

namespace multisum {

// Two-variable kernel sampled on a product of discrete measures.
class TabulatedKernel {
 public:
  TabulatedKernel(QuadratureRule x, QuadratureRule y, Eigen::MatrixXd values);
  static TabulatedKernel from_function(QuadratureRule x, QuadratureRule y,
                                       const std::function<double(double, double)>& f);
  // min(x, y) on the n-point Gauss-Legendre rule of [0, 1].
  static TabulatedKernel brownian_min(int n);

  const QuadratureRule& x() const { return x_; }
  const QuadratureRule& y() const { return y_; }
  const Eigen::MatrixXd& values() const { return values_; }

  // f - E_x f - E_y f + E f: centred along both axes.
  TabulatedKernel double_centered() const;
  bool symmetric(double tol = 1e-12) const;
  std::string digest() const;

  // CSV: values grid (rows = x nodes); sidecar: axis,node,weight rows.
  void write_csv(const std::filesystem::path& grid, const std::filesystem::path& weights) const;
  static TabulatedKernel read_csv(const std::filesystem::path& grid,
                                  const std::filesystem::path& weights);

 private:
  QuadratureRule x_, y_;
  Eigen::MatrixXd values_;
};

// Weighted SVD: f(x_i, y_j) = sum_k s_k u_k(x_i) v_k(y_j) with u, v orthonormal
// under the node weights; columns of left/right hold u_k and v_k.
struct SpectralDecomposition {
  std::vector<double> singular_values;
  Eigen::MatrixXd left;
  Eigen::MatrixXd right;
  int numerical_rank = 0;
};

SpectralDecomposition spectral_decompose(const TabulatedKernel& tk);

struct DegenerateApproximation {
  DegenerateKernel z;
  double q = 0;               // quadrature L_p norm of f - Z_M
  double frobenius_tail = 0;  // sqrt(sum_{k>M} s_k^2)
  double trace_tail = 0;      // sum_{k>M} s_k
  bool surrogate = false;     // p != 2: SVD truncation is not the L_p argmin
  int rank_used = 0;
  std::string note;
};

DegenerateApproximation degenerate_approx(const TabulatedKernel& tk, int m, double p);
DegenerateApproximation degenerate_approx(const TabulatedKernel& tk,
                                          const SpectralDecomposition& sd, int m, double p);

// Tabulated kernel exposed to the W bound through SVD truncations.
class TabulatedApproximable final : public ApproximableKernel {
 public:
  explicit TabulatedApproximable(TabulatedKernel tk);
  int dimension() const override { return 2; }
  Approximation approximate(int m, double p) const override;
  std::string digest() const override { return tk_.digest(); }
  const SpectralDecomposition& decomposition() const { return sd_; }
  const TabulatedKernel& kernel() const { return tk_; }

 private:
  TabulatedKernel tk_;
  SpectralDecomposition sd_;
};

}  // namespace multisum
