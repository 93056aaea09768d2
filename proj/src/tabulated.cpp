#include "multisum/tabulated.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "multisum/digest.hpp"
#include "multisum/errors.hpp"

namespace multisum {

namespace {

void check_rule(const QuadratureRule& r, const char* axis) {
  if (r.nodes.empty() || r.nodes.size() != r.weights.size())
    throw ArgumentError(std::string("TabulatedKernel: empty or ragged ") + axis + " grid");
  for (double w : r.weights)
    if (!(w > 0)) throw ArgumentError("TabulatedKernel: weights must be positive");
  if (std::fabs(r.total_weight() - 1.0) > 1e-9)
    throw ArgumentError(std::string("TabulatedKernel: ") + axis + " weights must sum to 1");
  for (std::size_t i = 1; i < r.nodes.size(); ++i)
    if (!(r.nodes[i] > r.nodes[i - 1]))
      throw ArgumentError("TabulatedKernel: nodes must be strictly ascending");
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TabulatedKernel::TabulatedKernel(QuadratureRule x, QuadratureRule y, Eigen::MatrixXd values)
    : x_(std::move(x)), y_(std::move(y)), values_(std::move(values)) {
  check_rule(x_, "x");
  check_rule(y_, "y");
  if (values_.rows() != static_cast<Eigen::Index>(x_.size()) ||
      values_.cols() != static_cast<Eigen::Index>(y_.size()))
    throw ArgumentError("TabulatedKernel: value grid does not match the node counts");
}

TabulatedKernel TabulatedKernel::from_function(QuadratureRule x, QuadratureRule y,
                                               const std::function<double(double, double)>& f) {
  Eigen::MatrixXd v(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) v(i, j) = f(x.nodes[i], y.nodes[j]);
  return TabulatedKernel(std::move(x), std::move(y), std::move(v));
}

TabulatedKernel TabulatedKernel::brownian_min(int n) {
  if (n < 1) throw ArgumentError("brownian_min: n must be >= 1");
  QuadratureRule r = gauss_legendre(n, 0.0, 1.0);
  return from_function(r, r, [](double a, double b) { return std::min(a, b); });
}

TabulatedKernel TabulatedKernel::double_centered() const {
  Eigen::Map<const Eigen::VectorXd> wx(x_.weights.data(), x_.size());
  Eigen::Map<const Eigen::VectorXd> wy(y_.weights.data(), y_.size());
  Eigen::VectorXd row_mean = values_ * wy;              // E_y f(x_i, .)
  Eigen::RowVectorXd col_mean = wx.transpose() * values_;  // E_x f(., y_j)
  double total = wx.dot(row_mean);
  Eigen::MatrixXd c = values_;
  c.colwise() -= row_mean;
  c.rowwise() -= col_mean;
  c.array() += total;
  return TabulatedKernel(x_, y_, std::move(c));
}

bool TabulatedKernel::symmetric(double tol) const {
  if (x_.nodes != y_.nodes) return false;
  return (values_ - values_.transpose()).cwiseAbs().maxCoeff() <=
         tol * std::max(1.0, values_.cwiseAbs().maxCoeff());
}

std::string TabulatedKernel::digest() const {
  Digest h;
  h.add("tabulated_kernel");
  for (double v : x_.nodes) h.add(v);
  for (double v : x_.weights) h.add(v);
  for (double v : y_.nodes) h.add(v);
  for (double v : y_.weights) h.add(v);
  for (Eigen::Index i = 0; i < values_.rows(); ++i)
    for (Eigen::Index j = 0; j < values_.cols(); ++j) h.add(values_(i, j));
  return h.hex();
}

void TabulatedKernel::write_csv(const std::filesystem::path& grid,
                                const std::filesystem::path& weights) const {
  std::ofstream g(grid);
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) g << (j ? "," : "") << g17(values_(i, j));
    g << '\n';
  }
  std::ofstream w(weights);
  w << "axis,node,weight\n";
  for (std::size_t i = 0; i < x_.size(); ++i)
    w << "x," << g17(x_.nodes[i]) << ',' << g17(x_.weights[i]) << '\n';
  for (std::size_t j = 0; j < y_.size(); ++j)
    w << "y," << g17(y_.nodes[j]) << ',' << g17(y_.weights[j]) << '\n';
}

TabulatedKernel TabulatedKernel::read_csv(const std::filesystem::path& grid,
                                          const std::filesystem::path& weights) {
  std::ifstream w(weights);
  if (!w) throw ArgumentError("cannot read " + weights.string());
  QuadratureRule x, y;
  std::string line;
  std::getline(w, line);
  while (std::getline(w, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string axis, node, weight;
    std::getline(ls, axis, ',');
    std::getline(ls, node, ',');
    std::getline(ls, weight, ',');
    QuadratureRule& r = axis == "x" ? x : y;
    if (axis != "x" && axis != "y") throw ArgumentError("weights sidecar: axis must be x or y");
    r.nodes.push_back(std::stod(node));
    r.weights.push_back(std::stod(weight));
  }
  std::ifstream g(grid);
  if (!g) throw ArgumentError("cannot read " + grid.string());
  Eigen::MatrixXd v(x.size(), y.size());
  std::size_t i = 0;
  while (std::getline(g, line)) {
    if (line.empty()) continue;
    if (i >= x.size()) throw ArgumentError("kernel grid has more rows than x nodes");
    std::istringstream ls(line);
    std::string cell;
    std::size_t j = 0;
    while (std::getline(ls, cell, ',')) {
      if (j >= y.size()) throw ArgumentError("kernel grid has more columns than y nodes");
      v(i, j++) = std::stod(cell);
    }
    if (j != y.size()) throw ArgumentError("kernel grid row has too few columns");
    ++i;
  }
  if (i != x.size()) throw ArgumentError("kernel grid has too few rows");
  return TabulatedKernel(std::move(x), std::move(y), std::move(v));
}

SpectralDecomposition spectral_decompose(const TabulatedKernel& tk) {
  const auto nx = static_cast<Eigen::Index>(tk.x().size());
  const auto ny = static_cast<Eigen::Index>(tk.y().size());
  Eigen::VectorXd sx(nx), sy(ny);
  for (Eigen::Index i = 0; i < nx; ++i) sx(i) = std::sqrt(tk.x().weights[i]);
  for (Eigen::Index j = 0; j < ny; ++j) sy(j) = std::sqrt(tk.y().weights[j]);
  Eigen::MatrixXd b = sx.asDiagonal() * tk.values() * sy.asDiagonal();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SpectralDecomposition sd;
  const auto r = svd.singularValues().size();
  sd.left.resize(nx, r);
  sd.right.resize(ny, r);
  const double smax = r > 0 ? svd.singularValues()(0) : 0.0;
  const double tol = smax * std::max(nx, ny) * std::numeric_limits<double>::epsilon() * 10;
  for (Eigen::Index k = 0; k < r; ++k) {
    double s = svd.singularValues()(k);
    sd.singular_values.push_back(s);
    if (s > tol) ++sd.numerical_rank;
    Eigen::VectorXd u = svd.matrixU().col(k).cwiseQuotient(sx);
    Eigen::VectorXd v = svd.matrixV().col(k).cwiseQuotient(sy);
    double umax = u.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < nx; ++i)
      if (std::fabs(u(i)) > 1e-8 * umax) {
        if (u(i) < 0) {
          u = -u;
          v = -v;
        }
        break;
      }
    sd.left.col(k) = u;
    sd.right.col(k) = v;
  }
  return sd;
}

DegenerateApproximation degenerate_approx(const TabulatedKernel& tk,
                                          const SpectralDecomposition& sd, int m, double p) {
  if (m < 1) throw ArgumentError("degenerate_approx: M must be >= 1");
  if (!(p >= 1)) throw DomainError("degenerate_approx: p must be >= 1");
  DegenerateApproximation out;
  const int rank = sd.numerical_rank;
  const int r = std::min(m, rank);
  out.rank_used = r;
  std::vector<std::vector<double>> ucols, vcols;
  std::vector<KernelTerm> terms;
  Eigen::MatrixXd approx = Eigen::MatrixXd::Zero(tk.values().rows(), tk.values().cols());
  for (int k = 0; k < r; ++k) {
    Eigen::VectorXd u = sd.left.col(k), v = sd.right.col(k);
    ucols.emplace_back(u.data(), u.data() + u.size());
    vcols.emplace_back(v.data(), v.data() + v.size());
    terms.push_back({{k + 1, k + 1}, sd.singular_values[k]});
    approx += sd.singular_values[k] * u * v.transpose();
  }
  if (r == 0) {
    ucols.emplace_back(tk.x().size(), 0.0);
    vcols.emplace_back(tk.y().size(), 0.0);
  }
  std::vector<FactorFamily> factors{FactorFamily::tabulated(tk.x().nodes, ucols),
                                    FactorFamily::tabulated(tk.y().nodes, vcols)};
  std::vector<AxisDistribution> axes{AxisDistribution::grid(tk.x().nodes, tk.x().weights),
                                     AxisDistribution::grid(tk.y().nodes, tk.y().weights)};
  out.z = DegenerateKernel(std::move(factors), std::move(axes), std::move(terms), true);
  for (std::size_t k = r; k < sd.singular_values.size(); ++k) {
    out.frobenius_tail += sd.singular_values[k] * sd.singular_values[k];
    out.trace_tail += sd.singular_values[k];
  }
  out.frobenius_tail = std::sqrt(out.frobenius_tail);
  out.surrogate = p != 2.0;
  if (m >= rank) {
    out.q = 0.0;
    out.note = "M >= numerical rank " + std::to_string(rank) + ": Q = 0";
  } else {
    Eigen::MatrixXd res = (tk.values() - approx).cwiseAbs();
    double s = 0;
    for (Eigen::Index i = 0; i < res.rows(); ++i)
      for (Eigen::Index j = 0; j < res.cols(); ++j)
        s += tk.x().weights[i] * tk.y().weights[j] * std::pow(res(i, j), p);
    out.q = std::pow(s, 1.0 / p);
  }
  if (out.surrogate) {
    if (!out.note.empty()) out.note += "; ";
    out.note += "p != 2: SVD truncation is a surrogate for the L_p-optimal approximation";
  }
  return out;
}

DegenerateApproximation degenerate_approx(const TabulatedKernel& tk, int m, double p) {
  return degenerate_approx(tk, spectral_decompose(tk), m, p);
}

TabulatedApproximable::TabulatedApproximable(TabulatedKernel tk)
    : tk_(std::move(tk)), sd_(spectral_decompose(tk_)) {}

ApproximableKernel::Approximation TabulatedApproximable::approximate(int m, double p) const {
  auto a = degenerate_approx(tk_, sd_, m, p);
  return {std::move(a.z), a.q, a.surrogate};
}

}  // namespace multisum
