#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace multisum {

enum class PsiFamily {
  power_log,         // p^{1/m} ln(p + e - 1)^{-r}
  extremal,          // 1 on [1, r]
  bounded_support,   // (b - p)^{-(gamma+1)/b} R(1/(b-p))^{1/b}, R(y) = ln^r(y + e)
  exp_power,         // exp(C p^beta)
  product_of,        // pointwise product
  rosenthal_scaled,  // K(p)^d base(p)
  tabulated,         // log-linear interpolation on a p-grid
};

// Generating function psi of a Grand Lebesgue Space. Immutable; copies share
// their representation.
class PsiFunction {
 public:
  static PsiFunction power_log(double m, double r = 0.0);
  static PsiFunction extremal(double r);
  static PsiFunction bounded_support(double b, double gamma, double r = 0.0);
  static PsiFunction exp_power(double beta, double c);
  static PsiFunction product_of(std::vector<PsiFunction> factors);
  static PsiFunction rosenthal_scaled(PsiFunction base, int d);
  static PsiFunction tabulated(std::vector<double> p, std::vector<double> values);

  PsiFamily family() const;
  std::string family_name() const;
  const std::vector<double>& params() const;
  const std::vector<PsiFunction>& children() const;
  const std::vector<double>& table_p() const;
  const std::vector<double>& table_values() const;

  double support_lower() const;
  // b; +inf for unbounded support.
  double support_upper() const;
  // True when b itself belongs to the support.
  bool upper_closed() const;
  bool in_support(double p) const;
  std::string support_string() const;

  // psi(p); throws DomainError outside the support.
  double operator()(double p) const;
  // ln psi(p), finite even where psi overflows a double.
  double log_value(double p) const;

 private:
  struct Rep;
  explicit PsiFunction(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

double eval_psi(const PsiFunction& psi, double p);

// Estimates of |f|_p on an ascending p-grid.
class MomentCurve {
 public:
  MomentCurve() = default;
  MomentCurve(std::vector<double> p, std::vector<double> values,
              std::vector<double> standard_errors = {});

  const std::vector<double>& p() const { return p_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& standard_errors() const { return se_; }
  bool has_standard_errors() const { return !se_.empty(); }
  std::size_t size() const { return p_.size(); }

  // Non-empty when the estimate was produced by a fallback route.
  std::string warning;

 private:
  std::vector<double> p_, values_, se_;
};

// sup over the grid of |f|_p / psi(p): a grid lower bound of the true norm.
double gls_norm(const MomentCurve& curve, const PsiFunction& psi);

// Tabulated psi equal to the curve values.
PsiFunction natural_psi(const MomentCurve& curve);

struct ConjugateOptions {
  int grid_points = 512;
  double default_upper = 1e4;
  // Largest upper limit reached when extending the search on unbounded supports.
  double extension_cap = 1e15;
};

struct ConjugateResult {
  double value = 0;
  double argmax = 1;
  bool diverged = false;
};

// v*(x) = sup_{p in support} (x p - p ln psi(p)); +inf when divergent.
double young_fenchel(const PsiFunction& psi, double x, const ConjugateOptions& opts = {});
ConjugateResult young_fenchel_detail(const PsiFunction& psi, double x,
                                     const ConjugateOptions& opts = {});

struct TailBound {
  double gls_norm = 1.0;
  PsiFunction psi;
  double threshold() const;
};

// Clamped tail bound: 1 below e * norm, exp(-v*(ln(y / norm))) above.
double tail_bound_eval(const TailBound& tb, double y, const ConjugateOptions& opts = {});

// K^d(p) prod psi_k(p) on the intersection of supports; d = 0 is the plain product.
PsiFunction compose_psi_product(const std::vector<PsiFunction>& factors, int rosenthal_power);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace multisum
