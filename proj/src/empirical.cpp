#include "multisum/empirical.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "multisum/errors.hpp"

namespace multisum {

EmpiricalDist::EmpiricalDist(std::vector<double> values, std::string digest, std::uint64_t seed)
    : values_(std::move(values)), digest_(std::move(digest)), seed_(seed) {
  std::sort(values_.begin(), values_.end());
}

double EmpiricalDist::mean() const {
  if (values_.empty()) throw ArgumentError("mean of an empty distribution");
  double s = 0;
  for (double v : values_) s += v;
  return s / values_.size();
}

double EmpiricalDist::quantile(double q) const {
  if (values_.empty()) throw ArgumentError("quantile of an empty distribution");
  q = std::clamp(q, 0.0, 1.0);
  double pos = q * (values_.size() - 1);
  std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= values_.size()) return values_.back();
  double t = pos - i;
  return (1 - t) * values_[i] + t * values_[i + 1];
}

Estimate empirical_moment(std::span<const double> values, double p) {
  if (values.empty()) throw ArgumentError("empirical_moment: empty distribution");
  if (!(p >= 1)) throw DomainError("empirical_moment: p must be >= 1");
  const double n = values.size();
  double s = 0, s2 = 0;
  for (double v : values) {
    double a = std::pow(std::fabs(v), p);
    s += a;
    s2 += a * a;
  }
  double m = s / n;
  double var = std::max(0.0, s2 / n - m * m);
  if (m <= 0) return {0.0, 0.0};
  double est = std::pow(m, 1.0 / p);
  double se = est / (p * m) * std::sqrt(var / n);
  return {est, se};
}

Estimate empirical_moment(const EmpiricalDist& dist, double p) {
  return empirical_moment(std::span<const double>(dist.values()), p);
}

Estimate empirical_variance(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("empirical_variance: empty distribution");
  const double n = values.size();
  double mean = 0;
  for (double v : values) mean += v;
  mean /= n;
  double m2 = 0, m4 = 0;
  for (double v : values) {
    double c = (v - mean) * (v - mean);
    m2 += c;
    m4 += c * c;
  }
  m2 /= n;
  m4 /= n;
  return {m2, std::sqrt(std::max(0.0, m4 - m2 * m2) / n)};
}

Estimate empirical_variance(const EmpiricalDist& dist) {
  return empirical_variance(std::span<const double>(dist.values()));
}

double empirical_tail(const EmpiricalDist& dist, double y) {
  if (dist.empty()) throw ArgumentError("empirical_tail: empty distribution");
  if (y < 0) throw ArgumentError("empirical_tail: y must be >= 0");
  const auto& v = dist.values();
  auto upper = v.end() - std::lower_bound(v.begin(), v.end(), y);
  auto lower = std::upper_bound(v.begin(), v.end(), -y) - v.begin();
  return static_cast<double>(std::max<std::ptrdiff_t>(upper, lower)) / v.size();
}

double ks_distance(const EmpiricalDist& a, const EmpiricalDist& b) {
  if (a.empty() || b.empty()) throw ArgumentError("ks_distance: empty distribution");
  const auto& x = a.values();
  const auto& y = b.values();
  std::size_t i = 0, j = 0;
  double d = 0;
  const double n = x.size(), m = y.size();
  while (i < x.size() && j < y.size()) {
    double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::fabs(i / n - j / m));
  }
  return d;
}

double ks_critical(std::size_t n, std::size_t m) {
  return 1.63 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

void write_binary(const EmpiricalDist& dist, const std::filesystem::path& path,
                  const std::string& extra_header_json) {
  nlohmann::ordered_json header = nlohmann::ordered_json::parse(extra_header_json);
  header["format"] = "multisum-empirical-f64le";
  header["n"] = dist.size();
  header["seed"] = dist.seed();
  header["digest"] = dist.digest();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ArgumentError("cannot write " + path.string());
  os << header.dump() << '\n';
  for (double v : dist.values()) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    os.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
}

EmpiricalDist read_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ArgumentError("cannot read " + path.string());
  std::string line;
  std::getline(is, line);
  auto header = nlohmann::json::parse(line);
  std::size_t n = header.at("n").get<std::size_t>();
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits;
    is.read(reinterpret_cast<char*>(&bits), sizeof bits);
    if (!is) throw ArgumentError("truncated distribution file " + path.string());
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    std::memcpy(&values[i], &bits, sizeof bits);
  }
  return EmpiricalDist(std::move(values), header.value("digest", std::string{}),
                       header.value("seed", std::uint64_t{0}));
}

std::string quantiles_csv(const EmpiricalDist& dist, std::span<const double> probs) {
  std::ostringstream os;
  os << "prob,quantile\n";
  os << std::setprecision(17);
  for (double q : probs) os << q << ',' << dist.quantile(q) << '\n';
  return os.str();
}

}  // namespace multisum
