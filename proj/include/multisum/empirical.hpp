#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace multisum {

// Replication batch of a scalar statistic, stored sorted ascending.
class EmpiricalDist {
 public:
  EmpiricalDist() = default;
  EmpiricalDist(std::vector<double> values, std::string digest = {}, std::uint64_t seed = 0);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const std::string& digest() const { return digest_; }
  std::uint64_t seed() const { return seed_; }

  double mean() const;
  double quantile(double q) const;

 private:
  std::vector<double> values_;
  std::string digest_;
  std::uint64_t seed_ = 0;
};

struct Estimate {
  double value = 0;
  double standard_error = 0;
};

// (mean |x|^p)^{1/p} with delta-method standard error.
Estimate empirical_moment(const EmpiricalDist& dist, double p);
Estimate empirical_moment(std::span<const double> values, double p);
// Population variance with standard error sqrt((m4 - var^2) / N).
Estimate empirical_variance(const EmpiricalDist& dist);
Estimate empirical_variance(std::span<const double> values);
// max(P(X >= y), P(X <= -y)).
double empirical_tail(const EmpiricalDist& dist, double y);
// Two-sample Kolmogorov-Smirnov sup distance.
double ks_distance(const EmpiricalDist& a, const EmpiricalDist& b);
// Critical value at level 0.01: 1.63 sqrt((n + m) / (n m)).
double ks_critical(std::size_t n, std::size_t m);

// Binary column file: one JSON header line, then N little-endian doubles.
void write_binary(const EmpiricalDist& dist, const std::filesystem::path& path,
                  const std::string& extra_header_json = "{}");
EmpiricalDist read_binary(const std::filesystem::path& path);
std::string quantiles_csv(const EmpiricalDist& dist, std::span<const double> probs);

}  // namespace multisum
