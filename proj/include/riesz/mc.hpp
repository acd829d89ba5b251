#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace riesz {

// Contiguous block of replicas drawn from one base seed.
struct SeedRange {
  std::uint64_t seed = 0;
  std::uint64_t first = 0;
  std::uint64_t count = 0;

  friend bool operator==(const SeedRange&, const SeedRange&) = default;
};

// Mergeable accumulator (Welford updates, Chan et al. merge).
class McEstimate {
 public:
  void add(double x);
  void merge(const McEstimate& other);
  void note_range(const SeedRange& r);

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double m2() const noexcept { return m2_; }
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }
  // m2 / (n - 1); empty for n < 2.
  std::optional<double> variance() const;
  std::optional<double> std_error() const;
  const std::vector<SeedRange>& lineage() const noexcept { return lineage_; }

  static McEstimate of(std::span<const double> xs);

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
  std::vector<SeedRange> lineage_;
};

using Sampler = std::function<double(std::uint64_t seed, std::uint64_t replica)>;
using VectorSampler = std::function<std::vector<double>(std::uint64_t seed, std::uint64_t replica)>;

struct ReplicaRun {
  std::vector<double> samples;
  McEstimate estimate;
};

// Evaluates replicas first .. first + n - 1 in parallel (jobs <= 0: OpenMP default). Samples
// are stored by replica index and reduced serially, so the output does not depend on the
// number of workers. A throwing sampler is reported as ReplicaError with its index.
ReplicaRun run_replicas(const Sampler& sampler, std::size_t n, std::uint64_t seed,
                        std::uint64_t first = 0, int jobs = 0);
std::vector<std::vector<double>> run_replicas_vec(const VectorSampler& sampler, std::size_t n,
                                                  std::uint64_t seed, std::uint64_t first = 0,
                                                  int jobs = 0);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test, asymptotic p-value with the small-sample
// correction (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) D. Both samples need >= 50 values.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
double kolmogorov_q(double lambda);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054);

struct TailCurve {
  std::vector<double> thresholds;
  std::vector<std::uint64_t> exceed;
  std::vector<double> p_hat;
  std::vector<Interval> ci;
  std::uint64_t n = 0;

  // P-hat nonincreasing up to overlap of the confidence intervals.
  bool monotone_within_ci() const;
};

TailCurve tail_curve(std::span<const double> samples, std::span<const double> thresholds);

// count thresholds with a^{beta/sigma} equally spaced between the q_lo and q_hi sample
// quantiles (quantiles must be positive).
std::vector<double> tail_thresholds(std::span<const double> samples, double beta, double sigma,
                                    int count = 8, double q_lo = 0.95, double q_hi = 0.999);

double quantile(std::vector<double> xs, double p);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct LdpFit {
  LinearFit line;       // log P-hat against a^{beta/sigma}
  std::size_t dropped = 0;  // thresholds with zero exceedances, removed from the fit
};

// Needs at least 4 thresholds with nonzero counts; zero-count tail points are dropped and
// reported in `dropped`.
LdpFit ldp_exponent_fit(const TailCurve& curve, double beta, double sigma);

}  // namespace riesz
