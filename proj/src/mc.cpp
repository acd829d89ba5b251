#include "riesz/mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include <omp.h>

#include "riesz/error.hpp"

namespace riesz {

void McEstimate::add(double x) {
  ++n_;
  if (n_ == 1) {
    min_ = max_ = x;
  } else {
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void McEstimate::merge(const McEstimate& o) {
  for (const auto& r : o.lineage_) lineage_.push_back(r);
  if (o.n_ == 0) return;
  if (n_ == 0) {
    n_ = o.n_;
    mean_ = o.mean_;
    m2_ = o.m2_;
    min_ = o.min_;
    max_ = o.max_;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double delta = o.mean_ - mean_;
  mean_ = (na * mean_ + nb * o.mean_) / n;
  m2_ += o.m2_ + delta * delta * na * nb / n;
  n_ += o.n_;
  min_ = std::min(min_, o.min_);
  max_ = std::max(max_, o.max_);
}

void McEstimate::note_range(const SeedRange& r) { lineage_.push_back(r); }

std::optional<double> McEstimate::variance() const {
  if (n_ < 2) return std::nullopt;
  return m2_ / static_cast<double>(n_ - 1);
}

std::optional<double> McEstimate::std_error() const {
  const auto v = variance();
  if (!v) return std::nullopt;
  return std::sqrt(*v / static_cast<double>(n_));
}

McEstimate McEstimate::of(std::span<const double> xs) {
  McEstimate e;
  for (double x : xs) e.add(x);
  return e;
}

namespace {

template <class T, class F>
std::vector<T> replica_map(const F& eval, std::size_t n, std::uint64_t seed, std::uint64_t first,
                           int jobs) {
  std::vector<T> out(n);
  std::vector<std::string> errors(n);
  std::vector<char> failed(n, 0);
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      out[i] = eval(seed, first + i);
    } catch (const std::exception& e) {
      failed[i] = 1;
      errors[i] = e.what();
    } catch (...) {
      failed[i] = 1;
      errors[i] = "unknown error";
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (failed[i]) throw ReplicaError(static_cast<std::size_t>(first + i), errors[i]);
  return out;
}

}  // namespace

ReplicaRun run_replicas(const Sampler& sampler, std::size_t n, std::uint64_t seed,
                        std::uint64_t first, int jobs) {
  ReplicaRun run;
  run.samples = replica_map<double>(sampler, n, seed, first, jobs);
  for (double x : run.samples) run.estimate.add(x);
  run.estimate.note_range({seed, first, n});
  return run;
}

std::vector<std::vector<double>> run_replicas_vec(const VectorSampler& sampler, std::size_t n,
                                                  std::uint64_t seed, std::uint64_t first,
                                                  int jobs) {
  return replica_map<std::vector<double>>(sampler, n, seed, first, jobs);
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 50 || b.size() < 50) throw ParameterError("KS test needs at least 50 values per sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double dmax = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    dmax = std::max(dmax, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  return {dmax, kolmogorov_q((sq + 0.12 + 0.11 / sq) * dmax)};
}

Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // the bounds are exactly 0 at k = 0 and 1 at k = n; avoid the rounding residue
  return {k == 0 ? 0.0 : std::max(0.0, centre - half), k == n ? 1.0 : std::min(1.0, centre + half)};
}

bool TailCurve::monotone_within_ci() const {
  for (std::size_t i = 1; i < p_hat.size(); ++i)
    if (p_hat[i] > p_hat[i - 1] && ci[i].lo > ci[i - 1].hi) return false;
  return true;
}

TailCurve tail_curve(std::span<const double> samples, std::span<const double> thresholds) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw ParameterError("tail thresholds must be increasing");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  TailCurve c;
  c.n = xs.size();
  for (double a : thresholds) {
    const auto it = std::lower_bound(xs.begin(), xs.end(), a);
    const auto k = static_cast<std::uint64_t>(xs.end() - it);
    c.thresholds.push_back(a);
    c.exceed.push_back(k);
    c.p_hat.push_back(c.n ? static_cast<double>(k) / static_cast<double>(c.n) : 0.0);
    c.ci.push_back(wilson_interval(k, c.n));
  }
  return c;
}

double quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw ParameterError("quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = p * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  const double f = pos - static_cast<double>(lo);
  return xs[lo] * (1.0 - f) + xs[hi] * f;
}

std::vector<double> tail_thresholds(std::span<const double> samples, double beta, double sigma,
                                    int count, double q_lo, double q_hi) {
  if (count < 2) throw ParameterError("need at least two thresholds");
  std::vector<double> xs(samples.begin(), samples.end());
  const double a0 = quantile(xs, q_lo), a1 = quantile(xs, q_hi);
  if (!(a0 > 0.0 && a1 > a0)) throw ParameterError("tail quantiles must be positive and increasing");
  const double e = beta / sigma;
  const double x0 = std::pow(a0, e), x1 = std::pow(a1, e);
  std::vector<double> out;
  for (int i = 0; i < count; ++i)
    out.push_back(std::pow(x0 + (x1 - x0) * i / (count - 1), 1.0 / e));
  return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("line fit needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ParameterError("line fit needs distinct abscissae");
  LinearFit f;
  f.points = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  f.slope_stderr = x.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
  return f;
}

LdpFit ldp_exponent_fit(const TailCurve& curve, double beta, double sigma) {
  LdpFit out;
  std::vector<double> x, y;
  const double e = beta / sigma;
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    if (curve.exceed[i] == 0) {
      ++out.dropped;
      continue;
    }
    x.push_back(std::pow(curve.thresholds[i], e));
    y.push_back(std::log(curve.p_hat[i]));
  }
  if (x.size() < 4) throw ParameterError("tail fit needs at least 4 thresholds with exceedances");
  out.line = fit_line(x, y);
  return out;
}

}  // namespace riesz
