#include "riesz/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "riesz/error.hpp"

namespace riesz {

void StableParams::validate() const {
  if (d < 1) throw ParameterError("dimension d must be >= 1");
  if (!(beta > 0.0 && beta <= 2.0)) throw ParameterError("stability index beta must lie in (0, 2]");
}

double psi(std::span<const double> lambda, const StableParams& params) {
  double r2 = 0.0;
  for (double l : lambda) r2 += l * l;
  if (r2 == 0.0) return 0.0;
  return std::pow(r2, 0.5 * params.beta);
}

double q_weight(std::span<const double> lambda, const StableParams& params) {
  return 1.0 / (1.0 + psi(lambda, params));
}

StablePath::StablePath(StableParams params, double horizon, int steps, std::vector<double> coords,
                       SeedRecord seed)
    : params_(params), horizon_(horizon), steps_(steps), coords_(std::move(coords)), seed_(seed) {
  params_.validate();
  if (!(horizon > 0.0)) throw ParameterError("path horizon must be > 0");
  if (steps < 1) throw ParameterError("path needs at least one step");
  if (coords_.size() != (static_cast<std::size_t>(steps) + 1) * params_.d)
    throw ParameterError("coordinate array does not match (steps + 1) * d");
}

StablePath StablePath::prefix(int m) const {
  if (m < 1 || m > steps_) throw ParameterError("prefix length out of range");
  std::vector<double> c(coords_.begin(),
                        coords_.begin() + (static_cast<std::ptrdiff_t>(m) + 1) * params_.d);
  return StablePath(params_, dt() * m, m, std::move(c), seed_);
}

double StablePath::coordinate_extent() const {
  double ext = 0.0;
  const int d = params_.d;
  for (int k = 0; k < d; ++k) {
    double lo = coords_[k], hi = coords_[k];
    for (std::size_t i = 1; i < size(); ++i) {
      lo = std::min(lo, coords_[i * d + k]);
      hi = std::max(hi, coords_[i * d + k]);
    }
    ext = std::max(ext, hi - lo);
  }
  return ext;
}

double stable_cms(double alpha, double skew, Engine& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (0, 2]");
  if (std::abs(skew) > 1.0) throw ParameterError("skewness must lie in [-1, 1]");
  constexpr double pi = std::numbers::pi;
  const double v = pi * (open_uniform(rng) - 0.5);
  const double w = -std::log(open_uniform(rng));
  if (alpha == 1.0) {
    if (skew != 0.0) throw ParameterError("alpha == 1 supports only the symmetric case");
    return std::tan(v);
  }
  const double t = skew * std::tan(0.5 * pi * alpha);
  const double b = std::atan(t) / alpha;
  const double s = std::pow(1.0 + t * t, 0.5 / alpha);
  const double av = alpha * (v + b);
  return s * std::sin(av) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos(v - av) / w, (1.0 - alpha) / alpha);
}

double positive_stable(double alpha, Engine& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("positive stable law needs 0 < alpha < 1");
  const double scale = std::pow(std::cos(0.5 * std::numbers::pi * alpha), 1.0 / alpha);
  return scale * stable_cms(alpha, 1.0, rng);
}

StablePath sample_path(const StableParams& params, double t, int n, const SeedRecord& seed) {
  params.validate();
  if (!(t > 0.0)) throw ParameterError("horizon t must be > 0");
  if (n < 1) throw ParameterError("number of steps n must be >= 1");
  const int d = params.d;
  const double dt = t / n;
  Engine rng = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> coords((static_cast<std::size_t>(n) + 1) * d, 0.0);

  // Increment = sqrt(A) * G with G ~ N(0, 2 I); A = dt for beta = 2, otherwise
  // A = dt^{2/beta} S with S positive (beta/2)-stable, so E exp(-A|l|^2) = exp(-dt|l|^beta).
  const bool gaussian = params.beta == 2.0;
  const double alpha = 0.5 * params.beta;
  const double sub_scale = std::pow(dt, 2.0 / params.beta);
  for (int i = 1; i <= n; ++i) {
    const double a = gaussian ? dt : sub_scale * positive_stable(alpha, rng);
    const double amp = std::sqrt(2.0 * a);
    const double* prev = coords.data() + static_cast<std::size_t>(i - 1) * d;
    double* cur = coords.data() + static_cast<std::size_t>(i) * d;
    for (int k = 0; k < d; ++k) cur[k] = prev[k] + amp * normal(rng);
  }
  return StablePath(params, t, n, std::move(coords), seed);
}

void write_path_columns(const StablePath& path, std::ostream& out) {
  const auto old_flags = out.flags();
  const auto old_prec = out.precision(12);
  out << std::scientific;
  for (int i = 0; i <= path.steps(); ++i) {
    out << path.time(i);
    for (double x : path.position(i)) out << ' ' << x;
    out << '\n';
  }
  out.flags(old_flags);
  out.precision(old_prec);
}

}  // namespace riesz
