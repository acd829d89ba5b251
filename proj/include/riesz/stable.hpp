#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "riesz/rng.hpp"

namespace riesz {

// Symmetric beta-stable process in R^d with exponent psi(lambda) = |lambda|^beta,
// i.e. E exp(i lambda . X_t) = exp(-t |lambda|^beta). For beta = 2 each coordinate
// has variance 2t.
struct StableParams {
  int d = 1;
  double beta = 2.0;

  void validate() const;
};

double psi(std::span<const double> lambda, const StableParams& params);
double q_weight(std::span<const double> lambda, const StableParams& params);

// Uniformly discretized sample path. Positions are stored row-major, (steps + 1) x d,
// with positions[0] = 0.
class StablePath {
 public:
  StablePath() = default;
  StablePath(StableParams params, double horizon, int steps, std::vector<double> coords,
             SeedRecord seed = {});

  const StableParams& params() const noexcept { return params_; }
  int dim() const noexcept { return params_.d; }
  double horizon() const noexcept { return horizon_; }
  int steps() const noexcept { return steps_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(steps_) + 1; }
  double dt() const noexcept { return horizon_ / steps_; }
  double time(int i) const noexcept { return dt() * i; }
  const SeedRecord& seed() const noexcept { return seed_; }

  std::span<const double> position(int i) const {
    return {coords_.data() + static_cast<std::size_t>(i) * params_.d,
            static_cast<std::size_t>(params_.d)};
  }
  std::span<const double> coords() const noexcept { return coords_; }

  // Path restricted to [0, m * dt].
  StablePath prefix(int m) const;
  // max over coordinates of (max - min) along the path.
  double coordinate_extent() const;

 private:
  StableParams params_;
  double horizon_ = 1.0;
  int steps_ = 1;
  std::vector<double> coords_;
  SeedRecord seed_;
};

StablePath sample_path(const StableParams& params, double t, int n, const SeedRecord& seed);

// Chambers-Mallows-Stuck draw of the standard S_alpha(1, skew, 0) law with
// E exp(i u X) = exp(-|u|^alpha (1 - i skew sign(u) tan(pi alpha / 2))), alpha != 1.
// For alpha == 1 only skew == 0 (Cauchy) is supported.
double stable_cms(double alpha, double skew, Engine& rng);

// Positive alpha-stable variable (0 < alpha < 1) with E exp(-s S) = exp(-s^alpha).
double positive_stable(double alpha, Engine& rng);

// Writes "time x_1 ... x_d" rows.
void write_path_columns(const StablePath& path, std::ostream& out);

}  // namespace riesz
