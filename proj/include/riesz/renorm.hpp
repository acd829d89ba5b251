#pragma once

#include <cstdint>
#include <vector>

#include "riesz/corner_rule.hpp"
#include "riesz/mc.hpp"
#include "riesz/riesz.hpp"

namespace riesz {

// A_l^k = [2l L, (2l+1) L] x [(2l+1) L, (2l+2) L] with L = t / 2^{k+1}; r in the first
// interval, s in the second.
struct DyadicCell {
  int level = 0;
  int index = 0;
  double horizon = 1.0;

  double side() const;
  double r0() const { return 2 * index * side(); }
  double r1() const { return (2 * index + 1) * side(); }
  double s0() const { return r1(); }
  double s1() const { return (2 * index + 2) * side(); }
  double area() const { return side() * side(); }
};

// Levels 0..K, 2^k cells each, in level order.
std::vector<DyadicCell> dyadic_cells(double t, int K);

struct RenormResult {
  double value = 0.0;                 // sum of level_sums
  int max_level = 0;
  std::vector<double> level_sums;     // sum_l (eta(A_l^k) - E eta(A_l^k)) per level
  double tail_bound = 0.0;            // L2 bound on the discarded levels k > K
  std::vector<double> level_means;    // sum_l E eta(A_l^k) of the discrete rule
  std::vector<double> level_bias;     // level_means - sum_l mean_rectangle(A_l^k)
};

// Self-similar node layout for all levels: the level-K pattern on a path with n steps
// (n divisible by 2^{K+1}), stretched by 2^{K-k} for level k. Every cell at level k is then
// an exact rescaled copy of a level-K cell, so the scaling laws hold for the discrete values.
class DyadicRule {
 public:
  DyadicRule(const RieszParams& rp, int n, int K, const QuadratureSpec& q);

  int max_level() const noexcept { return K_; }
  int steps() const noexcept { return n_; }
  const CornerRule& rule(int level) const { return rules_.at(static_cast<std::size_t>(level)); }
  int corner_index(int level, int index) const;

  double cell_value(const StablePath& path, int level, int index) const;
  double cell_mean(int level, double dt) const;

 private:
  RieszParams rp_;
  int n_;
  int K_;
  double m1_;
  std::vector<CornerRule> rules_;
};

RenormResult gamma_renormalized(const StablePath& path, const RieszParams& rp, int K,
                                const QuadratureSpec& q = {});

// Centered cell values eta(A_l^k) - E eta(A_l^k), level order (as dyadic_cells).
std::vector<double> centered_cells(const StablePath& path, const RieszParams& rp, int K,
                                   const QuadratureSpec& q = {});

struct LevelProfile {
  std::vector<double> level_variance;   // MC variance of each level sum
  std::vector<double> variance_stderr;  // standard error of those variances
  std::vector<double> cell_variance_sum;  // sum over cells of the per-cell MC variance
  LinearFit log2_fit;                   // log2 variance against k
};

// Paths on [0, t] with base_steps * 2^{K+1} steps.
LevelProfile level_variance_profile(const RieszParams& rp, int K, std::size_t replicas,
                                    std::uint64_t seed, const QuadratureSpec& q = {},
                                    double t = 1.0, int base_steps = 64);

// Two-sample KS between eta(A_l^k) on [0, t] and 2^{-(k+1)(2 - sigma/beta)} zeta([0, t]^2).
// The eta population uses paths with n steps, zeta uses independent path pairs with
// n / 2^{k+1} steps on [0, t], so both use the same node pattern.
KsResult cell_distribution_check(const RieszParams& rp, int level, int index, std::size_t replicas,
                                 std::uint64_t seed, const QuadratureSpec& q = {}, double t = 1.0,
                                 int n = 256);

double cell_scale_factor(const RieszParams& rp, int level);

}  // namespace riesz
