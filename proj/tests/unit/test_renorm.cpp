#include <doctest.h>

#include <cmath>
#include <set>
#include <utility>

#include "riesz/error.hpp"
#include "riesz/renorm.hpp"

using namespace riesz;

TEST_CASE("dyadic cells") {
  const auto c0 = dyadic_cells(1.0, 0);
  REQUIRE(c0.size() == 1);
  CHECK(c0[0].r0() == 0.0);
  CHECK(c0[0].r1() == 0.5);
  CHECK(c0[0].s0() == 0.5);
  CHECK(c0[0].s1() == 1.0);
  CHECK(dyadic_cells(1.0, 3).size() == 15);
  double area = 0.0;
  for (const auto& c : dyadic_cells(1.0, 10)) area += c.area();
  CHECK(area == doctest::Approx(0.499755859375).epsilon(1e-14));
}

TEST_CASE("cells partition the triangle") {
  // on a 2^13 grid every unit square strictly above the diagonal lies in at most one cell,
  // and the uncovered squares are exactly the ones next to the diagonal at level 12
  const int K = 12;
  const int N = 1 << (K + 1);
  std::set<std::pair<int, int>> seen;
  long covered = 0;
  for (const auto& c : dyadic_cells(1.0, K)) {
    const int side = N >> (c.level + 1);
    const int r0 = 2 * c.index * side, s0 = r0 + side;
    CHECK(c.r1() == doctest::Approx(c.s0()));  // touches the diagonal only at (r1, s0)
    covered += static_cast<long>(side) * side;
    if (c.level <= 5) {
      for (int i = r0; i < r0 + side; ++i)
        for (int j = s0; j < s0 + side; ++j) CHECK(seen.insert({i, j}).second);
    }
  }
  CHECK(covered == static_cast<long>(N) * (N - 1) / 2);
}

TEST_CASE("scale factor and regime gate") {
  CHECK(cell_scale_factor({{3, 2.0}, 2.0}, 1) == doctest::Approx(0.25));
  const auto p = sample_path({3, 2.0}, 1.0, 64, seed_for(1, Lane::Path, 0));
  CHECK_THROWS_AS(gamma_renormalized(sample_path({4, 1.0}, 1.0, 64, {}), {{4, 1.0}, 1.5}, 2), RegimeError);
  CHECK_THROWS_AS(gamma_renormalized(p, {{3, 2.0}, 2.0}, 6), ParameterError);  // 64 not divisible by 128
}

TEST_CASE("gamma pieces reconcile with the cell values") {
  const RieszParams rp{{2, 2.0}, 1.0};
  const int K = 4;
  const auto p = sample_path(rp.stable, 1.0, 512, seed_for(3, Lane::Path, 0));
  const auto g = gamma_renormalized(p, rp, K);
  const DyadicRule rule(rp, 512, K, {});
  double raw = 0.0;
  for (int k = 0; k <= K; ++k)
    for (int l = 0; l < (1 << k); ++l) raw += rule.cell_value(p, k, l);
  double means = 0.0;
  for (double m : g.level_means) means += m;
  CHECK(g.value + means == doctest::Approx(raw).epsilon(1e-12));
  double sum = 0.0;
  for (double s : g.level_sums) sum += s;
  CHECK(g.value == doctest::Approx(sum));
  // the raw cell sum is eta on the union of the cells; the band rule on the full triangle is larger
  QuadratureSpec q;
  q.mean_correction = true;
  CHECK(raw < eta(p, rp, q));
  CHECK(raw > 0.5 * eta(p, rp, q));
  // per-level rule bias against the closed-form mean stays small
  for (std::size_t k = 0; k < g.level_bias.size(); ++k)
    CHECK(std::abs(g.level_bias[k]) < 0.02 * g.level_means[k]);
}

TEST_CASE("gamma is centered and the tail bound shrinks with K") {
  const RieszParams rp{{3, 2.0}, 2.0};
  McEstimate e;
  std::vector<McEstimate> lev(5);
  for (int r = 0; r < 1000; ++r) {
    const auto g = gamma_renormalized(sample_path(rp.stable, 1.0, 512, seed_for(4, Lane::Path, r)), rp, 4);
    e.add(g.value);
    for (int k = 0; k <= 4; ++k) lev[k].add(g.level_sums[k]);
  }
  CHECK(std::abs(e.mean()) < 3.0 * *e.std_error());
  for (const auto& l : lev) CHECK(std::abs(l.mean()) < 3.0 * *l.std_error());
  const auto p = sample_path(rp.stable, 1.0, 1024, seed_for(4, Lane::Path, 7));
  const auto a = gamma_renormalized(p, rp, 3), b = gamma_renormalized(p, rp, 5), c = gamma_renormalized(p, rp, 7);
  CHECK(a.tail_bound >= 0.0);
  CHECK(b.tail_bound < a.tail_bound);
  CHECK(c.tail_bound < b.tail_bound);
}

TEST_CASE("L2 Cauchy: level increments stay inside the fitted tail") {
  // partial sums of one fine decomposition, so the quadrature pattern is shared
  const RieszParams rp{{3, 2.0}, 2.0};
  McEstimate d46, d68, tb4, tb6;
  for (int r = 0; r < 200; ++r) {
    const auto p = sample_path(rp.stable, 1.0, 8192, seed_for(5, Lane::Path, r));
    const auto g = gamma_renormalized(p, rp, 8);
    double s46 = 0.0, s68 = 0.0;
    for (int k = 5; k <= 6; ++k) s46 += g.level_sums[k];
    for (int k = 7; k <= 8; ++k) s68 += g.level_sums[k];
    d46.add(s46 * s46);
    d68.add(s68 * s68);
    tb4.add(gamma_renormalized(p, rp, 4).tail_bound);
    tb6.add(gamma_renormalized(p, rp, 6).tail_bound);
  }
  CHECK(std::sqrt(d46.mean()) <= tb4.mean());
  CHECK(std::sqrt(d68.mean()) <= tb6.mean());
}

TEST_CASE("level variance profile, sigma < beta") {
  const RieszParams rp{{2, 2.0}, 1.0};
  const auto prof = level_variance_profile(rp, 5, 600, 6, {}, 1.0, 16);
  CHECK(prof.log2_fit.slope == doctest::Approx(-(3.0 - 2.0 * rp.q())).epsilon(0.15));
  for (std::size_t k = 1; k < prof.level_variance.size(); ++k) {
    CAPTURE(k);
    CHECK(std::abs(prof.level_variance[k] - prof.cell_variance_sum[k]) < 3.0 * prof.variance_stderr[k] + 0.05 * prof.level_variance[k]);
  }
}

TEST_CASE("cells at one level are exchangeable") {
  const RieszParams rp{{3, 2.0}, 2.0};
  const DyadicRule rule(rp, 256, 2, {});
  std::vector<double> a, b;
  for (int r = 0; r < 1500; ++r) {
    a.push_back(rule.cell_value(sample_path(rp.stable, 1.0, 256, seed_for(7, Lane::Path, r)), 2, 0));
    b.push_back(rule.cell_value(sample_path(rp.stable, 1.0, 256, seed_for(7, Lane::PathB, r)), 2, 3));
  }
  CHECK(ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("cell law matches scaled zeta") {
  CHECK(cell_distribution_check({{3, 2.0}, 2.0}, 1, 1, 800, 8, {}, 1.0, 128).p_value > 0.01);
}
