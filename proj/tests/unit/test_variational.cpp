#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "riesz/error.hpp"
#include "riesz/mc.hpp"
#include "riesz/variational.hpp"

using namespace riesz;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SpectralWeight weight_1d(double alpha = 0.2) { return {{{1, 2.0}, 0.5}, alpha, 0.5}; }

// J straight from its definition, d = 1, g over [-W, W]
double brute_J(const SpectralWeight& sw, double M, int R, int W, const std::vector<double>& g) {
  auto gv = [&](int y) { return std::abs(y) <= W ? g[static_cast<std::size_t>(y + W)] : 0.0; };
  auto sq = [&](int y) {
    const std::vector<double> l{kTwoPi * y / M};
    return std::sqrt(q_weight(l, sw.rp.stable));
  };
  double J = 0.0;
  for (int x = -R; x <= R; ++x) {
    double S = 0.0;
    for (int y = -W; y <= W; ++y) S += sq(x + y) * gv(x + y) * sq(y) * gv(y);
    const std::vector<double> l{kTwoPi * x / M};
    J += sw.value(l) * S * S;
  }
  return J;
}

std::vector<double> random_unit(Engine& rng, std::size_t n, bool positive) {
  std::vector<double> g(n);
  double s = 0.0;
  for (auto& v : g) {
    v = standard_normal(rng);
    if (positive) v = std::abs(v);
    s += v * v;
  }
  for (auto& v : g) v /= std::sqrt(s);
  return g;
}

}  // namespace

TEST_CASE("lattice sizes and window errors") {
  LatticeProblem lp{weight_1d(), 16.0, {}};
  CHECK(lp.e_radius() == 10);  // floor(16 / (pi / 2))
  CHECK(lp.window_radius() == 40);
  CHECK(lp.window_size() == 81);
  lp.opts.window_radius = 9;
  CHECK_THROWS_AS(lp.validate(), WindowError);
  lp.opts.window_radius = 10;
  CHECK_NOTHROW(lp.validate());
  std::vector<double> short_g(5, 0.0);
  CHECK_THROWS_AS(objective(lp, short_g), WindowError);
  LatticeProblem zero{weight_1d(0.0), 16.0, {}};
  CHECK_THROWS(zero.validate());
}

TEST_CASE("point mass gives C / alpha") {
  for (double alpha : {0.2, 1.0}) {
    LatticeProblem lp{weight_1d(alpha), 16.0, {}};
    std::vector<double> g(lp.window_size(), 0.0);
    g[g.size() / 2] = 1.0;
    CHECK(objective(lp, g) == doctest::Approx(c_d_sigma(1, 0.5) / alpha).epsilon(1e-13));
  }
}

TEST_CASE("objective and gradient against the definition") {
  LatticeProblem lp{weight_1d(), 12.0, {}};
  lp.opts.window_radius = 9;
  const LatticeObjective obj(lp);
  Engine rng(11);
  for (int k = 0; k < 5; ++k) {
    const auto g = random_unit(rng, obj.size(), k % 2 == 0);
    const double J = brute_J(lp.sw, lp.M, lp.e_radius(), 9, g);
    CHECK(obj.value(g) == doctest::Approx(J).epsilon(1e-12));
    std::vector<double> grad;
    CHECK(obj.gradient(g, grad) == doctest::Approx(J).epsilon(1e-12));
    for (std::size_t i = 0; i < g.size(); i += 3) {
      auto gp = g, gm = g;
      gp[i] += 1e-6;
      gm[i] -= 1e-6;
      const double fd = (obj.value(gp) - obj.value(gm)) / 2e-6;
      CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-5).scale(J));
    }
  }
}

TEST_CASE("reflection and absolute value") {
  LatticeProblem lp{weight_1d(), 16.0, {}};
  const LatticeObjective obj(lp);
  Engine rng(12);
  for (int k = 0; k < 20; ++k) {
    auto g = random_unit(rng, obj.size(), false);
    auto rev = g, ab = g;
    std::reverse(rev.begin(), rev.end());
    for (auto& v : ab) v = std::abs(v);
    CHECK(obj.value(rev) == doctest::Approx(obj.value(g)).epsilon(1e-12));
    CHECK(obj.value(ab) >= obj.value(g) * (1.0 - 1e-12));
  }
}

TEST_CASE("tiny instance against a random-search oracle") {
  // M = 4, eps = 0.5: E = {-2..2}, window {-2..2}
  LatticeProblem lp{weight_1d(), 4.0, {}};
  lp.opts.window_radius = 2;
  REQUIRE(lp.e_radius() == 2);
  const LatticeObjective obj(lp);
  Engine rng(13);
  std::vector<double> best;
  double best_v = 0.0;
  for (int k = 0; k < 1'000'000; ++k) {
    const auto g = random_unit(rng, obj.size(), false);  // signs allowed
    const double v = obj.value(g);
    if (v > best_v) best_v = v, best = g;
  }
  // polish with shrinking random perturbations
  for (double s = 0.05; s > 1e-6; s *= 0.7)
    for (int k = 0; k < 2000; ++k) {
      auto g = best;
      double n2 = 0.0;
      for (auto& v : g) v += s * standard_normal(rng), n2 += v * v;
      for (auto& v : g) v /= std::sqrt(n2);
      const double v = obj.value(g);
      if (v > best_v) best_v = v, best = g;
    }
  const auto sol = solve_lattice(lp);
  CHECK(sol.value >= best_v * (1.0 - 1e-6));
  CHECK(sol.value == doctest::Approx(best_v).epsilon(0.01));
  CHECK(sol.continuum_value == doctest::Approx(kTwoPi / 4.0 * sol.value));
}

TEST_CASE("solver trace, restarts and window saturation") {
  LatticeProblem lp{weight_1d(), 16.0, {}};
  const auto sol = solve_lattice(lp);
  REQUIRE(sol.trace.size() >= 2);
  for (std::size_t i = 1; i < sol.trace.size(); ++i) CHECK(sol.trace[i] >= sol.trace[i - 1]);
  CHECK(sol.restart_spread < 0.01);
  double n2 = 0.0;
  for (double v : sol.g) {
    CHECK(v >= 0.0);
    n2 += v * v;
  }
  CHECK(n2 == doctest::Approx(1.0));
  CHECK(objective(lp, sol.g) == doctest::Approx(sol.value));
  // better than the point mass
  CHECK(sol.value > c_d_sigma(1, 0.5) / 0.2);
  CHECK(window_saturation(lp) < 0.005);
}

TEST_CASE("rho decreases in alpha and respects weight domination") {
  double prev = INFINITY;
  for (double alpha : {0.1, 0.2, 0.5, 1.0}) {
    const double v = solve_lattice({weight_1d(alpha), 16.0, {}}).value;
    CHECK(v < prev);
    prev = v;
  }
  LatticeProblem lp{weight_1d(), 16.0, {}};
  LatticeObjective obj(lp);
  const auto base = ascend(obj, std::vector<double>(obj.size(), 1.0), lp.opts, lp.M);
  auto w = obj.box_weights();
  for (auto& v : w) v *= 1.5;
  obj.set_box_weights(w);
  const auto big = ascend(obj, std::vector<double>(obj.size(), 1.0), lp.opts, lp.M);
  CHECK(big.value == doctest::Approx(1.5 * base.value).epsilon(1e-6));
  w[0] = -1.0;
  CHECK_THROWS_AS(obj.set_box_weights(w), ParameterError);
}

TEST_CASE("continuum sequence bookkeeping and extrapolation") {
  // synthetic solver: value A + B / M exactly
  const double A = 0.5, B = 3.0;
  int calls = 0;
  LatticeSolver fake = [&](const LatticeProblem& lp) {
    ++calls;
    VariationalSolution s;
    s.continuum_value = A + B / lp.M;
    s.value = s.continuum_value * lp.M / kTwoPi;
    s.restart_spread = 1e-9;
    return s;
  };
  const std::vector<double> Ms{8, 16, 32, 64};
  const auto r = rho_continuum(weight_1d(), Ms, {}, fake);
  CHECK(calls == 4);
  CHECK(r.values.size() == 4);
  CHECK(r.rel_change.size() == 3);
  CHECK(r.rel_change[2] == doctest::Approx((B / 32 - B / 64) / (A + B / 64)));
  CHECK(r.richardson == doctest::Approx(A).epsilon(1e-12));
  CHECK(r.order == doctest::Approx(1.0));
  CHECK(r.monotone_tail);
  const std::vector<double> two{8, 16}, unsorted{8, 32, 16};
  CHECK_THROWS_AS(rho_continuum(weight_1d(), two, {}, fake), ParameterError);
  CHECK_THROWS_AS(rho_continuum(weight_1d(), unsorted, {}, fake), ParameterError);
}

TEST_CASE("rate constants") {
  for (double rho : {0.3, 1.0, 2.7}) {
    CHECK(polymer_growth_constant(2.0, 1.0, rho) == doctest::Approx(4.0 / 27.0 * rho * rho).epsilon(1e-15));
    CHECK(ldp_rate_constant(2.0, 1.0, rho) == doctest::Approx(27.0 / 64.0 / (rho * rho)).epsilon(1e-15));
    CHECK(collapse_time(rho) == 1.0 / rho);
    // (b/s)^{s/b} (b/(2b - s))^{(2b-s)/b} at b = 2, s = 1: sqrt(2) (2/3)^{3/2}
    CHECK(lil_constant(2.0, 1.0, rho) == doctest::Approx(2.0 * rho * std::sqrt(2.0) * std::pow(2.0 / 3.0, 1.5)));
  }
  CHECK(0.5 * std::pow(2.0 / 3.0, 3) == doctest::Approx(4.0 / 27.0));
  // homogeneity in rho
  CHECK(ldp_rate_constant(1.5, 0.7, 2.0) / ldp_rate_constant(1.5, 0.7, 1.0) ==
        doctest::Approx(std::pow(2.0, -1.5 / 0.7)));
  CHECK(lil_constant(1.5, 0.7, 2.0) == doctest::Approx(2.0 * lil_constant(1.5, 0.7, 1.0)));
  CHECK_THROWS_AS(polymer_growth_constant(2.0, 2.0, 1.0), RegimeError);
  CHECK_THROWS_AS(ldp_rate_constant(2.0, 4.0, 1.0), ParameterError);
  CHECK_THROWS_AS(collapse_time(0.0), ParameterError);
}

TEST_CASE("potential constants") {
  const auto c = potential_constants(3, 2.0, 2.0, 1.3);
  CHECK(c.sigma == 1.0);
  CHECK(c.C_p == doctest::Approx(std::pow(std::numbers::pi, 3)).epsilon(1e-6));
  CHECK(c.rate > 0.0);
  CHECK(c.lil > 0.0);
  // rate ~ rho^{-b/(b+s)}, lil ~ rho^{1/2}
  const auto c2 = potential_constants(3, 2.0, 2.0, 2.6);
  CHECK(c2.rate / c.rate == doctest::Approx(std::pow(2.0, -2.0 / 3.0)));
  CHECK(c2.lil / c.lil == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(potential_constants(1, 2.0, 0.5, 1.0), ParameterError);
  CHECK_THROWS_AS(potential_constants(1, 1.0, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(potential_constants(1, 2.0, 0.75, 0.0), ParameterError);
}
