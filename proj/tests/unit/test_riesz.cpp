#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "riesz/error.hpp"
#include "riesz/mc.hpp"
#include "riesz/riesz.hpp"

using namespace riesz;
namespace bq = boost::math::quadrature;

namespace {

constexpr double kPi = std::numbers::pi;

RieszParams rp_of(int d, double beta, double sigma) { return {{d, beta}, sigma}; }

StablePath line_path(int d, double beta, double t, int n, double slope) {
  std::vector<double> c((n + 1) * d, 0.0);
  for (int i = 0; i <= n; ++i) c[i * d] = slope * t * i / n;
  return StablePath({d, beta}, t, n, c);
}

// int over [0,1] x [1,2] of (s - r)^{-q}, nested tanh-sinh
double rect_quadrature(double q, double a, double b, double c, double e) {
  bq::tanh_sinh<double> ts;
  auto inner = [&](double s) {
    return ts.integrate([&](double r) { return std::pow(s - r, -q); }, a, std::min(b, s));
  };
  return ts.integrate(inner, c, e);
}

}  // namespace

TEST_CASE("regime classification") {
  CHECK(classify(2, 2.0, 0.5) == Regime::SubCritical);
  CHECK(classify(3, 2.0, 2.0) == Regime::Renormalizable);
  CHECK(classify(3, 2.0, 2.9) == Regime::Renormalizable);
  CHECK(classify(3, 2.0, 3.0) == Regime::Invalid);
  CHECK(classify(2, 2.0, 2.0) == Regime::Invalid);
  CHECK(rp_of(2, 2.0, 0.5).q() == doctest::Approx(0.25));
}

TEST_CASE("regime errors name the inequality") {
  const auto p = sample_path({3, 2.0}, 1.0, 8, seed_for(1, Lane::Path, 0));
  try {
    eta(p, rp_of(3, 2.0, 2.0));
    FAIL("expected a regime error");
  } catch (const RegimeError& e) {
    CHECK(std::string(e.what()).find("sigma < beta") != std::string::npos);
  }
  CHECK_THROWS_AS(eta(sample_path({2, 2.0}, 1.0, 8, {}), rp_of(2, 2.0, 2.0)), ParameterError);
  CHECK_THROWS_AS(mean_eta(rp_of(3, 2.0, 2.5), 1.0), RegimeError);
  CHECK_THROWS_AS(moment_neg_sigma(rp_of(2, 2.0, 2.0)), ParameterError);
}

TEST_CASE("constant path gives +inf") {
  const StablePath zero({2, 2.0}, 1.0, 8, std::vector<double>(18, 0.0));
  CHECK(std::isinf(eta(zero, rp_of(2, 2.0, 0.5))));
}

TEST_CASE("moment of |X_1|^{-sigma} against a direct MC oracle") {
  struct Case {
    int d;
    double beta, sigma;
  };
  for (const Case c : {Case{2, 2.0, 0.5}, Case{3, 2.0, 1.0}, Case{1, 1.5, 0.3}}) {
    const auto rp = rp_of(c.d, c.beta, c.sigma);
    McEstimate e;
    for (int r = 0; r < 200000; ++r) {
      const auto p = sample_path(rp.stable, 1.0, 1, seed_for(77, Lane::Oracle, r));
      double r2 = 0.0;
      for (double x : p.position(1)) r2 += x * x;
      e.add(std::pow(r2, -0.5 * c.sigma));
    }
    CAPTURE(c.d);
    CAPTURE(c.sigma);
    CHECK(std::abs(e.mean() - moment_neg_sigma(rp)) < 3.0 * *e.std_error());
  }
  CHECK(moment_neg_sigma(rp_of(2, 2.0, 1e-4)) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("mean_eta closed form") {
  const auto rp = rp_of(2, 1.0, 0.5);  // sigma / beta = 1/2
  CHECK(mean_eta(rp, 1.0) == doctest::Approx(moment_neg_sigma(rp) * 4.0 / 3.0));
  CHECK(mean_eta(rp, 0.0) == 0.0);
  const auto rp2 = rp_of(2, 2.0, 0.5);
  CHECK(mean_eta(rp2, 2.0) / mean_eta(rp2, 1.0) == doctest::Approx(std::pow(2.0, 2.0 - 0.25)));
}

TEST_CASE("mean_rectangle against 2-d quadrature") {
  for (double q : {0.25, 0.5, 1.0, 1.25}) {
    const auto rp = rp_of(3, 2.0, 2.0 * q);
    const double m1 = moment_neg_sigma(rp);
    CAPTURE(q);
    CHECK(mean_rectangle(rp, 0, 1, 1, 2) == doctest::Approx(m1 * rect_quadrature(q, 0, 1, 1, 2)).epsilon(1e-8));
    CHECK(mean_rectangle(rp, 0.2, 0.5, 0.7, 1.3) ==
          doctest::Approx(m1 * rect_quadrature(q, 0.2, 0.5, 0.7, 1.3)).epsilon(1e-8));
  }
  const auto rq = rp_of(3, 1.0, 0.5);
  CHECK(mean_rectangle(rq, 0, 1, 1, 2) ==
        doctest::Approx(moment_neg_sigma(rq) * (4.0 / 3.0) * (std::pow(2.0, 1.5) - 2.0)));
  CHECK(mean_rectangle(rq, 0.5, 0.5, 1, 2) == 0.0);
  CHECK_THROWS_AS(mean_rectangle(rq, 0, 1.5, 1, 2), DomainError);
  // log branch is continuous at q = 1
  const double at = mean_rectangle(rp_of(3, 2.0, 2.0), 0, 1, 1, 2);
  const double lo = mean_rectangle(rp_of(3, 2.0, 2.0 - 2e-6), 0, 1, 1, 2);
  const double hi = mean_rectangle(rp_of(3, 2.0, 2.0 + 2e-6), 0, 1, 1, 2);
  CHECK(lo == doctest::Approx(at).epsilon(1e-4));
  CHECK(hi == doctest::Approx(at).epsilon(1e-4));
}

TEST_CASE("Riesz composition constant against quadrature") {
  bq::tanh_sinh<double> ts;
  bq::exp_sinh<double> es;
  {
    // d = 1, sigma = 0.5: int |z|^{-3/4} |y - z|^{-3/4} dz
    const double a = 0.75;
    auto lhs = [&](double y) {
      const double mid = ts.integrate([&](double z) { return std::pow(z, -a) * std::pow(y - z, -a); }, 0.0, y);
      auto g = [&](double u) { return std::pow(u, -a) * std::pow(y + u, -a); };
      const double tail = ts.integrate(g, 0.0, 1.0) + es.integrate([&](double v) { return g(1.0 + v); });
      return mid + 2.0 * tail;
    };
    CHECK(lhs(1.0) == doctest::Approx(riesz_composition_constant(1, 0.5)).epsilon(1e-3));
    CHECK(lhs(2.0) == doctest::Approx(std::pow(2.0, -0.5) * lhs(1.0)).epsilon(1e-6));
  }
  {
    // d = 3, sigma = 1: after the angular integral, int_0^inf (2 pi / r) log|(1 + r)/(1 - r)| dr
    auto f = [](double r) { return 2.0 * kPi / r * std::log(std::abs((1.0 + r) / (1.0 - r))); };
    const double v = ts.integrate(f, 0.0, 1.0) + ts.integrate(f, 1.0, 2.0) +
                     es.integrate([&](double u) { return f(2.0 + u); });
    CHECK(v == doctest::Approx(riesz_composition_constant(3, 1.0)).epsilon(1e-3));
    CHECK(riesz_composition_constant(3, 1.0) == doctest::Approx(kPi * kPi * kPi));
  }
  CHECK_THROWS_AS(riesz_composition_constant(1, 1.0), ParameterError);
}

TEST_CASE("C_{d,sigma}: Fourier transform of phi_{d-sigma}") {
  CHECK(c_d_sigma(3, 1.0) == doctest::Approx(1.0 / (2.0 * kPi * kPi)));
  for (int d = 1; d <= 4; ++d)
    for (double s = 0.1; s < d; s += 0.3) CHECK(c_d_sigma(d, s) > 0.0);
  // d = 1, sigma = 0.5: 2 C int_0^inf lambda^{-1/2} cos(lambda x) d lambda at x = 1
  bq::ooura_fourier_cos<double> cosine;
  const auto [v, err] = cosine.integrate([](double l) { return std::pow(l, -0.5); }, 1.0);
  (void)err;
  CHECK(2.0 * c_d_sigma(1, 0.5) * v == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("band rule expectation by MC") {
  const auto rp = rp_of(2, 2.0, 0.5);
  McEstimate e;
  for (int r = 0; r < 3000; ++r) e.add(eta(sample_path(rp.stable, 1.0, 64, seed_for(5, Lane::Oracle, r)), rp));
  CHECK(std::abs(e.mean() - eta_rule_mean(rp, 1.0, 64, 1)) < 3.0 * *e.std_error());
}

TEST_CASE("eta scales exactly under path rescaling") {
  const auto rp = rp_of(2, 2.0, 0.5);
  const auto p = sample_path(rp.stable, 1.0, 64, seed_for(6, Lane::Path, 0));
  const double c = 3.0;
  std::vector<double> coords(p.coords().begin(), p.coords().end());
  for (double& x : coords) x *= std::pow(c, 1.0 / rp.beta());
  const StablePath big(rp.stable, c, 64, coords);
  QuadratureSpec q;
  q.mean_correction = true;
  CHECK(eta(big, rp, q) == doctest::Approx(std::pow(c, 2.0 - rp.q()) * eta(p, rp, q)).epsilon(1e-12));
}

TEST_CASE("eta is nondecreasing in t and shift properties") {
  const auto rp = rp_of(1, 2.0, 0.5);
  const auto p = sample_path(rp.stable, 1.0, 128, seed_for(8, Lane::Path, 0));
  double prev = 0.0;
  for (int m = 8; m <= 128; m += 8) {
    const double v = eta(p.prefix(m), rp);
    CHECK(v >= prev);
    prev = v;
  }
  const std::vector<double> z0{0.0};
  CHECK(eta_shifted(p, z0, rp) == eta(p, rp));
  const double diam = p.coordinate_extent();
  double last = std::numeric_limits<double>::infinity();
  for (double z = diam + 1.0; z < diam + 50.0; z *= 1.5) {
    const std::vector<double> zz{z};
    const double v = eta_shifted(p, zz, rp);
    CHECK(v < last);
    CHECK(v <= 0.5 * std::pow(z - diam, -rp.sigma) * 1.0000001);
    last = v;
  }
  const std::vector<double> za{0.7}, zb{0.7 + 1e-7};
  CHECK(eta_shifted(p, za, rp) == doctest::Approx(eta_shifted(p, zb, rp)).epsilon(1e-5));
  // z != 0 accepted in the renormalizable regime
  const auto rr = rp_of(3, 2.0, 2.0);
  const auto p3 = sample_path(rr.stable, 1.0, 32, seed_for(8, Lane::Path, 1));
  const std::vector<double> z3{5.0, 0.0, 0.0};
  CHECK(eta_shifted(p3, z3, rr) > 0.0);
}

TEST_CASE("band quadrature converges at order 1 - sigma/beta") {
  // X_s = s with beta = 1: |X_s - X_r|^{-sigma} = (s - r)^{-sigma}, smooth away from the band
  const auto rp = rp_of(1, 1.0, 0.5);
  std::vector<double> v;
  for (int n : {64, 128, 256, 512, 1024}) v.push_back(eta(line_path(1, 1.0, 1.0, n, 1.0), rp));
  for (std::size_t i = 0; i + 2 < v.size(); ++i) {
    const double order = std::log2((v[i + 1] - v[i]) / (v[i + 2] - v[i + 1]));
    CHECK(std::abs(order - (1.0 - rp.q())) < 0.2);
  }
  // the raw rule tends to the exact value 1 / ((1 - q)(2 - q)) = 4/3 from below
  CHECK(v.back() < 4.0 / 3.0);
  CHECK(v.back() == doctest::Approx(4.0 / 3.0).epsilon(0.1));
}

TEST_CASE("zeta: symmetry, empty rectangle, mean") {
  const auto rp = rp_of(2, 2.0, 1.0);
  const auto a = sample_path(rp.stable, 1.0, 64, seed_for(9, Lane::Path, 0));
  const auto b = sample_path(rp.stable, 1.0, 64, seed_for(9, Lane::PathB, 0));
  CHECK(zeta(a, b, rp, 0.5, 1.0) == doctest::Approx(zeta(b, a, rp, 1.0, 0.5)).epsilon(1e-12));
  CHECK(zeta(a, b, rp, 0.0, 1.0) == 0.0);
  McEstimate e;
  for (int r = 0; r < 2000; ++r) {
    const auto x = sample_path(rp.stable, 1.0, 64, seed_for(10, Lane::Path, r));
    const auto y = sample_path(rp.stable, 1.0, 64, seed_for(10, Lane::PathB, r));
    e.add(zeta(x, y, rp, 1.0, 0.5));
  }
  CHECK(std::abs(e.mean() - mean_rectangle(rp, -1.0, 0.0, 0.0, 0.5)) < 3.0 * *e.std_error() + 0.01);
}

TEST_CASE("occupation field") {
  const StablePath zero({2, 2.0}, 2.5, 10, std::vector<double>(22, 0.0));
  const std::vector<double> x{0.6, 0.8};
  CHECK(xi_field(zero, x, rp_of(2, 2.0, 0.5)) == doctest::Approx(2.5));

  const auto p = sample_path({1, 2.0}, 1.0, 16, seed_for(12, Lane::Path, 0));
  bq::tanh_sinh<double> ts;
  for (double xx : {0.05, -0.3, 1.7}) {
    double ref = 0.0;
    for (int i = 0; i < 16; ++i) {
      const double A = p.position(i)[0] - xx, B = p.position(i + 1)[0] - xx;
      auto f = [&](double tau) { return std::pow(std::abs(A + (B - A) * tau), -0.6); };
      if (A * B < 0.0) {
        const double root = A / (A - B);
        ref += ts.integrate(f, 0.0, root) + ts.integrate(f, root, 1.0);
      } else {
        ref += ts.integrate(f, 0.0, 1.0);
      }
    }
    ref *= p.dt();
    const std::vector<double> xv{xx};
    CHECK(occupation_integral(p, xv, 0.6) == doctest::Approx(ref).epsilon(1e-6));
  }
  // d = 2 adaptive rule against a nested oracle on one segment
  const std::vector<double> seg{0.0, 0.0, 1.0, 0.5};
  const StablePath two({2, 2.0}, 1.0, 1, seg);
  const std::vector<double> y{0.3, 0.2};
  auto g = [&](double tau) {
    const double dx = tau - 0.3, dy = 0.5 * tau - 0.2;
    return std::pow(dx * dx + dy * dy, -0.6);
  };
  bq::gauss_kronrod<double, 61> gk;
  const double ref2 = gk.integrate(g, 0.0, 1.0, 15, 1e-12);
  CHECK(occupation_integral(two, y, 1.2) == doctest::Approx(ref2).epsilon(1e-6));
  // monotone in t
  const auto p2 = sample_path({2, 2.0}, 1.0, 64, seed_for(13, Lane::Path, 0));
  const std::vector<double> z{0.4, -0.1};
  CHECK(xi_field(p2, z, rp_of(2, 2.0, 0.5)) >= xi_field(p2.prefix(32), z, rp_of(2, 2.0, 0.5)));
}

TEST_CASE("sqrt eta is sub-additive in mean") {
  const auto rp = rp_of(2, 2.0, 0.5);
  McEstimate one, two;
  for (int r = 0; r < 1000; ++r) {
    two.add(std::sqrt(eta(sample_path(rp.stable, 2.0, 128, seed_for(14, Lane::Path, r)), rp)));
    one.add(std::sqrt(eta(sample_path(rp.stable, 1.0, 64, seed_for(14, Lane::PathB, r)), rp)));
  }
  CHECK(two.mean() <= 2.0 * one.mean() + 3.0 * (*two.std_error() + 2.0 * *one.std_error()));
}
