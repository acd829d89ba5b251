#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "riesz/error.hpp"
#include "riesz/mc.hpp"
#include "riesz/spectral.hpp"

using namespace riesz;
namespace bq = boost::math::quadrature;

namespace {

constexpr double kPi = std::numbers::pi;

// int_0^{1000 pi} f, one Gauss-Kronrod panel per half period
template <class F>
double panels(const F& f) {
  bq::gauss_kronrod<double, 31> gk;
  double s = 0.0;
  for (int k = 0; k < 2000; ++k) s += gk.integrate(f, 0.5 * kPi * k, 0.5 * kPi * (k + 1), 0, 1e-13);
  return s;
}

// theta(x) in d = 1 by direct quadrature: 2 int_0^{2/eps} cos(x l) wp(l) dl
double theta_oracle(const SpectralWeight& sw, double x) {
  bq::tanh_sinh<double> ts;
  auto f = [&](double l) {
    const std::vector<double> v{l};
    return l < 1e-100 ? 0.0 : std::cos(x * l) * sw.value(v);
  };
  const double top = 2.0 / sw.epsilon;
  return 2.0 * (ts.integrate(f, 0.0, 0.5 * top) + ts.integrate(f, 0.5 * top, top));
}

}  // namespace

TEST_CASE("h is a probability density with normaliser (4 pi)^d") {
  const std::vector<double> z1{0.0}, z2{0.0, 0.0};
  CHECK(h_density(z1) == doctest::Approx(4.0 / (4.0 * kPi)));
  CHECK(h_density(z2) == doctest::Approx(16.0 / (16.0 * kPi * kPi)));
  const double L = 1000.0 * kPi;
  auto sinc2 = [](double x) { return x == 0.0 ? 1.0 : std::pow(std::sin(x) / x, 2); };
  // int_R (sin x / x)^2 = pi, tail beyond L is 1/(2L) to O(L^-3) since sin(2L) = 0
  const double half = panels(sinc2) + 0.5 / L;
  CHECK(2.0 * half == doctest::Approx(kPi).epsilon(1e-6));
  auto h = [](double x) {
    const std::vector<double> v{x};
    return h_density(v);
  };
  CHECK(2.0 * (panels(h) + 4.0 / (4.0 * kPi) * 0.5 / L) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("h_hat closed form against the Fourier integral") {
  const std::vector<double> zero{0.0}, one{1.0}, out{2.0, 0.3};
  CHECK(h_hat(zero) == 1.0);
  CHECK(h_hat(one) == doctest::Approx(0.5));
  CHECK(h_hat(out) == 0.0);
  for (double l : {0.5, 1.0, 1.5, 2.5}) {
    auto f = [&](double x) {
      const std::vector<double> v{x};
      return h_density(v) * std::cos(l * x);
    };
    const std::vector<double> lv{l};
    CHECK(2.0 * panels(f) == doctest::Approx(h_hat(lv)).epsilon(1e-6 / std::max(h_hat(lv), 1e-3)));
  }
}

TEST_CASE("weight: domination chain, monotone in alpha, support") {
  const RieszParams rp{{2, 2.0}, 0.7};
  const SpectralWeight a{rp, 0.3, 0.5}, z{rp, 0.0, 0.5}, b{rp, 1.0, 0.5};
  Engine rng(4);
  for (int k = 0; k < 100; ++k) {
    const std::vector<double> l{4.0 * standard_normal(rng), 4.0 * standard_normal(rng)};
    CHECK(a.value(l) <= z.value(l));
    CHECK(z.value(l) <= phi_weight(rp, l) * (1.0 + 1e-14));
    CHECK(b.value(l) <= a.value(l));
  }
  const std::vector<double> far{4.0, 0.1}, origin{0.0, 0.0};
  CHECK(a.value(far) == 0.0);
  CHECK_THROWS_AS(z.value(origin), DomainError);
  CHECK(a.value(origin) == doctest::Approx(c_d_sigma(2, 0.7) / 0.3));
}

TEST_CASE("theta table: origin, evenness, pointwise values") {
  const RieszParams rp{{1, 2.0}, 0.5};
  for (double alpha : {0.0, 0.2}) {
    const SpectralWeight sw{rp, alpha, 0.5};
    const auto th = ThetaKernel::build(sw, {});
    QuadratureSpec fine_q;
    fine_q.lambda_spacing = 0.25 / 12.0 / 4.0;
    const auto fine = ThetaKernel::build(sw, fine_q);
    CAPTURE(alpha);
    const double o0 = theta_oracle(sw, 0.0);
    CHECK(th.at_origin() == doctest::Approx(o0).epsilon(1e-3));
    for (double x : {0.0, 0.3, 1.7, 5.2}) {
      const std::vector<double> p{x}, m{-x};
      CHECK(th(p) == th(m));
      const double o = theta_oracle(sw, x);
      const double e = std::abs(th(p) - o), ef = std::abs(fine(p) - o);
      CAPTURE(x);
      CHECK(e < 1e-3 * o0 + th.interpolation_error());
      // the frequency rule error falls as the spacing shrinks
      CHECK(ef < 0.5 * e + fine.interpolation_error());
    }
    const std::vector<double> beyond{th.radius() + 0.1};
    CHECK_THROWS_AS(th(beyond), RangeError);
  }
  // large alpha: theta(0) ~ C / alpha * int h_hat^2(eps l) dl = 4 C / (3 alpha eps)
  const SpectralWeight big{rp, 1e4, 0.5};
  const auto tb = ThetaKernel::build(big, {});
  CHECK(tb.at_origin() == doctest::Approx(4.0 * c_d_sigma(1, 0.5) / (3.0 * 1e4 * 0.5)).epsilon(0.01));
}

TEST_CASE("theta table in d = 2 matches the frequency sum") {
  const RieszParams rp{{2, 2.0}, 1.0};
  const SpectralWeight sw{rp, 0.2, 1.0};
  QuadratureSpec q;
  q.theta_radius = 4.0;
  const auto quad = LambdaQuadrature::for_weight(sw, q);
  const auto th = ThetaKernel(sw, quad, 0.05, 4.0);
  for (double x : {0.0, 0.5, 1.3}) {
    for (double y : {0.0, 0.25, 2.0}) {
      const std::vector<double> p{x, y}, m{-x, y};
      const double direct = quad.integrate([&](std::span<const double> l) {
        return std::cos(l[0] * x + l[1] * y) * sw.value(l);
      });
      CHECK(th(p) == th(m));
      CHECK(std::abs(th(p) - direct) <= th.interpolation_error() + 1e-10);
    }
  }
}

TEST_CASE("time and frequency forms") {
  const RieszParams rp{{1, 2.0}, 0.5};
  const SpectralWeight sw{rp, 0.2, 0.5};
  const auto quad = LambdaQuadrature::for_weight(sw, {});
  const auto th = ThetaKernel::build(sw, {});
  // constant path: full-square value tau^2 theta(0), ordered half of it
  const StablePath zero({1, 2.0}, 1.5, 30, std::vector<double>(31, 0.0));
  CHECK(2.0 * eta_smoothed_time(zero, th) == doctest::Approx(1.5 * 1.5 * th.at_origin()));
  for (int r = 0; r < 10; ++r) {
    const auto p = sample_path(rp.stable, 1.0, 128, seed_for(3, Lane::Path, r));
    const double f = eta_smoothed_freq(p, sw, quad);
    CHECK(f >= 0.0);
    CHECK(eta_smoothed_time(p, th) == doctest::Approx(f).epsilon(0.01));
    CHECK(f <= eta_phi_freq(p, rp, quad));
  }
}

TEST_CASE("smoothed value increases toward eta as alpha, eps -> 0") {
  const RieszParams rp{{1, 2.0}, 0.5};
  QuadratureSpec qe;
  qe.mean_correction = true;
  for (int r = 0; r < 3; ++r) {
    const auto p = sample_path(rp.stable, 1.0, 512, seed_for(4, Lane::Path, r));
    const double full = eta(p, rp, qe);
    double prev = 0.0;
    for (double s : {0.4, 0.2, 0.1, 0.05}) {
      const SpectralWeight sw{rp, s, s};
      const double v = eta_smoothed_freq(p, sw, LambdaQuadrature::for_weight(sw, {}));
      CHECK(v > prev);
      CHECK(v < full * 1.02);
      prev = v;
    }
    CHECK(prev > 0.6 * full);
  }
}

TEST_CASE("halving the frequency spacing changes little") {
  const RieszParams rp{{1, 2.0}, 0.5};
  const SpectralWeight sw{rp, 0.2, 0.5};
  QuadratureSpec q;
  q.lambda_spacing = 0.04;
  const auto coarse = LambdaQuadrature::for_weight(sw, q);
  q.lambda_spacing = 0.02;
  const auto fine = LambdaQuadrature::for_weight(sw, q);
  for (int r = 0; r < 5; ++r) {
    const auto p = sample_path(rp.stable, 1.0, 256, seed_for(5, Lane::Path, r));
    CHECK(eta_smoothed_freq(p, sw, coarse) == doctest::Approx(eta_smoothed_freq(p, sw, fine)).epsilon(0.005));
  }
}

TEST_CASE("theta table save and load") {
  const SpectralWeight sw{{{1, 2.0}, 0.5}, 0.2, 0.5};
  const auto th = ThetaKernel::build(sw, {});
  std::stringstream ss;
  th.save(ss);
  const auto back = ThetaKernel::load(ss);
  CHECK(back.points() == th.points());
  CHECK(back.table() == th.table());
  std::istringstream bad("nonsense 1 2 3");
  CHECK_THROWS_AS(ThetaKernel::load(bad), ParameterError);
}

TEST_CASE("path outside the theta table") {
  const RieszParams rp{{1, 2.0}, 0.5};
  QuadratureSpec q;
  q.theta_radius = 0.5;
  const auto th = ThetaKernel::build({rp, 0.2, 0.5}, q);
  std::vector<double> c{0.0, 1.0, 2.0};
  CHECK_THROWS_AS(eta_smoothed_time(StablePath({1, 2.0}, 1.0, 2, c), th), RangeError);
}
