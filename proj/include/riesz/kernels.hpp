#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

// Hot loops. Every parallel kernel has a plain serial counterpart (suffix _serial)
// that follows the definition directly; tests compare the two and the benchmark
// target times them. Parallel reductions use fixed blocks combined in order, so
// results do not depend on the thread count.
namespace riesz::kernels {

// r2 -> (r2)^{-s/2} = |x|^{-s}, with fast paths for the common exponents.
class PowerKernel {
 public:
  explicit PowerKernel(double s);
  double exponent() const noexcept { return s_; }

  double operator()(double r2) const noexcept {
    switch (mode_) {
      case Mode::Quarter: return 1.0 / std::sqrt(std::sqrt(r2));
      case Mode::Half: return 1.0 / std::sqrt(r2);
      case Mode::ThreeQuarter: {
        const double r = std::sqrt(std::sqrt(r2));
        return 1.0 / (r * r * r);
      }
      case Mode::One: return 1.0 / r2;
      case Mode::General: break;
    }
    return std::pow(r2, -half_);
  }

 private:
  enum class Mode { Quarter, Half, ThreeQuarter, One, General };
  double s_;
  double half_;
  Mode mode_;
};

// Node weight (units of dt^2) of the trapezoid rule restricted to the region
// {s - r >= band * dt} of [0, n dt]^2. Squares strictly inside the region use the
// tensor trapezoid; the squares cut by the line s - r = band * dt use the linear
// rule on their upper triangle.
double band_weight(int i, int j, int n, int band);

// Sum over r-index i, s-index j with j - i >= band of band_weight(i, j) * |X_j - X_i - z|^{-s}.
// X is row-major (n + 1) x d. z may be empty (treated as 0). Result is in units of dt^2.
double band_pair_sum(std::span<const double> X, int n, int d, int band, std::span<const double> z,
                     double s);
double band_pair_sum_serial(std::span<const double> X, int n, int d, int band,
                            std::span<const double> z, double s);

// Lag-grouped weights W_L = sum_i band_weight(i, i + L), L = 0..n.
std::vector<double> band_lag_weights(int n, int band);

// Sum_{a, c} wa[a] wc[c] |Y[ic[c]] - X[ia[a]]|^{-s} over index lists, skipping pairs with
// zero weight product. Used by the corner-graded rectangle rule.
double rectangle_sum(std::span<const double> X, std::span<const int> ia, std::span<const double> wa,
                     std::span<const double> Y, std::span<const int> ic, std::span<const double> wc,
                     int d, double s);

// Power sums S_k = sum_i w_i exp(i lambda_k . X_i) on the tensor grid
// lambda_k = lambda0 + k * h (per axis, k in [0, count)). Output is row-major over the
// multi-index (axis 0 slowest).
std::vector<std::complex<double>> grid_power_sums(std::span<const double> X, int npts, int d,
                                                  std::span<const double> w, double lambda0,
                                                  double h, int count);
std::vector<std::complex<double>> grid_power_sums_serial(std::span<const double> X, int npts,
                                                         int d, std::span<const double> w,
                                                         double lambda0, double h, int count);

// Power sums at scattered frequencies (row-major nodes x d).
std::vector<std::complex<double>> point_power_sums(std::span<const double> X, int npts, int d,
                                                   std::span<const double> w,
                                                   std::span<const double> lambdas);

}  // namespace riesz::kernels
