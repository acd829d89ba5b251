#include "riesz/kernels.hpp"

#include <algorithm>
#include <numbers>

#include <omp.h>

namespace riesz::kernels {

PowerKernel::PowerKernel(double s) : s_(s), half_(0.5 * s), mode_(Mode::General) {
  if (s == 0.5) mode_ = Mode::Quarter;
  else if (s == 1.0) mode_ = Mode::Half;
  else if (s == 1.5) mode_ = Mode::ThreeQuarter;
  else if (s == 2.0) mode_ = Mode::One;
}

double band_weight(int i, int j, int n, int band) {
  double w = 0.0;
  for (int a = i - 1; a <= i; ++a) {
    for (int c = j - 1; c <= j; ++c) {
      if (a < 0 || c < 0 || a > n - 1 || c > n - 1) continue;
      const int lag = c - a;
      if (lag >= band + 1) {
        w += 0.25;
      } else if (lag == band) {
        // upper triangle: every corner except (a + 1, c)
        if (!(i == a + 1 && j == c)) w += 1.0 / 6.0;
      }
    }
  }
  return w;
}

namespace {

inline double sq_dist(const double* xj, const double* xi, const double* z, int d) {
  double r2 = 0.0;
  for (int k = 0; k < d; ++k) {
    const double v = xj[k] - xi[k] - z[k];
    r2 += v * v;
  }
  return r2;
}

template <class K>
double band_row(const double* X, int n, int d, int band, const double* z, const K& kern, int i) {
  const double* xi = X + static_cast<std::size_t>(i) * d;
  auto term = [&](int j) { return kern(sq_dist(X + static_cast<std::size_t>(j) * d, xi, z, d)); };
  const int jfirst = i + band;
  if (jfirst > n) return 0.0;
  double acc = 0.0;
  // edge columns with non-uniform weight
  const int edge_hi = std::min(n, jfirst + 1);
  for (int j = jfirst; j <= edge_hi; ++j) acc += band_weight(i, j, n, band) * term(j);
  const int lo = jfirst + 2;
  const int hi = n - 1;
  if (lo <= hi) {
    double inner = 0.0;
    if (d == 1) {
      const double base = xi[0] + z[0];
      const double* x = X;
      for (int j = lo; j <= hi; ++j) {
        const double v = x[j] - base;
        inner += kern(v * v);
      }
    } else {
      for (int j = lo; j <= hi; ++j) inner += term(j);
    }
    acc += (i == 0 ? 0.5 : 1.0) * inner;
  }
  if (n > edge_hi) acc += band_weight(i, n, n, band) * term(n);
  return acc;
}

template <class K>
double band_sum_blocks(std::span<const double> X, int n, int d, int band, const double* z,
                       const K& kern) {
  constexpr int kRows = 32;
  const int rows = n + 1;
  const int blocks = (rows + kRows - 1) / kRows;
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < blocks; ++b) {
    double acc = 0.0;
    const int end = std::min(rows, (b + 1) * kRows);
    for (int i = b * kRows; i < end; ++i) acc += band_row(X.data(), n, d, band, z, kern, i);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

std::vector<double> zero_shift(std::span<const double> z, int d) {
  std::vector<double> out(static_cast<std::size_t>(d), 0.0);
  for (std::size_t k = 0; k < z.size() && k < out.size(); ++k) out[k] = z[k];
  return out;
}

}  // namespace

double band_pair_sum(std::span<const double> X, int n, int d, int band, std::span<const double> z,
                     double s) {
  const auto zz = zero_shift(z, d);
  const PowerKernel kern(s);
  return band_sum_blocks(X, n, d, band, zz.data(), kern);
}

double band_pair_sum_serial(std::span<const double> X, int n, int d, int band,
                            std::span<const double> z, double s) {
  const auto zz = zero_shift(z, d);
  double total = 0.0;
  for (int i = 0; i <= n; ++i) {
    for (int j = i + band; j <= n; ++j) {
      const double w = band_weight(i, j, n, band);
      if (w == 0.0) continue;
      double r2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double v = X[static_cast<std::size_t>(j) * d + k] -
                         X[static_cast<std::size_t>(i) * d + k] - zz[static_cast<std::size_t>(k)];
        r2 += v * v;
      }
      total += w * std::pow(std::sqrt(r2), -s);
    }
  }
  return total;
}

std::vector<double> band_lag_weights(int n, int band) {
  std::vector<double> W(static_cast<std::size_t>(n) + 1, 0.0);
  for (int L = std::max(band, 0); L <= n; ++L) {
    const int count = n - L + 1;  // i = 0 .. n - L
    double w = band_weight(0, L, n, band);
    if (count >= 2) w += band_weight(n - L, n, n, band);
    if (count >= 3) w += (count - 2) * band_weight(1, 1 + L, n, band);
    W[static_cast<std::size_t>(L)] = w;
  }
  return W;
}

double rectangle_sum(std::span<const double> X, std::span<const int> ia, std::span<const double> wa,
                     std::span<const double> Y, std::span<const int> ic, std::span<const double> wc,
                     int d, double s) {
  const PowerKernel kern(s);
  double total = 0.0;
  for (std::size_t a = 0; a < ia.size(); ++a) {
    if (wa[a] == 0.0) continue;
    const double* xa = X.data() + static_cast<std::size_t>(ia[a]) * d;
    double row = 0.0;
    for (std::size_t c = 0; c < ic.size(); ++c) {
      const double w = wa[a] * wc[c];
      if (w == 0.0) continue;
      const double* yc = Y.data() + static_cast<std::size_t>(ic[c]) * d;
      double r2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double v = yc[k] - xa[k];
        r2 += v * v;
      }
      row += wc[c] * kern(r2);
    }
    total += wa[a] * row;
  }
  return total;
}

namespace {

// Accumulates w * prod_axis phase[axis][k_axis] into S over the full multi-index.
void accumulate_tensor(std::vector<std::complex<double>>& S, const std::complex<double>* phases,
                       int d, int count, std::complex<double> w) {
  if (d == 1) {
    for (int k = 0; k < count; ++k) S[static_cast<std::size_t>(k)] += w * phases[k];
    return;
  }
  // iterate multi-index with partial products per axis
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<std::complex<double>> partial(static_cast<std::size_t>(d) + 1);
  partial[0] = w;
  for (int a = 0; a < d; ++a) partial[a + 1] = partial[a] * phases[static_cast<std::size_t>(a) * count];
  std::size_t flat = 0;
  const std::size_t total = static_cast<std::size_t>(std::pow(count, d) + 0.5);
  while (flat < total) {
    S[flat] += partial[static_cast<std::size_t>(d)];
    ++flat;
    int a = d - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == count) {
      idx[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
    for (int b = a; b < d; ++b)
      partial[b + 1] = partial[b] * phases[static_cast<std::size_t>(b) * count + idx[b]];
  }
}

}  // namespace

std::vector<std::complex<double>> grid_power_sums(std::span<const double> X, int npts, int d,
                                                  std::span<const double> w, double lambda0,
                                                  double h, int count) {
  const std::size_t total = static_cast<std::size_t>(std::pow(count, d) + 0.5);
  if (d == 1) {
    // frequency blocks in parallel; within a block each S_k is summed over i in order
    constexpr int kBlock = 64;
    std::vector<std::complex<double>> S(total);
    const int blocks = (count + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
    for (int b = 0; b < blocks; ++b) {
      const int k0 = b * kBlock;
      const int k1 = std::min(count, k0 + kBlock);
      for (int i = 0; i < npts; ++i) {
        const double x = X[static_cast<std::size_t>(i)];
        std::complex<double> z = std::polar(w[static_cast<std::size_t>(i)], (lambda0 + k0 * h) * x);
        const std::complex<double> r = std::polar(1.0, h * x);
        for (int k = k0; k < k1; ++k) {
          S[static_cast<std::size_t>(k)] += z;
          z *= r;
        }
      }
    }
    return S;
  }
  // d > 1: time points split into fixed blocks, partial grids added in block order
  constexpr int kPts = 16;
  const int blocks = (npts + kPts - 1) / kPts;
  std::vector<std::vector<std::complex<double>>> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < blocks; ++b) {
    std::vector<std::complex<double>> S(total);
    std::vector<std::complex<double>> phases(static_cast<std::size_t>(d) * count);
    const int end = std::min(npts, (b + 1) * kPts);
    for (int i = b * kPts; i < end; ++i) {
      for (int a = 0; a < d; ++a) {
        const double x = X[static_cast<std::size_t>(i) * d + a];
        std::complex<double> z = std::polar(1.0, lambda0 * x);
        const std::complex<double> r = std::polar(1.0, h * x);
        for (int k = 0; k < count; ++k) {
          phases[static_cast<std::size_t>(a) * count + k] = z;
          z *= r;
        }
      }
      accumulate_tensor(S, phases.data(), d, count, w[static_cast<std::size_t>(i)]);
    }
    partial[static_cast<std::size_t>(b)] = std::move(S);
  }
  std::vector<std::complex<double>> S(total);
  for (const auto& p : partial)
    for (std::size_t k = 0; k < total; ++k) S[k] += p[k];
  return S;
}

std::vector<std::complex<double>> grid_power_sums_serial(std::span<const double> X, int npts,
                                                         int d, std::span<const double> w,
                                                         double lambda0, double h, int count) {
  const std::size_t total = static_cast<std::size_t>(std::pow(count, d) + 0.5);
  std::vector<std::complex<double>> S(total);
  std::vector<int> idx(static_cast<std::size_t>(d));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int a = d - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % count);
      rem /= count;
    }
    std::complex<double> acc = 0.0;
    for (int i = 0; i < npts; ++i) {
      double phase = 0.0;
      for (int a = 0; a < d; ++a)
        phase += (lambda0 + idx[static_cast<std::size_t>(a)] * h) * X[static_cast<std::size_t>(i) * d + a];
      acc += w[static_cast<std::size_t>(i)] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    S[flat] = acc;
  }
  return S;
}

std::vector<std::complex<double>> point_power_sums(std::span<const double> X, int npts, int d,
                                                   std::span<const double> w,
                                                   std::span<const double> lambdas) {
  const std::size_t nodes = lambdas.size() / static_cast<std::size_t>(d);
  std::vector<std::complex<double>> S(nodes);
#pragma omp parallel for schedule(static)
  for (std::size_t m = 0; m < nodes; ++m) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < npts; ++i) {
      double phase = 0.0;
      for (int a = 0; a < d; ++a) phase += lambdas[m * d + a] * X[static_cast<std::size_t>(i) * d + a];
      acc += w[static_cast<std::size_t>(i)] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    S[m] = acc;
  }
  return S;
}

}  // namespace riesz::kernels
