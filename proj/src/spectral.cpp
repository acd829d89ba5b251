#include "riesz/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "riesz/error.hpp"
#include "riesz/kernels.hpp"

namespace riesz {

namespace {
constexpr double kPi = std::numbers::pi;

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> trapezoid_time_weights(const StablePath& path) {
  std::vector<double> w(path.size(), path.dt());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}
}  // namespace

double h_density(std::span<const double> x) {
  double v = std::pow(4.0 * kPi, -static_cast<double>(x.size()));
  for (double xi : x) {
    const double s = xi == 0.0 ? 2.0 : 2.0 * std::sin(xi) / xi;
    v *= s * s;
  }
  return v;
}

double h_hat(std::span<const double> lambda) {
  double v = 1.0;
  for (double l : lambda) v *= std::max(0.0, 1.0 - 0.5 * std::abs(l));
  return v;
}

void SpectralWeight::validate() const {
  rp.stable.validate();
  if (!(rp.sigma > 0.0 && rp.sigma < rp.d())) throw ParameterError("spectral weight needs 0 < sigma < d");
  if (!(alpha >= 0.0)) throw ParameterError("alpha must be >= 0");
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be > 0");
}

double SpectralWeight::value(std::span<const double> lambda) const {
  const double r = norm(lambda);
  if (r == 0.0 && alpha == 0.0) throw DomainError("weight is singular at lambda = 0 when alpha = 0");
  double hh = 1.0;
  for (double l : lambda) hh *= std::max(0.0, 1.0 - 0.5 * std::abs(epsilon * l));
  if (hh == 0.0) return 0.0;
  const double denom = alpha + (r == 0.0 ? 0.0 : std::pow(r, rp.d() - rp.sigma));
  return c_d_sigma(rp.d(), rp.sigma) * hh * hh / denom;
}

double phi_weight(const RieszParams& rp, std::span<const double> lambda) {
  const double r = norm(lambda);
  if (r == 0.0) throw DomainError("phi weight is singular at lambda = 0");
  return c_d_sigma(rp.d(), rp.sigma) * std::pow(r, rp.sigma - rp.d());
}

LambdaQuadrature::LambdaQuadrature(int d, double half_width, int cells, int refine)
    : d_(d), half_(half_width), cells_(cells) {
  if (d < 1) throw ParameterError("dimension must be >= 1");
  if (!(half_width > 0.0)) throw ParameterError("frequency box half-width must be > 0");
  if (cells < 2 || cells % 2 != 0) throw ParameterError("frequency cells per axis must be even and >= 2");
  if (refine < 0) throw ParameterError("refinement depth must be >= 0");
  h_ = 2.0 * half_width / cells;
  lambda0_ = -half_width + 0.5 * h_;

  // Origin patch: the central (2P)^d block of uniform cells. In the positive orthant it is
  // the cube [0, P h]^d, split into dyadic shells down to size h 2^-refine; every shell
  // subcube (and the last cube at the origin) gets a 3-point Gauss-Legendre tensor rule,
  // which is accurate for the smooth-but-steep |lambda|^{sigma-d} away from 0 and never
  // evaluates at 0 itself.
  patch_ = 1;
  while (patch_ < 4 && 2 * patch_ <= cells / 2) patch_ *= 2;
  constexpr double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  constexpr double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  std::vector<double> pos_nodes, pos_vol;
  std::vector<double> node(static_cast<std::size_t>(d));
  auto gauss_cube = [&](const std::vector<double>& lo, double side) {
    int total = 1;
    for (int a = 0; a < d; ++a) total *= 3;
    for (int g = 0; g < total; ++g) {
      double wt = std::pow(0.5 * side, d);
      int rem = g;
      for (int a = 0; a < d; ++a) {
        const int k = rem % 3;
        rem /= 3;
        node[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)] + 0.5 * side * (1.0 + gx[k]);
        wt *= gw[k];
      }
      pos_nodes.insert(pos_nodes.end(), node.begin(), node.end());
      pos_vol.push_back(wt);
    }
  };
  int levels = refine;
  for (int p = patch_; p > 1; p /= 2) ++levels;
  double w = patch_ * h_;
  std::vector<double> lo(static_cast<std::size_t>(d));
  for (int level = 0; level <= levels; ++level) {
    if (level == levels) {
      std::fill(lo.begin(), lo.end(), 0.0);
      gauss_cube(lo, w);
      break;
    }
    const double half = 0.5 * w;
    for (int c = 1; c < (1 << d); ++c) {  // c == 0 is the subcube touching the origin
      for (int a = 0; a < d; ++a) lo[static_cast<std::size_t>(a)] = (c >> a) & 1 ? half : 0.0;
      gauss_cube(lo, half);
    }
    w = half;
  }
  // reflect into every orthant
  for (int sign = 0; sign < (1 << d); ++sign) {
    for (std::size_t m = 0; m < pos_vol.size(); ++m) {
      for (int a = 0; a < d; ++a) {
        const double v = pos_nodes[m * d + a];
        ref_nodes_.push_back((sign >> a) & 1 ? -v : v);
      }
      ref_vol_.push_back(pos_vol[m]);
    }
  }
  orthant_nodes_ = pos_vol.size();
}

LambdaQuadrature LambdaQuadrature::for_weight(const SpectralWeight& sw, const QuadratureSpec& q) {
  sw.validate();
  q.validate();
  const double half = sw.support();
  const double target = q.lambda_spacing > 0.0 ? q.lambda_spacing : 0.25 / q.theta_radius;
  const int cells = 2 * static_cast<int>(std::ceil(half / target));
  return LambdaQuadrature(sw.rp.d(), half, cells, q.lambda_refine);
}

bool LambdaQuadrature::is_origin_cell(std::span<const int> idx) const {
  const int lo = cells_ / 2 - patch_, hi = cells_ / 2 + patch_ - 1;
  for (int i : idx)
    if (i < lo || i > hi) return false;
  return true;
}

namespace {

// B = A x_axis M with M of shape (P x K): the axis of size K becomes size P.
std::vector<double> mode_product(const std::vector<double>& A, std::vector<int>& shape, int axis,
                                 const std::vector<double>& M, int P) {
  const int K = shape[static_cast<std::size_t>(axis)];
  std::size_t outer = 1, inner = 1;
  for (int a = 0; a < axis; ++a) outer *= static_cast<std::size_t>(shape[static_cast<std::size_t>(a)]);
  for (std::size_t a = static_cast<std::size_t>(axis) + 1; a < shape.size(); ++a)
    inner *= static_cast<std::size_t>(shape[a]);
  std::vector<double> B(outer * static_cast<std::size_t>(P) * inner, 0.0);
#pragma omp parallel for schedule(static)
  for (int p = 0; p < P; ++p) {
    for (std::size_t o = 0; o < outer; ++o) {
      double* dst = B.data() + (o * P + p) * inner;
      for (int k = 0; k < K; ++k) {
        const double m = M[static_cast<std::size_t>(p) * K + k];
        if (m == 0.0) continue;
        const double* src = A.data() + (o * K + k) * inner;
        for (std::size_t i = 0; i < inner; ++i) dst[i] += m * src[i];
      }
    }
  }
  shape[static_cast<std::size_t>(axis)] = P;
  return B;
}

}  // namespace

ThetaKernel::ThetaKernel(const SpectralWeight& sw, const LambdaQuadrature& quad, double spacing,
                         double radius) {
  sw.validate();
  if (quad.dim() != sw.rp.d()) throw ParameterError("frequency rule has the wrong dimension");
  if (!(spacing > 0.0 && radius > 0.0)) throw ParameterError("theta table spacing and radius must be > 0");
  d_ = sw.rp.d();
  delta_ = spacing;
  points_ = static_cast<int>(std::ceil(radius / spacing)) + 1;
  const double max_points = std::pow(points_, d_);
  if (max_points > 5e7) throw ResolutionError("theta table too large for the requested spacing and radius");

  std::vector<double> grid, refined;
  quad.coefficients([&](std::span<const double> l) { return sw.value(l); }, grid, refined);

  // Fold the uniform coefficients onto positive frequencies (cos is even per axis).
  const int cells = quad.cells();
  const int half = cells / 2;
  std::size_t folded_size = 1;
  for (int a = 0; a < d_; ++a) folded_size *= static_cast<std::size_t>(half);
  std::vector<double> folded(folded_size, 0.0);
  std::vector<int> idx(static_cast<std::size_t>(d_));
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    if (grid[flat] == 0.0) continue;
    std::size_t rem = flat;
    for (int a = d_ - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(cells));
      rem /= static_cast<std::size_t>(cells);
    }
    std::size_t f = 0;
    for (int a = 0; a < d_; ++a) {
      int k = idx[static_cast<std::size_t>(a)];
      k = k >= half ? k - half : half - 1 - k;
      f = f * static_cast<std::size_t>(half) + static_cast<std::size_t>(k);
    }
    folded[f] += grid[flat];
  }
  std::vector<double> cosm(static_cast<std::size_t>(points_) * half);
  for (int p = 0; p < points_; ++p)
    for (int k = 0; k < half; ++k) {
      const double lam = quad.lambda0() + (half + k) * quad.spacing();
      cosm[static_cast<std::size_t>(p) * half + k] = std::cos(lam * p * delta_);
    }
  std::vector<int> shape(static_cast<std::size_t>(d_), half);
  std::vector<double> T = std::move(folded);
  for (int a = 0; a < d_; ++a) T = mode_product(T, shape, a, cosm, points_);

  // refined nodes, direct; cos is even so the reflections fold onto the positive orthant
  const auto& rn = quad.refined_nodes();
  const std::size_t nref = quad.orthant_nodes();
  for (std::size_t m = nref; m < refined.size(); ++m) refined[m % nref] += refined[m];
  std::vector<double> rcos(nref * d_ * points_);
  for (std::size_t m = 0; m < nref; ++m)
    for (int a = 0; a < d_; ++a)
      for (int p = 0; p < points_; ++p)
        rcos[(m * d_ + a) * points_ + p] = std::cos(rn[m * d_ + a] * p * delta_);
#pragma omp parallel for schedule(static)
  for (std::size_t flat = 0; flat < T.size(); ++flat) {
    std::size_t rem = flat;
    std::vector<int> pi(static_cast<std::size_t>(d_));
    for (int a = d_ - 1; a >= 0; --a) {
      pi[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(points_));
      rem /= static_cast<std::size_t>(points_);
    }
    double acc = 0.0;
    for (std::size_t m = 0; m < nref; ++m) {
      double prod = refined[m];
      for (int a = 0; a < d_; ++a) prod *= rcos[(m * d_ + a) * points_ + pi[static_cast<std::size_t>(a)]];
      acc += prod;
    }
    T[flat] += acc;
  }
  table_ = std::move(T);

  // interpolation error bound from second differences along each axis
  interp_err_ = 0.0;
  std::size_t stride = 1;
  for (int a = d_ - 1; a >= 0; --a) {
    double worst = 0.0;
    for (std::size_t flat = 0; flat < table_.size(); ++flat) {
      const int p = static_cast<int>((flat / stride) % static_cast<std::size_t>(points_));
      if (p == 0 || p == points_ - 1) continue;
      worst = std::max(worst, std::abs(table_[flat + stride] - 2.0 * table_[flat] + table_[flat - stride]));
    }
    interp_err_ += worst / 8.0;
    stride *= static_cast<std::size_t>(points_);
  }
}

ThetaKernel ThetaKernel::build(const SpectralWeight& sw, const QuadratureSpec& q) {
  const auto quad = LambdaQuadrature::for_weight(sw, q);
  return ThetaKernel(sw, quad, q.theta_spacing * sw.epsilon, q.theta_radius);
}

double ThetaKernel::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != d_) throw ParameterError("theta argument has the wrong dimension");
  const double lim = radius();
  int base[8];
  double frac[8];
  if (d_ > 8) throw ParameterError("theta interpolation supports d <= 8");
  for (int a = 0; a < d_; ++a) {
    const double ax = std::abs(x[static_cast<std::size_t>(a)]);
    if (ax > lim) throw RangeError("path increment outside the theta table");
    const double u = ax / delta_;
    int i = static_cast<int>(u);
    if (i >= points_ - 1) i = points_ - 2;
    base[a] = i;
    frac[a] = u - i;
  }
  double acc = 0.0;
  for (int c = 0; c < (1 << d_); ++c) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int a = 0; a < d_; ++a) {
      const int bit = (c >> a) & 1;
      w *= bit ? frac[a] : 1.0 - frac[a];
      flat = flat * static_cast<std::size_t>(points_) + static_cast<std::size_t>(base[a] + bit);
    }
    if (w != 0.0) acc += w * table_[flat];
  }
  return acc;
}

void ThetaKernel::save(std::ostream& out) const {
  out.precision(17);
  out << "theta " << d_ << ' ' << delta_ << ' ' << points_ << ' ' << interp_err_ << '\n';
  for (double v : table_) out << v << '\n';
}

ThetaKernel ThetaKernel::load(std::istream& in) {
  std::string tag;
  ThetaKernel k;
  in >> tag >> k.d_ >> k.delta_ >> k.points_ >> k.interp_err_;
  if (!in || tag != "theta" || k.d_ < 1 || k.points_ < 2) throw ParameterError("malformed theta table");
  const double total = std::pow(k.points_, k.d_);
  k.table_.resize(static_cast<std::size_t>(total + 0.5));
  for (double& v : k.table_) in >> v;
  if (!in) throw ParameterError("truncated theta table");
  return k;
}

double eta_smoothed_time(const StablePath& path, const ThetaKernel& theta) {
  if (path.dim() != theta.dim()) throw ParameterError("path and theta table dimensions differ");
  if (path.coordinate_extent() > theta.radius())
    throw RangeError("path extent exceeds the theta table radius");
  const auto w = trapezoid_time_weights(path);
  const int npts = static_cast<int>(path.size());
  const int d = path.dim();
  constexpr int kRows = 16;
  const int blocks = (npts + kRows - 1) / kRows;
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
  const double inv = 1.0 / theta.spacing();
  const auto& tab = theta.table();
  const int P = theta.points();
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < blocks; ++b) {
    double acc = 0.0;
    std::vector<double> diff(static_cast<std::size_t>(d));
    const int end = std::min(npts, (b + 1) * kRows);
    for (int i = b * kRows; i < end; ++i) {
      const auto xi = path.position(i);
      double row = 0.0;
      for (int j = i + 1; j < npts; ++j) {
        const auto xj = path.position(j);
        if (d == 1) {
          const double u = std::abs(xj[0] - xi[0]) * inv;
          int k = static_cast<int>(u);
          if (k >= P - 1) k = P - 2;
          const double f = u - k;
          row += w[static_cast<std::size_t>(j)] * (tab[static_cast<std::size_t>(k)] * (1.0 - f) +
                                                   tab[static_cast<std::size_t>(k) + 1] * f);
        } else {
          for (int a = 0; a < d; ++a) diff[static_cast<std::size_t>(a)] = xj[a] - xi[a];
          row += w[static_cast<std::size_t>(j)] * theta(diff);
        }
      }
      acc += w[static_cast<std::size_t>(i)] * (row + 0.5 * w[static_cast<std::size_t>(i)] * theta.at_origin());
    }
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

namespace {

template <class F>
double freq_form(const StablePath& path, const LambdaQuadrature& quad, const F& weight) {
  if (path.dim() != quad.dim()) throw ParameterError("path and frequency rule dimensions differ");
  std::vector<double> grid, refined;
  quad.coefficients(weight, grid, refined);
  const auto w = trapezoid_time_weights(path);
  const int npts = static_cast<int>(path.size());
  const auto S = kernels::grid_power_sums(path.coords(), npts, path.dim(), w, quad.lambda0(),
                                          quad.spacing(), quad.cells());
  const auto R = kernels::point_power_sums(path.coords(), npts, path.dim(), w, quad.refined_nodes());
  double total = 0.0;
  for (std::size_t k = 0; k < S.size(); ++k)
    if (grid[k] != 0.0) total += grid[k] * std::norm(S[k]);
  for (std::size_t m = 0; m < R.size(); ++m) total += refined[m] * std::norm(R[m]);
  return 0.5 * total;
}

}  // namespace

double eta_smoothed_freq(const StablePath& path, const SpectralWeight& sw,
                         const LambdaQuadrature& quad) {
  sw.validate();
  return freq_form(path, quad, [&](std::span<const double> l) { return sw.value(l); });
}

double eta_phi_freq(const StablePath& path, const RieszParams& rp, const LambdaQuadrature& quad) {
  return freq_form(path, quad, [&](std::span<const double> l) { return phi_weight(rp, l); });
}

}  // namespace riesz
