#pragma once

#include <cmath>
#include <iosfwd>
#include <span>
#include <vector>

#include "riesz/riesz.hpp"

namespace riesz {

// h(x) = (4 pi)^{-d} prod_j (2 sin x_j / x_j)^2, a probability density.
double h_density(std::span<const double> x);
// Its Fourier transform prod_j (1 - |lambda_j| / 2)^+.
double h_hat(std::span<const double> lambda);

// wp(lambda) = C_{d,sigma} h_hat^2(eps lambda) / (alpha + |lambda|^{d - sigma}).
struct SpectralWeight {
  RieszParams rp;
  double alpha = 0.0;
  double epsilon = 1.0;

  void validate() const;
  double support() const noexcept { return 2.0 / epsilon; }
  // DomainError at lambda = 0 when alpha == 0 (integrable singularity).
  double value(std::span<const double> lambda) const;
};

// phi_{d-sigma}(lambda) = C_{d,sigma} |lambda|^{sigma - d}.
double phi_weight(const RieszParams& rp, std::span<const double> lambda);

// Midpoint tensor rule on [-L, L]^d, L = 2 / eps, with an even number of cells per axis so
// that no node sits on lambda = 0. The central block of up to 8^d cells is replaced by dyadic
// shells (down to h 2^-lambda_refine) with Gauss-Legendre nodes, which keeps the cusp /
// singularity at 0 resolved.
class LambdaQuadrature {
 public:
  LambdaQuadrature(int d, double half_width, int cells, int refine);
  static LambdaQuadrature for_weight(const SpectralWeight& sw, const QuadratureSpec& q);

  int dim() const noexcept { return d_; }
  double lambda0() const noexcept { return lambda0_; }
  double spacing() const noexcept { return h_; }
  int cells() const noexcept { return cells_; }
  double half_width() const noexcept { return half_; }
  // refined nodes, row-major (count x d), with their cell volumes
  const std::vector<double>& refined_nodes() const noexcept { return ref_nodes_; }
  const std::vector<double>& refined_volumes() const noexcept { return ref_vol_; }
  // refined nodes are stored orthant by orthant; the first orthant_nodes() lie in the
  // positive orthant and the rest are its reflections, in the same order
  std::size_t orthant_nodes() const noexcept { return orthant_nodes_; }
  // true for uniform cells replaced by the refinement
  bool is_origin_cell(std::span<const int> idx) const;

  // Node weights f(lambda) * volume: uniform grid (row-major, origin cells zero) and refined.
  template <class F>
  void coefficients(const F& f, std::vector<double>& grid, std::vector<double>& refined) const;

  // Sum of f over the rule.
  template <class F>
  double integrate(const F& f) const {
    std::vector<double> g, r;
    coefficients(f, g, r);
    double s = 0.0;
    for (double v : g) s += v;
    for (double v : r) s += v;
    return s;
  }

 private:
  int d_;
  double half_;
  int cells_;
  double h_;
  double lambda0_;
  int patch_ = 1;
  std::size_t orthant_nodes_ = 0;
  std::vector<double> ref_nodes_;
  std::vector<double> ref_vol_;
};

// theta(x) = int exp(i x . lambda) wp(lambda) d lambda on the lambda rule, tabulated on the
// orthant grid x_j = m delta (theta is even in each coordinate) and interpolated
// multilinearly.
class ThetaKernel {
 public:
  ThetaKernel() = default;
  ThetaKernel(const SpectralWeight& sw, const LambdaQuadrature& quad, double spacing, double radius);
  static ThetaKernel build(const SpectralWeight& sw, const QuadratureSpec& q);

  int dim() const noexcept { return d_; }
  double spacing() const noexcept { return delta_; }
  double radius() const noexcept { return delta_ * (points_ - 1); }
  int points() const noexcept { return points_; }
  double at_origin() const noexcept { return table_.empty() ? 0.0 : table_[0]; }
  // bound on the multilinear interpolation error: sum over axes of max |second difference| / 8
  double interpolation_error() const noexcept { return interp_err_; }
  const std::vector<double>& table() const noexcept { return table_; }

  // RangeError outside the table.
  double operator()(std::span<const double> x) const;

  void save(std::ostream& out) const;
  static ThetaKernel load(std::istream& in);

 private:
  int d_ = 1;
  double delta_ = 0.0;
  int points_ = 0;
  std::vector<double> table_;
  double interp_err_ = 0.0;
};

// Ordered-pair value eta_{alpha,eps}([0,tau]^2_<) (half of the full square), time form:
// trapezoid double sum of theta(X_s1 - X_s2).
double eta_smoothed_time(const StablePath& path, const ThetaKernel& theta);

// Same, frequency form: sum over the lambda rule of wp |int_0^tau exp(i lambda . X_s) ds|^2 / 2.
double eta_smoothed_freq(const StablePath& path, const SpectralWeight& sw,
                         const LambdaQuadrature& quad);

// Frequency form with phi_{d-sigma} in place of wp on the same (truncated) rule.
double eta_phi_freq(const StablePath& path, const RieszParams& rp, const LambdaQuadrature& quad);

// ---- template implementation

template <class F>
void LambdaQuadrature::coefficients(const F& f, std::vector<double>& grid,
                                    std::vector<double>& refined) const {
  std::size_t total = 1;
  for (int a = 0; a < d_; ++a) total *= static_cast<std::size_t>(cells_);
  grid.assign(total, 0.0);
  std::vector<int> idx(static_cast<std::size_t>(d_), 0);
  std::vector<double> lam(static_cast<std::size_t>(d_));
  const double vol = std::pow(h_, d_);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int a = d_ - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(cells_));
      rem /= static_cast<std::size_t>(cells_);
    }
    if (is_origin_cell(idx)) continue;
    for (int a = 0; a < d_; ++a) lam[static_cast<std::size_t>(a)] = lambda0_ + idx[static_cast<std::size_t>(a)] * h_;
    grid[flat] = f(std::span<const double>(lam)) * vol;
  }
  refined.resize(ref_vol_.size());
  for (std::size_t m = 0; m < ref_vol_.size(); ++m)
    refined[m] = f(std::span<const double>(ref_nodes_.data() + m * d_, static_cast<std::size_t>(d_))) * ref_vol_[m];
}

}  // namespace riesz
