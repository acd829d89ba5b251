#pragma once

#include <span>
#include <string>

#include "riesz/stable.hpp"

namespace riesz {

enum class Regime { SubCritical, Renormalizable, Invalid };

const char* regime_name(Regime r);

// (d, beta, sigma). SubCritical: 0 < sigma < min(beta, d); Renormalizable:
// beta <= sigma < min(3 beta / 2, d).
struct RieszParams {
  StableParams stable;
  double sigma = 0.5;

  int d() const noexcept { return stable.d; }
  double beta() const noexcept { return stable.beta; }
  double q() const noexcept { return sigma / stable.beta; }
  Regime regime() const;
};

Regime classify(int d, double beta, double sigma);

struct QuadratureSpec {
  int band_steps = 1;             // excluded diagonal band, in path steps
  bool mean_correction = false;   // add the exact mean of the excluded band
  double grading = 0.0;           // corner grading exponent, 0 -> 2 / (2 - sigma/beta)
  int cell_nodes = 32;            // graded nodes per rectangle side
  double lambda_spacing = 0.0;    // frequency cell width, 0 -> chosen from theta_radius
  int lambda_refine = 24;         // dyadic refinement depth of the cells at lambda = 0
  double theta_spacing = 0.05;    // theta table spacing, in units of epsilon
  double theta_radius = 12.0;     // theta table covers |x_j| <= theta_radius

  void validate() const;
};

// Ordered-pair functional eta([0,t]^2_<) = int int_{r<s} |X_s - X_r|^{-sigma} dr ds.
// Trapezoid rule with the band s - r < band_steps * dt removed; optionally the band's exact
// mean is added back. A path that revisits a grid point exactly gives +inf.
double eta(const StablePath& path, const RieszParams& rp, const QuadratureSpec& q = {});

// Same with |X_s - X_r - z|^{-sigma}. For z != 0 the whole triangle s >= r is used and
// both regimes are accepted (sigma < d); z == 0 is exactly eta().
double eta_shifted(const StablePath& path, std::span<const double> z, const RieszParams& rp,
                   const QuadratureSpec& q = {});

// Expectation of the band rule used by eta() (without the band correction), in closed form.
double eta_rule_mean(const RieszParams& rp, double t, int n, int band);

// zeta([0,s] x [0,t]) = int_0^s int_0^t |X_u - Y_v|^{-sigma} for independent paths started at
// the origin. Both paths must share the step size; s and t must be multiples of it.
double zeta(const StablePath& a, const StablePath& b, const RieszParams& rp, double s, double t,
            const QuadratureSpec& q = {});

// Occupation Riesz field int_0^t |X_s - x|^{-p} ds of the piecewise-linear interpolant.
double occupation_integral(const StablePath& path, std::span<const double> x, double p);
// d = 1: the same field averaged over x in [lo, hi], exact for the interpolant.
double occupation_cell_average(const StablePath& path, double lo, double hi, double p);

// xi(t, x) with exponent (sigma + d) / 2.
double xi_field(const StablePath& path, std::span<const double> x, const RieszParams& rp);

// E |X_1|^{-sigma}.
double moment_neg_sigma(const RieszParams& rp);

// E eta([0,t]^2_<) for sigma < beta.
double mean_eta(const RieszParams& rp, double t);

// G with G''(u) = u^{-q} and G(0) = 0: u^{2-q}/((1-q)(2-q)), or u log u - u when q == 1.
// int_0^a int_0^b (u + v)^{-q} du dv = G(a + b) - G(a) - G(b).
double mean_antiderivative(double q, double u);

// E eta([a,b] x [c,e]) for b <= c (r in [a,b], s in [c,e]).
double mean_rectangle(const RieszParams& rp, double a, double b, double c, double e);

// C with int |x - z|^{-(sigma+d)/2} |y - z|^{-(sigma+d)/2} dz = C |x - y|^{-sigma}.
double riesz_composition_constant(int d, double sigma);

// C_{d,sigma} = pi^{-d/2} 2^{-sigma} Gamma((d - sigma)/2) / Gamma(sigma/2): the Fourier
// transform of C_{d,sigma} |lambda|^{sigma-d} is |x|^{-sigma}.
double c_d_sigma(int d, double sigma);

// Throws RegimeError naming the failed inequality unless the regime is one of the accepted.
void require_subcritical(const RieszParams& rp, const std::string& what);
void require_renormalizable_or_sub(const RieszParams& rp, const std::string& what);

}  // namespace riesz
