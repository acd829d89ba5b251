#pragma once

#include <utility>
#include <vector>

#include "riesz/riesz.hpp"
#include "riesz/variational.hpp"

namespace riesz {

// Action F(t) = int [int_0^t |y - X_s|^{-p} ds] W(dy) of a stable path in a white-noise
// potential. Needs d/2 < p < min(d, (d + beta)/2); sigma = 2p - d.
struct PotentialParams {
  int d = 1;
  double beta = 2.0;
  double p = 0.75;

  void validate() const;
  double sigma() const noexcept { return 2.0 * p - d; }
  RieszParams riesz() const { return {{d, beta}, sigma()}; }
  // composition constant C at sigma = 2p - d
  double C() const;
  // F(t) =d t^{scaling_exponent} F(1)
  double scaling_exponent() const noexcept { return (2.0 * beta - 2.0 * p + d) / (2.0 * beta); }
};

// Var(F(t) | X) = int xi_p(t, y)^2 dy = C eta([0,t]^2) = 2 C eta([0,t]^2_<).
double f_conditional_variance(const StablePath& path, const PotentialParams& pp,
                              const QuadratureSpec& q = {});

// U sqrt(2 C eta_<) with U standard normal drawn from rng.
double sample_F_representation(const StablePath& path, const PotentialParams& pp,
                               const QuadratureSpec& q, Engine& rng);

// Spatial partition for the white-noise quadrature: a uniform core around the path plus
// geometrically growing cells out to `outer`. outer grows until the far-field bound
// t^2 S_d (R - r0)^{d - 2p} / (2p - d) is below `tolerance` of the captured variance.
struct GridSpec {
  double core_cells = 400;   // cells across the core per axis
  double pad = 1.0;          // core margin, in units of the path extent
  double growth = 1.15;      // ratio of successive outer cells
  double outer = 0.0;        // initial outer radius, 0 -> 50 (extent + 1)
  double tolerance = 0.01;   // allowed variance fraction beyond the grid
  double max_outer = 1e12;
};

struct GridField {
  std::vector<double> xi;        // xi_p(t, .) per cell: cell average in d = 1, centre value otherwise
  std::vector<double> volume;
  double variance = 0.0;         // sum xi^2 volume
  double far_bound = 0.0;        // variance bound beyond the grid
  double outer = 0.0;
};

// CoverageError when the far-field bound cannot be brought under tolerance.
GridField grid_field(const StablePath& path, const PotentialParams& pp, const GridSpec& spec = {});

double sample_F_grid(const GridField& field, Engine& rng);
double sample_F_grid(const StablePath& path, const PotentialParams& pp, const GridSpec& spec,
                     Engine& rng);

// (rate constant, LIL constant) with rho_p supplied by the caller.
std::pair<double, double> f_tail_constants(const PotentialParams& pp, double rho_p);

}  // namespace riesz
