#include "riesz/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "riesz/error.hpp"

namespace riesz {

void PotentialParams::validate() const {
  if (d < 1 || !(beta > 0.0 && beta <= 2.0)) throw ParameterError("invalid (d, beta) for the potential");
  const double upper = std::min(static_cast<double>(d), 0.5 * (d + beta));
  if (!(p > 0.5 * d && p < upper))
    throw ParameterError("p must satisfy d/2 < p < min(d, (d + beta)/2)");
}

double PotentialParams::C() const {
  validate();
  return riesz_composition_constant(d, sigma());
}

double f_conditional_variance(const StablePath& path, const PotentialParams& pp,
                              const QuadratureSpec& q) {
  pp.validate();
  return 2.0 * pp.C() * eta(path, pp.riesz(), q);
}

double sample_F_representation(const StablePath& path, const PotentialParams& pp,
                               const QuadratureSpec& q, Engine& rng) {
  const double var = f_conditional_variance(path, pp, q);
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(rng) * std::sqrt(var);
}

namespace {

struct Axis {
  std::vector<double> centre;
  std::vector<double> width;
};

Axis axis_partition(double lo, double hi, int core, double growth, double outer_lo, double outer_hi) {
  Axis ax;
  const double h = (hi - lo) / core;
  std::vector<double> left_c, left_w;
  double edge = lo, w = h;
  while (edge > outer_lo) {
    w *= growth;
    const double next = std::max(edge - w, outer_lo);
    left_c.push_back(0.5 * (edge + next));
    left_w.push_back(edge - next);
    edge = next;
  }
  for (std::size_t i = left_c.size(); i-- > 0;) {
    ax.centre.push_back(left_c[i]);
    ax.width.push_back(left_w[i]);
  }
  for (int i = 0; i < core; ++i) {
    ax.centre.push_back(lo + (i + 0.5) * h);
    ax.width.push_back(h);
  }
  edge = hi;
  w = h;
  while (edge < outer_hi) {
    w *= growth;
    const double next = std::min(edge + w, outer_hi);
    ax.centre.push_back(0.5 * (edge + next));
    ax.width.push_back(next - edge);
    edge = next;
  }
  return ax;
}

}  // namespace

GridField grid_field(const StablePath& path, const PotentialParams& pp, const GridSpec& spec) {
  pp.validate();
  if (path.dim() != pp.d || path.params().beta != pp.beta)
    throw ParameterError("path does not match the potential parameters");
  if (!(spec.core_cells >= 1) || !(spec.growth > 1.0) || !(spec.tolerance > 0.0) || spec.pad < 0.0)
    throw ParameterError("invalid grid specification");
  const int d = pp.d;
  const int core = static_cast<int>(spec.core_cells);
  std::vector<double> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d)),
      centre(static_cast<std::size_t>(d));
  double extent = path.coordinate_extent();
  const double ext = std::max(extent, 1e-6);
  for (int a = 0; a < d; ++a) {
    double mn = path.position(0)[a], mx = mn;
    for (int i = 1; i <= path.steps(); ++i) {
      mn = std::min(mn, path.position(i)[a]);
      mx = std::max(mx, path.position(i)[a]);
    }
    lo[a] = mn - spec.pad * ext;
    hi[a] = mx + spec.pad * ext;
    centre[a] = 0.5 * (mn + mx);
  }
  double r0 = 0.0;
  for (int i = 0; i <= path.steps(); ++i) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += std::pow(path.position(i)[a] - centre[a], 2);
    r0 = std::max(r0, std::sqrt(r2));
  }
  const double t = path.horizon();
  const double p = pp.p;
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
  double R = spec.outer > 0.0 ? spec.outer : 50.0 * (ext + 1.0);
  R = std::max(R, 2.0 * (r0 + spec.pad * ext));

  while (true) {
    std::vector<Axis> axes;
    for (int a = 0; a < d; ++a)
      axes.push_back(axis_partition(lo[a], hi[a], core, spec.growth, centre[a] - R, centre[a] + R));
    std::size_t total = 1;
    for (const auto& ax : axes) total *= ax.centre.size();
    if (total > 50'000'000) throw CoverageError("white-noise grid too large");
    GridField field;
    field.outer = R;
    field.xi.assign(total, 0.0);
    field.volume.assign(total, 0.0);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t f = 0; f < total; ++f) {
      std::size_t rem = f;
      std::vector<double> x(static_cast<std::size_t>(d));
      double vol = 1.0;
      for (int a = d - 1; a >= 0; --a) {
        const auto& ax = axes[static_cast<std::size_t>(a)];
        const std::size_t k = rem % ax.centre.size();
        rem /= ax.centre.size();
        x[static_cast<std::size_t>(a)] = ax.centre[k];
        vol *= ax.width[k];
      }
      // d = 1 uses exact cell averages (the projection of xi onto the cells); a slow path
      // segment makes xi sharply peaked, which point values sample erratically
      field.xi[f] = d == 1 ? occupation_cell_average(path, x[0] - 0.5 * vol, x[0] + 0.5 * vol, p)
                           : occupation_integral(path, x, p);
      field.volume[f] = vol;
    }
    double var = 0.0;
    for (std::size_t f = 0; f < total; ++f) var += field.xi[f] * field.xi[f] * field.volume[f];
    field.variance = var;
    field.far_bound = t * t * sphere * std::pow(R - r0, d - 2.0 * p) / (2.0 * p - d);
    if (field.far_bound <= spec.tolerance * var) return field;
    if (R * 4.0 > spec.max_outer)
      throw CoverageError("white-noise grid cannot reach the variance tolerance within the outer radius limit");
    R *= 4.0;
  }
}

double sample_F_grid(const GridField& field, Engine& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  double F = 0.0;
  for (std::size_t f = 0; f < field.xi.size(); ++f) F += field.xi[f] * std::sqrt(field.volume[f]) * normal(rng);
  return F;
}

double sample_F_grid(const StablePath& path, const PotentialParams& pp, const GridSpec& spec,
                     Engine& rng) {
  return sample_F_grid(grid_field(path, pp, spec), rng);
}

std::pair<double, double> f_tail_constants(const PotentialParams& pp, double rho_p) {
  pp.validate();
  const auto c = potential_constants(pp.d, pp.beta, pp.p, rho_p);
  return {c.rate, c.lil};
}

}  // namespace riesz
