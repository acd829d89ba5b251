#pragma once

#include <vector>

#include "riesz/stable.hpp"

namespace riesz {

// Nodes along one side of a rectangle that touches the singular corner at offset 0.
// offsets are path-step offsets from the corner, graded as round(N (i/m)^g); weights are
// the matching non-uniform trapezoid weights, in units of the path step.
struct GradedAxis {
  std::vector<int> offsets;
  std::vector<double> weights;

  int length() const { return offsets.empty() ? 0 : offsets.back(); }
  GradedAxis scaled(int stride) const;
};

GradedAxis graded_axis(int steps, int nodes, double grading);

// Tensor trapezoid over u x v nodes for int_0^U int_0^V f(u, v) with f singular only at
// (0,0): f(0,0) is never evaluated, and the corner subcell [0,u1] x [0,v1] is replaced by its
// exact mean. The singular integrand is |Y_{v} - X_{u}|^{-sigma} with mean m1 (u + v)^{-q}.
class CornerRule {
 public:
  CornerRule(GradedAxis u, GradedAxis v);

  const GradedAxis& u() const noexcept { return u_; }
  const GradedAxis& v() const noexcept { return v_; }

  // X side at index ix0 + sx * u_offset, Y side at iy0 + sy * v_offset (sx, sy = +-1).
  // Returns the random part (units of dt^2) without the corner-subcell mean.
  double random_part(const StablePath& X, int ix0, int sx, const StablePath& Y, int iy0, int sy,
                     double sigma) const;

  // Exact mean of the corner subcell (units of dt^{2-q} m1): G(u1 + v1) - G(u1) - G(v1).
  double corner_mean_units(double q) const;

  // Expectation of random_part for m1 = 1 and dt = 1: sum of weights * (u + v)^{-q}.
  double random_mean_units(double q) const;

  // Full value: dt^2 random_part + m1 dt^{2-q} corner_mean_units.
  double evaluate(const StablePath& X, int ix0, int sx, const StablePath& Y, int iy0, int sy,
                  double sigma, double q, double m1) const;
  double expectation(double dt, double q, double m1) const;

 private:
  GradedAxis u_, v_;
};

}  // namespace riesz
