#include "riesz/corner_rule.hpp"

#include <cmath>

#include "riesz/error.hpp"
#include "riesz/kernels.hpp"
#include "riesz/riesz.hpp"

namespace riesz {

GradedAxis GradedAxis::scaled(int stride) const {
  GradedAxis out = *this;
  for (int& o : out.offsets) o *= stride;
  for (double& w : out.weights) w *= stride;
  return out;
}

GradedAxis graded_axis(int steps, int nodes, double grading) {
  if (steps < 0) throw ParameterError("graded axis length must be >= 0");
  if (nodes < 1) throw ParameterError("graded axis needs at least one interval");
  if (!(grading >= 1.0)) throw ParameterError("grading exponent must be >= 1");
  GradedAxis ax;
  ax.offsets.push_back(0);
  for (int i = 1; i <= nodes; ++i) {
    const int o = static_cast<int>(std::lround(steps * std::pow(static_cast<double>(i) / nodes, grading)));
    if (o > ax.offsets.back()) ax.offsets.push_back(o);
  }
  if (ax.offsets.back() != steps) ax.offsets.push_back(steps);
  const std::size_t m = ax.offsets.size();
  ax.weights.assign(m, 0.0);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double h = ax.offsets[k + 1] - ax.offsets[k];
    ax.weights[k] += 0.5 * h;
    ax.weights[k + 1] += 0.5 * h;
  }
  return ax;
}

CornerRule::CornerRule(GradedAxis u, GradedAxis v) : u_(std::move(u)), v_(std::move(v)) {}

double CornerRule::random_part(const StablePath& X, int ix0, int sx, const StablePath& Y, int iy0,
                               int sy, double sigma) const {
  if (u_.offsets.size() < 2 || v_.offsets.size() < 2) return 0.0;
  const int d = X.dim();
  const kernels::PowerKernel kern(sigma);
  auto f = [&](std::size_t a, std::size_t c) {
    const auto xa = X.position(ix0 + sx * u_.offsets[a]);
    const auto yc = Y.position(iy0 + sy * v_.offsets[c]);
    double r2 = 0.0;
    for (int k = 0; k < d; ++k) {
      const double t = yc[k] - xa[k];
      r2 += t * t;
    }
    return kern(r2);
  };
  double total = 0.0;
  for (std::size_t a = 0; a < u_.offsets.size(); ++a) {
    double row = 0.0;
    for (std::size_t c = (a == 0 ? 1 : 0); c < v_.offsets.size(); ++c) row += v_.weights[c] * f(a, c);
    total += u_.weights[a] * row;
  }
  const double quarter = 0.25 * u_.offsets[1] * v_.offsets[1];
  total -= quarter * (f(1, 0) + f(0, 1) + f(1, 1));
  return total;
}

double CornerRule::corner_mean_units(double q) const {
  if (u_.offsets.size() < 2 || v_.offsets.size() < 2) return 0.0;
  const double a = u_.offsets[1], b = v_.offsets[1];
  return mean_antiderivative(q, a + b) - mean_antiderivative(q, a) - mean_antiderivative(q, b);
}

double CornerRule::random_mean_units(double q) const {
  if (u_.offsets.size() < 2 || v_.offsets.size() < 2) return 0.0;
  auto g = [&](std::size_t a, std::size_t c) {
    return std::pow(static_cast<double>(u_.offsets[a] + v_.offsets[c]), -q);
  };
  double total = 0.0;
  for (std::size_t a = 0; a < u_.offsets.size(); ++a)
    for (std::size_t c = (a == 0 ? 1 : 0); c < v_.offsets.size(); ++c)
      total += u_.weights[a] * v_.weights[c] * g(a, c);
  total -= 0.25 * u_.offsets[1] * v_.offsets[1] * (g(1, 0) + g(0, 1) + g(1, 1));
  return total;
}

double CornerRule::evaluate(const StablePath& X, int ix0, int sx, const StablePath& Y, int iy0,
                            int sy, double sigma, double q, double m1) const {
  const double dt = X.dt();
  return dt * dt * random_part(X, ix0, sx, Y, iy0, sy, sigma) +
         m1 * std::pow(dt, 2.0 - q) * corner_mean_units(q);
}

double CornerRule::expectation(double dt, double q, double m1) const {
  return m1 * std::pow(dt, 2.0 - q) * (random_mean_units(q) + corner_mean_units(q));
}

}  // namespace riesz
