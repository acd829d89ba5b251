#include "riesz/riesz.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "riesz/corner_rule.hpp"
#include "riesz/error.hpp"
#include "riesz/kernels.hpp"

namespace riesz {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void check_path(const StablePath& path, const RieszParams& rp) {
  if (path.dim() != rp.d() || path.params().beta != rp.beta())
    throw ParameterError("path was generated with different (d, beta) than the Riesz parameters");
}

void check_sigma_d(const RieszParams& rp) {
  rp.stable.validate();
  if (!(rp.sigma > 0.0)) throw ParameterError("sigma must be > 0");
  if (rp.sigma >= rp.d())
    throw ParameterError("sigma >= d (sigma = " + fmt(rp.sigma) + ", d = " + std::to_string(rp.d()) +
                         "): |x|^{-sigma} is not locally integrable");
}

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::SubCritical: return "sub-critical";
    case Regime::Renormalizable: return "renormalizable";
    case Regime::Invalid: return "invalid";
  }
  return "invalid";
}

Regime classify(int d, double beta, double sigma) {
  if (!(sigma > 0.0) || sigma >= d || d < 1 || !(beta > 0.0 && beta <= 2.0)) return Regime::Invalid;
  if (sigma < beta) return Regime::SubCritical;
  if (sigma < 1.5 * beta) return Regime::Renormalizable;
  return Regime::Invalid;
}

Regime RieszParams::regime() const { return classify(stable.d, stable.beta, sigma); }

void QuadratureSpec::validate() const {
  if (band_steps < 0) throw ParameterError("band_steps must be >= 0");
  if (grading != 0.0 && grading < 1.0) throw ParameterError("grading exponent must be >= 1");
  if (cell_nodes < 1) throw ParameterError("cell_nodes must be >= 1");
  if (lambda_spacing < 0.0) throw ParameterError("lambda_spacing must be >= 0");
  if (lambda_refine < 0 || lambda_refine > 40) throw ParameterError("lambda_refine must lie in [0, 40]");
  if (!(theta_spacing > 0.0)) throw ParameterError("theta_spacing must be > 0");
  if (!(theta_radius > 0.0)) throw ParameterError("theta_radius must be > 0");
}

void require_subcritical(const RieszParams& rp, const std::string& what) {
  check_sigma_d(rp);
  if (rp.sigma >= rp.beta())
    throw RegimeError(what + " needs sigma < beta, got sigma = " + fmt(rp.sigma) + " >= beta = " +
                      fmt(rp.beta()) + " (the mean E eta diverges)");
}

void require_renormalizable_or_sub(const RieszParams& rp, const std::string& what) {
  check_sigma_d(rp);
  if (rp.sigma >= 1.5 * rp.beta())
    throw RegimeError(what + " needs sigma < min(3 beta / 2, d), got sigma = " + fmt(rp.sigma) +
                      " >= 3 beta / 2 = " + fmt(1.5 * rp.beta()));
}

double c_d_sigma(int d, double sigma) {
  if (d < 1 || !(sigma > 0.0 && sigma < d)) throw ParameterError("c_d_sigma needs 0 < sigma < d");
  return std::pow(kPi, -0.5 * d) * std::pow(2.0, -sigma) * std::tgamma(0.5 * (d - sigma)) /
         std::tgamma(0.5 * sigma);
}

double riesz_composition_constant(int d, double sigma) {
  if (d < 1 || !(sigma > 0.0 && sigma < d))
    throw ParameterError("composition constant needs 0 < sigma < d");
  const double g1 = std::tgamma(0.25 * (d - sigma));
  const double g2 = std::tgamma(0.25 * (d + sigma));
  return std::pow(kPi, 0.5 * d) * g1 * g1 * std::tgamma(0.5 * sigma) /
         (g2 * g2 * std::tgamma(0.5 * (d - sigma)));
}

double moment_neg_sigma(const RieszParams& rp) {
  check_sigma_d(rp);
  const int d = rp.d();
  const double sphere = 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
  return c_d_sigma(d, rp.sigma) * sphere * std::tgamma(rp.q()) / rp.beta();
}

double mean_antiderivative(double q, double u) {
  if (u <= 0.0) return 0.0;
  if (q == 1.0) return u * std::log(u) - u;
  return std::pow(u, 2.0 - q) / ((1.0 - q) * (2.0 - q));
}

double mean_eta(const RieszParams& rp, double t) {
  require_subcritical(rp, "mean_eta");
  if (t < 0.0) throw ParameterError("t must be >= 0");
  if (t == 0.0) return 0.0;
  const double q = rp.q();
  return moment_neg_sigma(rp) * std::pow(t, 2.0 - q) / ((1.0 - q) * (2.0 - q));
}

double mean_rectangle(const RieszParams& rp, double a, double b, double c, double e) {
  check_sigma_d(rp);
  if (rp.sigma >= 2.0 * rp.beta()) throw RegimeError("mean_rectangle needs sigma < 2 beta");
  if (!(a <= b && c <= e)) throw DomainError("rectangle sides must satisfy a <= b and c <= e");
  if (b > c) throw DomainError("rectangle must lie above the diagonal (b <= c)");
  const double q = rp.q();
  auto G = [q](double u) { return mean_antiderivative(q, u); };
  return moment_neg_sigma(rp) * (G(e - a) - G(e - b) - G(c - a) + G(c - b));
}

double eta_rule_mean(const RieszParams& rp, double t, int n, int band) {
  check_sigma_d(rp);
  if (band < 1) throw ParameterError("band must be >= 1 for the unshifted functional");
  const auto W = kernels::band_lag_weights(n, band);
  const double q = rp.q();
  double sum = 0.0;
  for (int L = band; L <= n; ++L) sum += W[static_cast<std::size_t>(L)] * std::pow(L, -q);
  const double dt = t / n;
  return moment_neg_sigma(rp) * std::pow(dt, 2.0 - q) * sum;
}

double eta(const StablePath& path, const RieszParams& rp, const QuadratureSpec& q) {
  require_subcritical(rp, "eta");
  q.validate();
  check_path(path, rp);
  const int band = q.band_steps;
  if (band < 1) throw ParameterError("band_steps must be >= 1 for eta");
  if (band > path.steps()) throw ParameterError("band wider than the path");
  const double dt = path.dt();
  double value = dt * dt *
                 kernels::band_pair_sum(path.coords(), path.steps(), path.dim(), band, {}, rp.sigma);
  if (q.mean_correction) {
    const double qq = rp.q();
    const double w = band * dt;
    const double t = path.horizon();
    value += moment_neg_sigma(rp) *
             (t * std::pow(w, 1.0 - qq) / (1.0 - qq) - std::pow(w, 2.0 - qq) / (2.0 - qq));
  }
  return value;
}

double eta_shifted(const StablePath& path, std::span<const double> z, const RieszParams& rp,
                   const QuadratureSpec& q) {
  bool zero = true;
  for (double v : z) zero = zero && v == 0.0;
  if (zero) return eta(path, rp, q);
  check_sigma_d(rp);
  check_path(path, rp);
  if (static_cast<int>(z.size()) != rp.d()) throw ParameterError("shift z must have d coordinates");
  const double dt = path.dt();
  return dt * dt * kernels::band_pair_sum(path.coords(), path.steps(), path.dim(), 0, z, rp.sigma);
}

double zeta(const StablePath& a, const StablePath& b, const RieszParams& rp, double s, double t,
            const QuadratureSpec& q) {
  check_sigma_d(rp);
  if (rp.sigma >= 2.0 * rp.beta()) throw RegimeError("zeta needs sigma < min(2 beta, d)");
  q.validate();
  check_path(a, rp);
  check_path(b, rp);
  const double dt = a.dt();
  if (std::abs(b.dt() - dt) > 1e-12 * dt) throw ParameterError("zeta needs paths with equal step size");
  if (s < 0.0 || t < 0.0) throw ParameterError("rectangle sides must be >= 0");
  const int ns = static_cast<int>(std::lround(s / dt));
  const int nt = static_cast<int>(std::lround(t / dt));
  if (std::abs(ns * dt - s) > 1e-9 * dt || std::abs(nt * dt - t) > 1e-9 * dt)
    throw ParameterError("rectangle sides must be multiples of the path step");
  if (ns > a.steps() || nt > b.steps()) throw ParameterError("rectangle exceeds the path horizons");
  if (ns == 0 || nt == 0) return 0.0;
  if (a.seed() == b.seed() && a.seed() != SeedRecord{})
    std::fprintf(stderr, "warning: zeta called with identical seed records; paths are not independent\n");
  const double qq = rp.q();
  const double g = q.grading > 0.0 ? q.grading : 2.0 / (2.0 - qq);
  const CornerRule rule(graded_axis(ns, q.cell_nodes, g), graded_axis(nt, q.cell_nodes, g));
  return rule.evaluate(a, 0, 1, b, 0, 1, rp.sigma, qq, moment_neg_sigma(rp));
}

namespace {

// 8-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 8> kGlX = {0.0198550717512319, 0.1016667612931866, 0.2372337950418355,
                                         0.4082826787521751, 0.5917173212478249, 0.7627662049581645,
                                         0.8983332387068134, 0.9801449282487681};
constexpr std::array<double, 8> kGlW = {0.0506142681451881, 0.1111905172266872, 0.1568533229389436,
                                         0.1813418916891810, 0.1813418916891810, 0.1568533229389436,
                                         0.1111905172266872, 0.0506142681451881};

double segment_integral(const double* A, const double* B, int d, double p, double t0, double t1,
                        int depth) {
  // integral over tau in [t0, t1] of |A + (B - A) tau|^{-p}
  double len2 = 0.0, dot = 0.0, a2 = 0.0;
  for (int k = 0; k < d; ++k) {
    const double e = B[k] - A[k];
    len2 += e * e;
    dot += A[k] * e;
    a2 += A[k] * A[k];
  }
  auto dist2 = [&](double tau) { return a2 + 2.0 * tau * dot + tau * tau * len2; };
  double tmin = len2 > 0.0 ? std::clamp(-dot / len2, t0, t1) : t0;
  const double dmin = std::sqrt(std::max(dist2(tmin), 0.0));
  const double seg = std::sqrt(len2) * (t1 - t0);
  if (dmin == 0.0) return std::numeric_limits<double>::infinity();
  if (seg <= 0.5 * dmin || depth > 48) {
    double acc = 0.0;
    for (std::size_t k = 0; k < kGlX.size(); ++k)
      acc += kGlW[k] * std::pow(dist2(t0 + (t1 - t0) * kGlX[k]), -0.5 * p);
    return acc * (t1 - t0);
  }
  const double mid = 0.5 * (t0 + t1);
  return segment_integral(A, B, d, p, t0, mid, depth + 1) +
         segment_integral(A, B, d, p, mid, t1, depth + 1);
}

}  // namespace

double occupation_integral(const StablePath& path, std::span<const double> x, double p) {
  const int d = path.dim();
  if (static_cast<int>(x.size()) != d) throw ParameterError("point x must have d coordinates");
  if (!(p > 0.0)) throw ParameterError("exponent p must be > 0");
  const double dt = path.dt();
  double total = 0.0;
  if (d == 1) {
    if (p >= 1.0) throw ParameterError("d = 1 occupation field needs p < 1");
    auto F = [p](double u) { return std::copysign(std::pow(std::abs(u), 1.0 - p), u) / (1.0 - p); };
    double A = path.position(0)[0] - x[0];
    double FA = F(A);
    for (int i = 1; i <= path.steps(); ++i) {
      const double B = path.position(i)[0] - x[0];
      const double FB = F(B);
      const double diff = B - A;
      if (std::abs(diff) > 1e-10 * std::max(std::abs(A), std::abs(B))) {
        total += dt * (FB - FA) / diff;
      } else {
        total += dt * std::pow(std::abs(0.5 * (A + B)), -p);
      }
      A = B;
      FA = FB;
    }
    return total;
  }
  std::vector<double> A(static_cast<std::size_t>(d)), B(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) A[k] = path.position(0)[k] - x[k];
  for (int i = 1; i <= path.steps(); ++i) {
    for (int k = 0; k < d; ++k) B[k] = path.position(i)[k] - x[k];
    total += dt * segment_integral(A.data(), B.data(), d, p, 0.0, 1.0, 0);
    A.swap(B);
  }
  return total;
}

double occupation_cell_average(const StablePath& path, double lo, double hi, double p) {
  if (path.dim() != 1) throw ParameterError("cell averages of the occupation field need d = 1");
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("d = 1 occupation field needs 0 < p < 1");
  if (!(hi > lo)) throw ParameterError("cell must have hi > lo");
  // G' = |v|^-p and K' = G
  auto G = [p](double v) { return std::copysign(std::pow(std::abs(v), 1.0 - p), v) / (1.0 - p); };
  auto K = [p](double v) { return std::pow(std::abs(v), 2.0 - p) / ((1.0 - p) * (2.0 - p)); };
  const double dt = path.dt();
  double total = 0.0;
  double A = path.position(0)[0];
  for (int i = 1; i <= path.steps(); ++i) {
    const double B = path.position(i)[0];
    const double diff = B - A;
    const double scale = std::max({std::abs(A - lo), std::abs(A - hi), std::abs(B - lo), std::abs(B - hi)});
    if (std::abs(diff) > 1e-8 * scale) {
      total += dt * ((K(B - lo) - K(A - lo)) - (K(B - hi) - K(A - hi))) / diff;
    } else {
      const double m = 0.5 * (A + B);
      total += dt * (G(m - lo) - G(m - hi));
    }
    A = B;
  }
  return total / (hi - lo);
}

double xi_field(const StablePath& path, std::span<const double> x, const RieszParams& rp) {
  check_sigma_d(rp);
  check_path(path, rp);
  return occupation_integral(path, x, 0.5 * (rp.sigma + rp.d()));
}

}  // namespace riesz
