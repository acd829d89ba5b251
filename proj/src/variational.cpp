#include "riesz/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "riesz/error.hpp"
#include "riesz/rng.hpp"

namespace riesz {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t ipow(int base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

// multi-index in [-rad, rad]^d from a row-major flat index
void unflatten(std::size_t flat, int rad, int d, std::vector<int>& out) {
  const std::size_t side = static_cast<std::size_t>(2 * rad + 1);
  out.resize(static_cast<std::size_t>(d));
  for (int a = d - 1; a >= 0; --a) {
    out[static_cast<std::size_t>(a)] = static_cast<int>(flat % side) - rad;
    flat /= side;
  }
}

double l2norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// g <- max(g, 0) / |max(g, 0)|; returns false if everything was clipped
bool project(std::vector<double>& g) {
  for (double& x : g) x = std::max(x, 0.0);
  const double n = l2norm(g);
  if (n == 0.0) return false;
  for (double& x : g) x /= n;
  return true;
}

}  // namespace

void LatticeProblem::validate() const {
  sw.validate();
  if (!(sw.alpha > 0.0)) throw ParameterError("the lattice solver needs alpha > 0");
  if (!(M > 0.0)) throw ParameterError("period M must be > 0");
  if (opts.restarts < 1) throw ParameterError("need at least one restart");
  if (opts.max_iters < 1) throw ParameterError("max_iters must be >= 1");
  if (opts.window_radius < 0) throw ParameterError("window radius must be >= 0");
  if (opts.window_radius > 0 && opts.window_radius < e_radius())
    throw WindowError("window radius " + std::to_string(opts.window_radius) +
                      " is smaller than the radius of E (" + std::to_string(e_radius()) + ")");
}

int LatticeProblem::e_radius() const {
  return static_cast<int>(std::floor(M / (std::numbers::pi * sw.epsilon)));
}

int LatticeProblem::window_radius() const {
  return opts.window_radius > 0 ? opts.window_radius : std::max(1, 4 * e_radius());
}

std::size_t LatticeProblem::window_size() const {
  return ipow(2 * window_radius() + 1, sw.rp.d());
}

LatticeObjective::LatticeObjective(const LatticeProblem& lp)
    : d_(lp.sw.rp.d()), W_(lp.window_radius()), R_(lp.e_radius()) {
  lp.validate();
  const std::size_t nw = lp.window_size();
  if (nw > 20'000'000) throw ParameterError("lattice window too large");
  const double scale = kTwoPi / lp.M;
  std::vector<int> y;
  std::vector<double> lam(static_cast<std::size_t>(d_));
  a_.resize(nw);
  for (std::size_t f = 0; f < nw; ++f) {
    unflatten(f, W_, d_, y);
    double r2 = 0.0;
    for (int a = 0; a < d_; ++a) r2 += std::pow(scale * y[static_cast<std::size_t>(a)], 2);
    a_[f] = std::sqrt(1.0 / (1.0 + std::pow(r2, 0.5 * lp.sw.rp.beta())));
  }
  const std::size_t ne = ipow(2 * R_ + 1, d_);
  w_.resize(ne);
  shift_.resize(ne);
  const int side = 2 * W_ + 1;
  std::vector<int> x;
  for (std::size_t e = 0; e < ne; ++e) {
    unflatten(e, R_, d_, x);
    for (int a = 0; a < d_; ++a) lam[static_cast<std::size_t>(a)] = scale * x[static_cast<std::size_t>(a)];
    w_[e] = lp.sw.value(lam);
    auto& tab = shift_[e];
    tab.assign(nw, -1);
    for (std::size_t f = 0; f < nw; ++f) {
      unflatten(f, W_, d_, y);
      long idx = 0;
      bool inside = true;
      for (int a = 0; a < d_; ++a) {
        const int c = y[static_cast<std::size_t>(a)] + x[static_cast<std::size_t>(a)];
        if (c < -W_ || c > W_) {
          inside = false;
          break;
        }
        idx = idx * side + (c + W_);
      }
      if (inside) tab[f] = static_cast<int>(idx);
    }
  }
}

void LatticeObjective::set_box_weights(std::vector<double> w) {
  if (w.size() != w_.size()) throw ParameterError("box weight vector has the wrong size");
  for (double v : w)
    if (!(v >= 0.0)) throw ParameterError("box weights must be nonnegative");
  w_ = std::move(w);
}

void LatticeObjective::correlations(const std::vector<double>& h, std::vector<double>& S) const {
  S.assign(w_.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t e = 0; e < w_.size(); ++e) {
    if (w_[e] == 0.0) continue;
    const auto& tab = shift_[e];
    double s = 0.0;
    for (std::size_t f = 0; f < h.size(); ++f) {
      const int j = tab[f];
      if (j >= 0) s += h[static_cast<std::size_t>(j)] * h[f];
    }
    S[e] = s;
  }
}

double LatticeObjective::value(std::span<const double> g) const {
  if (g.size() != a_.size()) throw ParameterError("g does not match the lattice window");
  std::vector<double> h(g.size()), S;
  for (std::size_t f = 0; f < g.size(); ++f) h[f] = a_[f] * g[f];
  correlations(h, S);
  double J = 0.0;
  for (std::size_t e = 0; e < S.size(); ++e) J += w_[e] * S[e] * S[e];
  return J;
}

double LatticeObjective::gradient(std::span<const double> g, std::vector<double>& grad) const {
  if (g.size() != a_.size()) throw ParameterError("g does not match the lattice window");
  std::vector<double> h(g.size()), S;
  for (std::size_t f = 0; f < g.size(); ++f) h[f] = a_[f] * g[f];
  correlations(h, S);
  double J = 0.0;
  for (std::size_t e = 0; e < S.size(); ++e) J += w_[e] * S[e] * S[e];
  // dJ/dg_z = 4 a_z sum_x w_x S_x h(z + x)   (w and S are even in x)
  grad.assign(g.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t z = 0; z < g.size(); ++z) {
    double acc = 0.0;
    for (std::size_t e = 0; e < S.size(); ++e) {
      if (w_[e] == 0.0) continue;
      const int j = shift_[e][z];
      if (j >= 0) acc += w_[e] * S[e] * h[static_cast<std::size_t>(j)];
    }
    grad[z] = 4.0 * a_[z] * acc;
  }
  return J;
}

double objective(const LatticeProblem& lp, std::span<const double> g) {
  if (g.size() != lp.window_size()) throw WindowError("g does not cover the lattice window");
  double n2 = 0.0;
  for (double v : g) n2 += v * v;
  if (std::abs(n2 - 1.0) > 1e-10) throw ParameterError("g must have unit l2 norm");
  return LatticeObjective(lp).value(g);
}

VariationalSolution ascend(const LatticeObjective& obj, std::vector<double> g, const SolverOptions& opts,
                           double M) {
  if (!project(g)) throw ParameterError("initial g has no positive part");
  VariationalSolution sol;
  sol.window_radius = obj.window_radius();
  std::vector<double> grad, r(g.size()), cand(g.size());
  double J = obj.gradient(g, grad);
  sol.trace.push_back(J);
  double step = opts.step;
  bool converged = false;
  int it = 0;
  int stagnant = 0;
  for (; it < opts.max_iters; ++it) {
    double gg = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) gg += grad[i] * g[i];
    for (std::size_t i = 0; i < g.size(); ++i) {
      r[i] = grad[i] - gg * g[i];
      if (g[i] == 0.0 && r[i] < 0.0) r[i] = 0.0;
    }
    const double rn = l2norm(r);
    if (rn <= opts.tol * std::max(J, 1e-300)) {
      converged = true;
      break;
    }
    bool accepted = false;
    while (step > 1e-15) {
      for (std::size_t i = 0; i < g.size(); ++i) cand[i] = g[i] + step * r[i] / rn;
      if (project(cand)) {
        const double Jc = obj.value(cand);
        if (Jc > J) {
          const double gain = (Jc - J) / Jc;
          stagnant = gain < 1e-14 ? stagnant + 1 : 0;
          g.swap(cand);
          J = obj.gradient(g, grad);
          sol.trace.push_back(J);
          step = std::min(step * 1.5, 2.0);
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted || stagnant >= 50) {
      converged = true;  // no ascent direction left at machine resolution
      break;
    }
  }
  sol.iterations = it;
  if (!converged)
    throw ConvergenceError("lattice ascent did not converge within " + std::to_string(opts.max_iters) +
                               " iterations",
                           sol.trace);
  sol.g = std::move(g);
  sol.value = J;
  sol.continuum_value = std::pow(kTwoPi / M, obj.dim()) * J;
  return sol;
}

VariationalSolution solve_lattice(const LatticeProblem& lp) {
  const LatticeObjective obj(lp);
  const int d = lp.sw.rp.d();
  const int W = obj.window_radius();
  const double width = std::max(1.0, 0.5 * lp.e_radius());
  const std::size_t n = obj.size();
  std::vector<std::vector<double>> starts(static_cast<std::size_t>(lp.opts.restarts));
  std::vector<int> y;
  for (int r = 0; r < lp.opts.restarts; ++r) {
    auto& g = starts[static_cast<std::size_t>(r)];
    g.resize(n);
    Engine rng = make_engine(seed_for(lp.opts.seed, Lane::Restart, static_cast<std::uint64_t>(r)));
    const double wr = r == 0 ? width : width * (1.0 + 2.0 * open_uniform(rng));
    for (std::size_t f = 0; f < n; ++f) {
      unflatten(f, W, d, y);
      double r2 = 0.0;
      for (int v : y) r2 += static_cast<double>(v) * v;
      const double bump = std::exp(-0.5 * r2 / (wr * wr));
      g[f] = r == 0 ? bump : bump * open_uniform(rng);
    }
  }
  std::vector<VariationalSolution> sols(starts.size());
  std::vector<std::string> errors(starts.size());
  std::vector<std::vector<double>> traces(starts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t r = 0; r < starts.size(); ++r) {
    try {
      sols[r] = ascend(obj, starts[r], lp.opts, lp.M);
    } catch (const ConvergenceError& e) {
      errors[r] = e.what();
      traces[r] = e.trace();
    }
  }
  for (std::size_t r = 0; r < starts.size(); ++r)
    if (!errors[r].empty()) throw ConvergenceError("restart " + std::to_string(r) + ": " + errors[r], traces[r]);
  std::size_t best = 0;
  double lo = sols[0].value, hi = sols[0].value;
  for (std::size_t r = 0; r < sols.size(); ++r) {
    if (sols[r].value > sols[best].value) best = r;
    lo = std::min(lo, sols[r].value);
    hi = std::max(hi, sols[r].value);
  }
  VariationalSolution out = sols[best];
  for (const auto& s : sols) out.restart_values.push_back(s.value);
  out.restart_spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
  return out;
}

double window_saturation(const LatticeProblem& lp) {
  LatticeProblem wide = lp;
  wide.opts.window_radius = 2 * lp.window_radius();
  const double a = solve_lattice(lp).value;
  const double b = solve_lattice(wide).value;
  return std::abs(b - a) / b;
}

RhoContinuum rho_continuum(const SpectralWeight& sw, std::span<const double> M_list,
                           const SolverOptions& opts, const LatticeSolver& solve) {
  if (M_list.size() < 3) throw ParameterError("continuum extrapolation needs at least three M values");
  if (!std::is_sorted(M_list.begin(), M_list.end()) ||
      std::adjacent_find(M_list.begin(), M_list.end()) != M_list.end())
    throw ParameterError("M values must be strictly increasing");
  RhoContinuum out;
  for (double M : M_list) {
    LatticeProblem lp{sw, M, opts};
    auto sol = solve(lp);
    out.M.push_back(M);
    out.values.push_back(sol.continuum_value);
    out.spreads.push_back(sol.restart_spread);
    if (out.values.size() >= 2) {
      const double prev = out.values[out.values.size() - 2];
      out.rel_change.push_back(std::abs(sol.continuum_value - prev) / sol.continuum_value);
    }
    out.solutions.push_back(std::move(sol));
  }
  out.last = out.values.back();
  const std::size_t k = out.values.size();
  const double v1 = out.values[k - 3], v2 = out.values[k - 2], v3 = out.values[k - 1];
  const double ratio = (v2 - v1) / (v3 - v2);
  if (v3 != v2 && ratio > 1.0) {
    out.order = std::log2(ratio);
    out.richardson = v3 + (v3 - v2) / (ratio - 1.0);
  } else {
    out.order = 0.0;
    out.richardson = v3;
    out.monotone_tail = false;
  }
  if ((v2 - v1) * (v3 - v2) < 0.0) out.monotone_tail = false;
  return out;
}

double ldp_rate_constant(double beta, double sigma, double rho) {
  if (!(rho > 0.0) || !(sigma > 0.0) || !(beta > 0.0) || sigma >= 2.0 * beta)
    throw ParameterError("ldp_rate_constant needs rho > 0 and 0 < sigma < 2 beta");
  const double b = beta, s = sigma;
  return std::pow(2.0, -b / s) * (s / b) * std::pow((2.0 * b - s) / b, (2.0 * b - s) / s) *
         std::pow(rho, -b / s);
}

double polymer_growth_constant(double beta, double sigma, double rho) {
  if (!(rho > 0.0) || !(sigma > 0.0)) throw ParameterError("polymer_growth_constant needs rho, sigma > 0");
  if (sigma >= beta) throw RegimeError("polymer growth constant needs sigma < beta");
  const double b = beta, s = sigma;
  return ((b - s) / b) * std::pow(b / (2.0 * b - s), (2.0 * b - s) / (b - s)) * std::pow(rho, b / (b - s));
}

double lil_constant(double beta, double sigma, double rho) {
  if (!(rho > 0.0) || !(sigma > 0.0) || sigma >= 2.0 * beta)
    throw ParameterError("lil_constant needs rho > 0 and 0 < sigma < 2 beta");
  const double b = beta, s = sigma;
  return 2.0 * rho * std::pow(b / s, s / b) * std::pow(b / (2.0 * b - s), (2.0 * b - s) / b);
}

double collapse_time(double rho) {
  if (!(rho > 0.0)) throw ParameterError("collapse_time needs rho > 0");
  return 1.0 / rho;
}

PotentialConstants potential_constants(int d, double beta, double p, double rho_p) {
  if (d < 1 || !(beta > 0.0 && beta <= 2.0)) throw ParameterError("invalid (d, beta)");
  if (!(p > 0.5 * d && p < std::min(static_cast<double>(d), 0.5 * (d + beta))))
    throw ParameterError("p must satisfy d/2 < p < min(d, (d + beta)/2)");
  if (!(rho_p > 0.0)) throw ParameterError("rho_p must be > 0");
  PotentialConstants c;
  c.sigma = 2.0 * p - d;
  c.C_p = riesz_composition_constant(d, c.sigma);
  const double b = beta, s = c.sigma;
  c.rate = ((b + s) / b) * std::pow(c.C_p / (8.0 * rho_p), b / (b + s)) *
           std::pow((2.0 * b - s) / b, (2.0 * b - s) / (b + s));
  c.lil = std::sqrt(8.0 * rho_p / c.C_p) * std::pow(b / (s + b), (s + b) / (2.0 * b)) *
          std::pow(b / (2.0 * b - s), (2.0 * b - s) / (2.0 * b));
  return c;
}

}  // namespace riesz
