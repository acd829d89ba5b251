#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "riesz/spectral.hpp"

namespace riesz {

struct SolverOptions {
  int max_iters = 20000;
  int restarts = 5;
  double tol = 1e-9;          // projected-gradient norm relative to J
  double step = 0.5;          // initial step on the sphere
  int window_radius = 0;      // support radius of g; 0 -> 4 x the radius of E
  std::uint64_t seed = 1;
};

// sup over |g|_2 = 1 of
//   J(g) = sum_{x in E} wp(2 pi x / M) [ sum_y sqrt(Q(2 pi (x+y)/M)) sqrt(Q(2 pi y / M)) g(x+y) g(y) ]^2
// with E = Z^d cap [-M/(pi eps), M/(pi eps)]^d and g supported on the window [-W, W]^d.
struct LatticeProblem {
  SpectralWeight sw;
  double M = 16.0;
  SolverOptions opts;

  void validate() const;
  int e_radius() const;
  int window_radius() const;
  std::size_t window_size() const;
};

// Precomputed tables for J and its gradient. g is indexed row-major over the window.
class LatticeObjective {
 public:
  explicit LatticeObjective(const LatticeProblem& lp);

  int dim() const noexcept { return d_; }
  int window_radius() const noexcept { return W_; }
  std::size_t size() const noexcept { return a_.size(); }
  // Weights wp(2 pi x / M) for the E offsets (row-major over [-R, R]^d).
  const std::vector<double>& box_weights() const noexcept { return w_; }
  int e_radius() const noexcept { return R_; }

  double value(std::span<const double> g) const;
  // Returns J and fills grad.
  double gradient(std::span<const double> g, std::vector<double>& grad) const;
  // Replace the weights (domination checks); must be >= 0 and of box size.
  void set_box_weights(std::vector<double> w);

 private:
  void correlations(const std::vector<double>& h, std::vector<double>& S) const;

  int d_, W_, R_;
  std::vector<double> a_;   // sqrt(Q(2 pi y / M)) on the window
  std::vector<double> w_;   // box weights
  std::vector<std::vector<int>> shift_;  // per box offset: flat window shift table (-1 if outside)
};

double objective(const LatticeProblem& lp, std::span<const double> g);

struct VariationalSolution {
  std::vector<double> g;          // best maximizer on the window
  int window_radius = 0;
  double value = 0.0;             // rho_{alpha,eps,M} (lower bound from the window)
  double continuum_value = 0.0;   // (2 pi / M)^d value
  std::vector<double> trace;      // accepted objective values of the best restart
  std::vector<double> restart_values;
  double restart_spread = 0.0;    // (max - min) / max over restarts
  int iterations = 0;
};

// Projected normalized gradient ascent on {g >= 0, |g|_2 = 1} with backtracking, several
// restarts (the first from a symmetric bump). ConvergenceError carries the trace.
VariationalSolution solve_lattice(const LatticeProblem& lp);
// Single ascent from a given start (normalized and projected first).
VariationalSolution ascend(const LatticeObjective& obj, std::vector<double> g0, const SolverOptions& opts,
                           double M);

// Relative change of the value when the window radius is doubled.
double window_saturation(const LatticeProblem& lp);

struct RhoContinuum {
  std::vector<double> M;
  std::vector<double> values;      // (2 pi / M)^d rho_{alpha,eps,M}
  std::vector<double> rel_change;  // |v_i - v_{i-1}| / v_i
  std::vector<double> spreads;     // restart spread per M
  double last = 0.0;
  double richardson = 0.0;         // extrapolation from the last three values
  double order = 0.0;              // estimated convergence order in log2(M)
  bool monotone_tail = true;
  std::vector<VariationalSolution> solutions;
};

using LatticeSolver = std::function<VariationalSolution(const LatticeProblem&)>;

RhoContinuum rho_continuum(const SpectralWeight& sw, std::span<const double> M_list,
                           const SolverOptions& opts = {}, const LatticeSolver& solve = solve_lattice);

// Rate constants built from rho.
double ldp_rate_constant(double beta, double sigma, double rho);
double polymer_growth_constant(double beta, double sigma, double rho);
double lil_constant(double beta, double sigma, double rho);
double collapse_time(double rho);

struct PotentialConstants {
  double C_p = 0.0;
  double sigma = 0.0;      // 2p - d
  double rate = 0.0;       // kappa in log P{F(1) >= a} ~ -kappa a^{2 beta / (beta + sigma)}
  double lil = 0.0;        // limsup constant for F
};

// Needs d/2 < p < min(d, (d + beta)/2). rho_p is rho evaluated at sigma = 2p - d.
PotentialConstants potential_constants(int d, double beta, double p, double rho_p);

}  // namespace riesz
