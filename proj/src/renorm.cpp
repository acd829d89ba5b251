#include "riesz/renorm.hpp"

#include <cmath>

#include "riesz/error.hpp"

namespace riesz {

double DyadicCell::side() const { return horizon / std::ldexp(1.0, level + 1); }

std::vector<DyadicCell> dyadic_cells(double t, int K) {
  if (K < 0) throw ParameterError("max level K must be >= 0");
  if (K > 30) throw ParameterError("max level K must be <= 30");
  if (!(t > 0.0)) throw ParameterError("horizon t must be > 0");
  std::vector<DyadicCell> cells;
  for (int k = 0; k <= K; ++k)
    for (int l = 0; l < (1 << k); ++l) cells.push_back({k, l, t});
  return cells;
}

DyadicRule::DyadicRule(const RieszParams& rp, int n, int K, const QuadratureSpec& q)
    : rp_(rp), n_(n), K_(K), m1_(moment_neg_sigma(rp)) {
  require_renormalizable_or_sub(rp, "the dyadic approximation");
  q.validate();
  if (K < 0 || K > 24) throw ParameterError("max level K must lie in [0, 24]");
  const long long cells = 1LL << (K + 1);
  if (n % cells != 0) throw ParameterError("path steps must be divisible by 2^{K+1}");
  const int base = static_cast<int>(n / cells);
  const double g = q.grading > 0.0 ? q.grading : 2.0 / (2.0 - rp.q());
  const GradedAxis axis = graded_axis(base, q.cell_nodes, g);
  for (int k = 0; k <= K; ++k) {
    const GradedAxis a = axis.scaled(1 << (K - k));
    rules_.emplace_back(a, a);
  }
}

int DyadicRule::corner_index(int level, int index) const {
  const int side = n_ >> (level + 1);
  return (2 * index + 1) * side;
}

double DyadicRule::cell_value(const StablePath& path, int level, int index) const {
  if (path.steps() != n_) throw ParameterError("path length does not match the dyadic rule");
  const int c = corner_index(level, index);
  return rule(level).evaluate(path, c, -1, path, c, 1, rp_.sigma, rp_.q(), m1_);
}

double DyadicRule::cell_mean(int level, double dt) const {
  return rule(level).expectation(dt, rp_.q(), m1_);
}

RenormResult gamma_renormalized(const StablePath& path, const RieszParams& rp, int K,
                                const QuadratureSpec& q) {
  if (path.dim() != rp.d() || path.params().beta != rp.beta())
    throw ParameterError("path was generated with different (d, beta) than the Riesz parameters");
  const DyadicRule rule(rp, path.steps(), K, q);
  const double dt = path.dt();
  const double t = path.horizon();
  RenormResult res;
  res.max_level = K;
  std::vector<double> cell_var(static_cast<std::size_t>(K) + 1, 0.0);
  for (int k = 0; k <= K; ++k) {
    const double mean = rule.cell_mean(k, dt);
    const int count = 1 << k;
    std::vector<double> vals(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
    for (int l = 0; l < count; ++l) vals[static_cast<std::size_t>(l)] = rule.cell_value(path, k, l) - mean;
    double sum = 0.0;
    for (double v : vals) sum += v;
    res.level_sums.push_back(sum);
    res.level_means.push_back(count * mean);
    const DyadicCell cell{k, 0, t};
    const double exact = mean_rectangle(rp, cell.r0(), cell.r1(), cell.s0(), cell.s1());
    res.level_bias.push_back(count * (mean - exact));
    if (count >= 2) {
      double m = sum / count, ss = 0.0;
      for (double v : vals) ss += (v - m) * (v - m);
      cell_var[static_cast<std::size_t>(k)] = ss / (count - 1);
    } else {
      cell_var[0] = vals[0] * vals[0];
    }
  }
  for (double s : res.level_sums) res.value += s;

  // Tail model Var(level k) = c^2 2^{-(3 - 2 sigma/beta) k}; c^2 from the path's own
  // within-level spread, Var(level k) ~ 2^k s_k^2 (cells at a level are independent).
  const double decay = 3.0 - 2.0 * rp.q();
  const int first = K >= 2 ? 2 : (K >= 1 ? 1 : 0);
  double c2 = 0.0;
  for (int k = first; k <= K; ++k)
    c2 += std::ldexp(cell_var[static_cast<std::size_t>(k)], k) * std::pow(2.0, decay * k);
  c2 /= (K - first + 1);
  const double r = std::pow(2.0, -0.5 * decay);
  res.tail_bound = std::sqrt(c2) * std::pow(r, K + 1) / (1.0 - r);
  return res;
}

std::vector<double> centered_cells(const StablePath& path, const RieszParams& rp, int K,
                                   const QuadratureSpec& q) {
  const DyadicRule rule(rp, path.steps(), K, q);
  std::vector<double> out;
  for (int k = 0; k <= K; ++k) {
    const double mean = rule.cell_mean(k, path.dt());
    for (int l = 0; l < (1 << k); ++l) out.push_back(rule.cell_value(path, k, l) - mean);
  }
  return out;
}

LevelProfile level_variance_profile(const RieszParams& rp, int K, std::size_t replicas,
                                    std::uint64_t seed, const QuadratureSpec& q, double t,
                                    int base_steps) {
  if (replicas < 2) throw ParameterError("level profile needs at least 2 replicas");
  const int n = base_steps << (K + 1);
  const DyadicRule rule(rp, n, K, q);
  const double dt = t / n;
  std::vector<double> means;
  for (int k = 0; k <= K; ++k) means.push_back(rule.cell_mean(k, dt));
  const auto rows = run_replicas_vec(
      [&](std::uint64_t s, std::uint64_t r) {
        const auto path = sample_path(rp.stable, t, n, seed_for(s, Lane::Path, r));
        std::vector<double> cells;
        for (int k = 0; k <= K; ++k)
          for (int l = 0; l < (1 << k); ++l)
            cells.push_back(rule.cell_value(path, k, l) - means[static_cast<std::size_t>(k)]);
        return cells;
      },
      replicas, seed);

  LevelProfile prof;
  std::vector<double> ks, logv;
  std::size_t offset = 0;
  for (int k = 0; k <= K; ++k) {
    const int count = 1 << k;
    McEstimate level;
    double cell_sum = 0.0;
    std::vector<McEstimate> per_cell(static_cast<std::size_t>(count));
    std::vector<double> sums(replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
      double s = 0.0;
      for (int l = 0; l < count; ++l) {
        const double v = rows[r][offset + static_cast<std::size_t>(l)];
        s += v;
        per_cell[static_cast<std::size_t>(l)].add(v);
      }
      sums[r] = s;
      level.add(s);
    }
    for (const auto& e : per_cell) cell_sum += e.variance().value_or(0.0);
    const double var = level.variance().value_or(0.0);
    // stderr of a sample variance: sqrt((m4 - var^2 (n-3)/(n-1)) / n)
    double m4 = 0.0;
    for (double s : sums) {
      const double c = s - level.mean();
      m4 += c * c * c * c;
    }
    m4 /= static_cast<double>(replicas);
    const double nn = static_cast<double>(replicas);
    const double se = std::sqrt(std::max(0.0, (m4 - var * var * (nn - 3.0) / (nn - 1.0)) / nn));
    prof.level_variance.push_back(var);
    prof.variance_stderr.push_back(se);
    prof.cell_variance_sum.push_back(cell_sum);
    if (var > 0.0) {
      ks.push_back(k);
      logv.push_back(std::log2(var));
    }
    offset += static_cast<std::size_t>(count);
  }
  if (ks.size() >= 2) prof.log2_fit = fit_line(ks, logv);
  return prof;
}

double cell_scale_factor(const RieszParams& rp, int level) {
  return std::pow(2.0, -(level + 1) * (2.0 - rp.q()));
}

KsResult cell_distribution_check(const RieszParams& rp, int level, int index, std::size_t replicas,
                                 std::uint64_t seed, const QuadratureSpec& q, double t, int n) {
  if (level < 0 || index < 0 || index >= (1 << level))
    throw ParameterError("cell index out of range");
  const DyadicRule rule(rp, n, level, q);
  const int zeta_steps = n >> (level + 1);
  const double scale = cell_scale_factor(rp, level);
  const auto cells = run_replicas(
      [&](std::uint64_t s, std::uint64_t r) {
        const auto path = sample_path(rp.stable, t, n, seed_for(s, Lane::Path, r));
        return rule.cell_value(path, level, index);
      },
      replicas, seed);
  QuadratureSpec qz = q;
  const auto zetas = run_replicas(
      [&](std::uint64_t s, std::uint64_t r) {
        const auto a = sample_path(rp.stable, t, zeta_steps, seed_for(s, Lane::PathB, r));
        const auto b = sample_path(rp.stable, t, zeta_steps, seed_for(s, Lane::Scaled, r));
        return scale * zeta(a, b, rp, t, t, qz);
      },
      replicas, seed);
  return ks_two_sample(cells.samples, zetas.samples);
}

}  // namespace riesz
