#include "riesz/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "riesz/cache.hpp"
#include "riesz/error.hpp"
#include "riesz/potential.hpp"
#include "riesz/renorm.hpp"
#include "riesz/spectral.hpp"
#include "riesz/stable.hpp"
#include "riesz/variational.hpp"

namespace riesz {

namespace {

using nlohmann::ordered_json;

std::string fixed(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

// Streams used by one replica: two path streams and one noise stream.
struct Streams {
  SeedRecord path, path_b, noise;
};

Streams streams(std::uint64_t seed, Lane lane, std::uint64_t r) {
  if (lane == Lane::Scaled)
    return {seed_for(seed, Lane::Scaled, 2 * r), seed_for(seed, Lane::Scaled, 2 * r + 1),
            seed_for(seed, Lane::Scaled, 2 * r + 1)};
  return {seed_for(seed, Lane::Path, r), seed_for(seed, Lane::PathB, r), seed_for(seed, Lane::Noise, r)};
}

double scaling_exponent(const ExperimentConfig& cfg, const std::string& target) {
  if (target == "potential") return PotentialParams{cfg.rp.d(), cfg.rp.beta(), cfg.p}.scaling_exponent();
  return 2.0 - cfg.rp.q();
}

class Writer {
 public:
  explicit Writer(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void text(const std::string& name, const std::string& body) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << body;
    files_.push_back(name);
  }

  void columns(const std::string& name, const std::vector<double>& x, const std::vector<double>& y) {
    std::string body;
    for (std::size_t i = 0; i < x.size(); ++i) body += fixed(x[i]) + " " + fixed(y[i]) + "\n";
    text(name, body);
  }

  void samples(const std::vector<double>& v, Lane lane, std::string& body, bool header) {
    if (header) body += "replica,value,seed_lane\n";
    for (std::size_t i = 0; i < v.size(); ++i)
      body += std::to_string(i) + "," + fixed(v[i]) + "," + std::to_string(static_cast<int>(lane)) + "\n";
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

ordered_json config_json(const ExperimentConfig& cfg) {
  ordered_json j = ordered_json::object();
  std::istringstream in(serialize(cfg));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    j[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

ordered_json tolerance_json(const ExperimentConfig& cfg) {
  const GridSpec g;
  ordered_json j;
  j["band_steps"] = cfg.quad.band_steps;
  j["mean_correction"] = cfg.quad.mean_correction;
  j["grading"] = cfg.quad.grading;
  j["cell_nodes"] = cfg.quad.cell_nodes;
  j["lambda_spacing"] = cfg.quad.lambda_spacing;
  j["lambda_refine"] = cfg.quad.lambda_refine;
  j["theta_spacing_over_eps"] = cfg.quad.theta_spacing;
  j["theta_radius"] = cfg.quad.theta_radius;
  j["solver_tol"] = cfg.solver.tol;
  j["solver_max_iters"] = cfg.solver.max_iters;
  j["grid_core_cells"] = g.core_cells;
  j["grid_far_tolerance"] = g.tolerance;
  j["ks_min_samples"] = 50;
  j["ci_z"] = 1.959963984540054;
  return j;
}

}  // namespace

Sampler make_sampler(const ExperimentConfig& cfg, const std::string& target, Lane lane) {
  const auto rp = cfg.rp;
  const auto q = cfg.quad;
  const double t = cfg.t;
  const int n = cfg.steps;
  if (target == "eta") {
    return [=](std::uint64_t seed, std::uint64_t r) {
      const auto s = streams(seed, lane, r);
      return eta(sample_path(rp.stable, t, n, s.path), rp, q);
    };
  }
  if (target == "gamma") {
    const int K = cfg.max_level;
    return [=](std::uint64_t seed, std::uint64_t r) {
      const auto s = streams(seed, lane, r);
      return gamma_renormalized(sample_path(rp.stable, t, n, s.path), rp, K, q).value;
    };
  }
  if (target == "zeta") {
    return [=](std::uint64_t seed, std::uint64_t r) {
      const auto s = streams(seed, lane, r);
      const auto a = sample_path(rp.stable, t, n, s.path);
      const auto b = sample_path(rp.stable, t, n, s.path_b);
      return zeta(a, b, rp, t, t, q);
    };
  }
  if (target == "spectral") {
    const SpectralWeight sw{rp, cfg.alpha, cfg.epsilon};
    auto quad = std::make_shared<LambdaQuadrature>(LambdaQuadrature::for_weight(sw, q));
    return [=](std::uint64_t seed, std::uint64_t r) {
      const auto s = streams(seed, lane, r);
      return eta_smoothed_freq(sample_path(rp.stable, t, n, s.path), sw, *quad);
    };
  }
  if (target == "potential") {
    const PotentialParams pp{rp.d(), rp.beta(), cfg.p};
    pp.validate();
    const bool grid = cfg.grid_sampler;
    return [=](std::uint64_t seed, std::uint64_t r) {
      const auto s = streams(seed, lane, r);
      const auto path = sample_path(rp.stable, t, n, s.path);
      auto rng = make_engine(s.noise);
      // the Scaled lane shares stream 2r + 1 between the unused second path and the noise
      return grid ? sample_F_grid(path, pp, GridSpec{}, rng) : sample_F_representation(path, pp, q, rng);
    };
  }
  throw ParameterError("unknown target '" + target + "'");
}

ScalingSamples scaling_samples(const ExperimentConfig& cfg) {
  cfg.validate();
  const double c = cfg.scale;
  ScalingSamples out;
  out.exponent = scaling_exponent(cfg, cfg.target);
  const double factor = std::pow(c, out.exponent);

  ExperimentConfig big = cfg;
  big.t = c * cfg.t;
  ExperimentConfig small = cfg;
  if (cfg.target == "spectral") {
    // eta_{a,e}([0, ct]^2_<) =d c^{2 - sigma/beta} eta_{a c^{(d - sigma)/beta}, e c^{-1/beta}}([0, t]^2_<)
    small.alpha = cfg.alpha * std::pow(c, (cfg.rp.d() - cfg.rp.sigma) / cfg.rp.beta());
    small.epsilon = cfg.epsilon * std::pow(c, -1.0 / cfg.rp.beta());
  }
  out.direct = run_replicas(make_sampler(big, cfg.target, Lane::Path), cfg.replicas, cfg.seed, 0, cfg.jobs).samples;
  out.scaled =
      run_replicas(make_sampler(small, cfg.target, Lane::Scaled), cfg.replicas, cfg.seed, 0, cfg.jobs).samples;
  for (double& v : out.scaled) v *= factor;
  out.ks = ks_two_sample(out.direct, out.scaled);
  return out;
}

RunSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunSummary sum;
  sum.out_dir = cfg.out;
  std::filesystem::create_directories(sum.out_dir);
  Writer w(sum.out_dir);
  ordered_json extra = ordered_json::object();
  std::vector<int> lanes{static_cast<int>(Lane::Path)};
  auto& res = sum.results;

  auto write_samples = [&](const std::vector<double>& v) {
    std::string body;
    w.samples(v, Lane::Path, body, true);
    w.text("samples.csv", body);
    const auto est = McEstimate::of(v);
    res["mean"] = est.mean();
    res["std_error"] = est.std_error().value_or(std::numeric_limits<double>::quiet_NaN());
    res["min"] = est.min();
    res["max"] = est.max();
  };

  switch (cfg.kind) {
    case ExperimentKind::Eta: {
      const auto run = run_replicas(make_sampler(cfg, "eta"), cfg.replicas, cfg.seed, 0, cfg.jobs);
      write_samples(run.samples);
      res["exact_mean"] = mean_eta(cfg.rp, cfg.t);
      res["rule_mean"] = eta_rule_mean(cfg.rp, cfg.t, cfg.steps, cfg.quad.band_steps);
      break;
    }
    case ExperimentKind::Zeta: {
      lanes.push_back(static_cast<int>(Lane::PathB));
      const auto run = run_replicas(make_sampler(cfg, "zeta"), cfg.replicas, cfg.seed, 0, cfg.jobs);
      write_samples(run.samples);
      break;
    }
    case ExperimentKind::Gamma: {
      const auto rp = cfg.rp;
      const auto q = cfg.quad;
      const int K = cfg.max_level;
      const double t = cfg.t;
      const int n = cfg.steps;
      // per replica: gamma, then the K + 1 level sums
      const auto rows = run_replicas_vec(
          [=](std::uint64_t seed, std::uint64_t r) {
            const auto g = gamma_renormalized(sample_path(rp.stable, t, n, seed_for(seed, Lane::Path, r)), rp, K, q);
            std::vector<double> v{g.value};
            v.insert(v.end(), g.level_sums.begin(), g.level_sums.end());
            return v;
          },
          cfg.replicas, cfg.seed, 0, cfg.jobs);
      std::vector<double> values;
      std::vector<McEstimate> levels(static_cast<std::size_t>(K + 1));
      for (const auto& row : rows) {
        values.push_back(row[0]);
        for (int k = 0; k <= K; ++k) levels[static_cast<std::size_t>(k)].add(row[static_cast<std::size_t>(k + 1)]);
      }
      write_samples(values);
      std::vector<double> ks, lv;
      std::string csv = "level,variance,log2_variance\n";
      for (int k = 0; k <= K; ++k) {
        const double v = levels[static_cast<std::size_t>(k)].variance().value_or(0.0);
        csv += std::to_string(k) + "," + fixed(v) + "," + fixed(std::log2(v)) + "\n";
        ks.push_back(k);
        lv.push_back(std::log2(v));
      }
      w.text("levels.csv", csv);
      w.columns("level_variance.dat", ks, lv);
      if (cfg.replicas >= 2 && K >= 1) {
        const auto fit = fit_line(ks, lv);
        res["level_slope"] = fit.slope;
        res["level_slope_stderr"] = fit.slope_stderr;
        res["level_slope_expected"] = -(3.0 - 2.0 * cfg.rp.q());
      }
      res["tail_bound_first"] =
          gamma_renormalized(sample_path(rp.stable, t, n, seed_for(cfg.seed, Lane::Path, 0)), rp, K, q).tail_bound;
      break;
    }
    case ExperimentKind::Spectral: {
      const SpectralWeight sw{cfg.rp, cfg.alpha, cfg.epsilon};
      const auto quad = LambdaQuadrature::for_weight(sw, cfg.quad);
      const auto theta = cached_theta(sw, cfg.quad);
      const auto rp = cfg.rp;
      const double t = cfg.t;
      const int n = cfg.steps;
      const auto rows = run_replicas_vec(
          [&](std::uint64_t seed, std::uint64_t r) {
            const auto path = sample_path(rp.stable, t, n, seed_for(seed, Lane::Path, r));
            const double f = eta_smoothed_freq(path, sw, quad);
            double tv = std::numeric_limits<double>::quiet_NaN();
            try {
              tv = eta_smoothed_time(path, theta);
            } catch (const RangeError&) {
            }
            return std::vector<double>{f, tv};
          },
          cfg.replicas, cfg.seed, 0, cfg.jobs);
      std::vector<double> freq;
      std::string csv = "replica,freq,time,rel_diff\n";
      double worst = 0.0;
      std::size_t out_of_range = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        freq.push_back(rows[i][0]);
        const double rel = std::abs(rows[i][1] - rows[i][0]) / rows[i][0];
        if (std::isnan(rows[i][1])) ++out_of_range;
        else worst = std::max(worst, rel);
        csv += std::to_string(i) + "," + fixed(rows[i][0]) + "," + fixed(rows[i][1]) + "," + fixed(rel) + "\n";
      }
      write_samples(freq);
      w.text("spectral.csv", csv);
      res["parseval_max_rel"] = worst;
      res["time_form_out_of_range"] = static_cast<double>(out_of_range);
      res["theta_origin"] = theta.at_origin();
      res["theta_interp_error"] = theta.interpolation_error();
      break;
    }
    case ExperimentKind::Rho: {
      lanes = {static_cast<int>(Lane::Restart)};
      const SpectralWeight sw{cfg.rp, cfg.alpha, cfg.epsilon};
      const auto rho = rho_continuum(sw, cfg.M_list, cfg.solver, cached_solution);
      std::string csv = "M,value,rel_change,restart_spread\n";
      for (std::size_t i = 0; i < rho.M.size(); ++i)
        csv += fixed(rho.M[i]) + "," + fixed(rho.values[i]) + "," +
               fixed(i == 0 ? std::numeric_limits<double>::quiet_NaN() : rho.rel_change[i - 1]) + "," +
               fixed(rho.spreads[i]) + "\n";
      w.text("rho.csv", csv);
      w.columns("rho_M.dat", rho.M, rho.values);
      const auto& best = rho.solutions.back();
      std::vector<double> it(best.trace.size());
      for (std::size_t i = 0; i < it.size(); ++i) it[i] = static_cast<double>(i);
      w.columns("rho_trace.dat", it, best.trace);
      res["rho_last"] = rho.last;
      res["rho_richardson"] = rho.richardson;
      res["convergence_order"] = rho.order;
      res["last_rel_change"] = rho.rel_change.empty() ? 0.0 : rho.rel_change.back();
      double spread = 0.0;
      for (double s : rho.spreads) spread = std::max(spread, s);
      res["max_restart_spread"] = spread;
      const double beta = cfg.rp.beta(), sigma = cfg.rp.sigma;
      res["ldp_rate_constant"] = ldp_rate_constant(beta, sigma, rho.last);
      res["lil_constant"] = lil_constant(beta, sigma, rho.last);
      if (sigma < beta) res["polymer_growth_constant"] = polymer_growth_constant(beta, sigma, rho.last);
      break;
    }
    case ExperimentKind::Potential: {
      lanes.push_back(static_cast<int>(Lane::Noise));
      const auto run = run_replicas(make_sampler(cfg, "potential"), cfg.replicas, cfg.seed, 0, cfg.jobs);
      write_samples(run.samples);
      const PotentialParams pp{cfg.rp.d(), cfg.rp.beta(), cfg.p};
      res["C"] = pp.C();
      res["sigma"] = pp.sigma();
      res["scaling_exponent"] = pp.scaling_exponent();
      break;
    }
    case ExperimentKind::TailFit: {
      const auto run = run_replicas(make_sampler(cfg, cfg.target), cfg.replicas, cfg.seed, 0, cfg.jobs);
      write_samples(run.samples);
      const double beta = cfg.rp.beta(), sigma = cfg.rp.sigma;
      auto emit = [&](const std::vector<double>& xs, const std::string& tag) {
        const auto th = tail_thresholds(xs, beta, sigma, cfg.thresholds, cfg.q_lo, cfg.q_hi);
        const auto curve = tail_curve(xs, th);
        std::string csv = "threshold,a_pow,exceed,p_hat,ci_lo,ci_hi\n";
        std::vector<double> ap, lp;
        for (std::size_t i = 0; i < th.size(); ++i) {
          const double a = std::pow(th[i], beta / sigma);
          csv += fixed(th[i]) + "," + fixed(a) + "," + std::to_string(curve.exceed[i]) + "," +
                 fixed(curve.p_hat[i]) + "," + fixed(curve.ci[i].lo) + "," + fixed(curve.ci[i].hi) + "\n";
          if (curve.exceed[i] > 0) {
            ap.push_back(a);
            lp.push_back(std::log(curve.p_hat[i]));
          }
        }
        w.text(tag + ".csv", csv);
        w.columns(tag + ".dat", ap, lp);
        const auto fit = ldp_exponent_fit(curve, beta, sigma);
        res[tag + "_slope"] = fit.line.slope;
        res[tag + "_slope_stderr"] = fit.line.slope_stderr;
        res[tag + "_monotone"] = curve.monotone_within_ci() ? 1.0 : 0.0;
      };
      emit(run.samples, "tail");
      if (cfg.target == "gamma") {
        std::vector<double> neg(run.samples.size());
        for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -run.samples[i];
        if (quantile(neg, cfg.q_lo) > 0.0) emit(neg, "tail_neg");
      }
      break;
    }
    case ExperimentKind::ScalingKs: {
      lanes.push_back(static_cast<int>(Lane::Scaled));
      const auto s = scaling_samples(cfg);
      std::string body;
      w.samples(s.direct, Lane::Path, body, true);
      w.samples(s.scaled, Lane::Scaled, body, false);
      w.text("samples.csv", body);
      res["ks_statistic"] = s.ks.statistic;
      res["ks_p_value"] = s.ks.p_value;
      res["scaling_exponent"] = s.exponent;
      break;
    }
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ordered_json m;
  m["tool"] = "riesz_lab";
  m["version"] = kLabVersion;
#ifdef __VERSION__
  m["compiler"] = __VERSION__;
#endif
  m["json_library"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                      std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                      std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  m["kind"] = kind_name(cfg.kind);
  m["config"] = config_json(cfg);
  m["config_text"] = serialize(cfg);
  ordered_json seeds;
  seeds["base_seed"] = cfg.seed;
  seeds["lanes"] = lanes;
  seeds["replica_first"] = 0;
  seeds["replica_count"] = cfg.kind == ExperimentKind::Rho ? 0 : cfg.replicas;
  seeds["rng"] = "mt19937_64 seeded from splitmix64(seed, lane, replica)";
  m["seeds"] = seeds;
  m["tolerances"] = tolerance_json(cfg);
  ordered_json r = ordered_json::object();
  for (const auto& [k, v] : res) r[k] = std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
  m["results"] = r;
  m["files"] = w.files();
  m["wall_seconds"] = wall;
  w.text("manifest.json", m.dump(2) + "\n");
  sum.files = w.files();
  return sum;
}

}  // namespace riesz
