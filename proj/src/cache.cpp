#include "riesz/cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace riesz {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string describe(const SpectralWeight& sw) {
  return "d=" + std::to_string(sw.rp.d()) + ";beta=" + num(sw.rp.beta()) + ";sigma=" + num(sw.rp.sigma) +
         ";alpha=" + num(sw.alpha) + ";eps=" + num(sw.epsilon);
}

}  // namespace

std::optional<std::filesystem::path> cache_dir() {
  const char* env = std::getenv("RIESZ_LAB_CACHE");
  if (!env || !*env) return std::nullopt;
  std::filesystem::path p(env);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) return std::nullopt;
  return p;
}

std::string cache_hash(const std::string& description) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : description) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string theta_cache_key(const SpectralWeight& sw, const QuadratureSpec& q) {
  return "theta-" + cache_hash(describe(sw) + ";rule=gl3-shells;lspacing=" + num(q.lambda_spacing) +
                               ";refine=" + std::to_string(q.lambda_refine) + ";tspacing=" +
                               num(q.theta_spacing) + ";radius=" + num(q.theta_radius));
}

std::string solution_cache_key(const LatticeProblem& lp) {
  const auto& o = lp.opts;
  return "rho-" + cache_hash(describe(lp.sw) + ";M=" + num(lp.M) + ";window=" + std::to_string(lp.window_radius()) +
                             ";seed=" + std::to_string(o.seed) + ";restarts=" + std::to_string(o.restarts) +
                             ";iters=" + std::to_string(o.max_iters) + ";tol=" + num(o.tol) +
                             ";step=" + num(o.step));
}

ThetaKernel cached_theta(const SpectralWeight& sw, const QuadratureSpec& q) {
  const auto dir = cache_dir();
  if (!dir) return ThetaKernel::build(sw, q);
  const auto file = *dir / (theta_cache_key(sw, q) + ".txt");
  if (std::ifstream in(file); in) {
    try {
      return ThetaKernel::load(in);
    } catch (const std::exception&) {
      // fall through and rebuild a damaged entry
    }
  }
  auto k = ThetaKernel::build(sw, q);
  std::ofstream out(file);
  if (out) k.save(out);
  return k;
}

std::string solution_to_json(const VariationalSolution& s) {
  nlohmann::json j;
  j["g"] = s.g;
  j["window_radius"] = s.window_radius;
  j["value"] = s.value;
  j["continuum_value"] = s.continuum_value;
  j["trace"] = s.trace;
  j["restart_values"] = s.restart_values;
  j["restart_spread"] = s.restart_spread;
  j["iterations"] = s.iterations;
  return j.dump();
}

VariationalSolution solution_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  VariationalSolution s;
  s.g = j.at("g").get<std::vector<double>>();
  s.window_radius = j.at("window_radius").get<int>();
  s.value = j.at("value").get<double>();
  s.continuum_value = j.at("continuum_value").get<double>();
  s.trace = j.at("trace").get<std::vector<double>>();
  s.restart_values = j.at("restart_values").get<std::vector<double>>();
  s.restart_spread = j.at("restart_spread").get<double>();
  s.iterations = j.at("iterations").get<int>();
  return s;
}

VariationalSolution cached_solution(const LatticeProblem& lp) {
  const auto dir = cache_dir();
  if (!dir) return solve_lattice(lp);
  const auto file = *dir / (solution_cache_key(lp) + ".json");
  if (std::ifstream in(file); in) {
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      return solution_from_json(ss.str());
    } catch (const std::exception&) {
    }
  }
  auto sol = solve_lattice(lp);
  std::ofstream out(file);
  if (out) out << solution_to_json(sol);
  return sol;
}

}  // namespace riesz
