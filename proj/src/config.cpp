#include "riesz/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "riesz/error.hpp"

namespace riesz {

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};
constexpr KindName kKinds[] = {{ExperimentKind::Eta, "eta"},         {ExperimentKind::Gamma, "gamma"},
                               {ExperimentKind::Zeta, "zeta"},       {ExperimentKind::Spectral, "spectral"},
                               {ExperimentKind::Rho, "rho"},         {ExperimentKind::Potential, "potential"},
                               {ExperimentKind::TailFit, "tailfit"}, {ExperimentKind::ScalingKs, "scaling-ks"}};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw ParameterError("config key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
    throw ParameterError("config key '" + key + "': expected an integer, got '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
    throw ParameterError("config key '" + key + "': expected an unsigned integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ParameterError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define RL_DOUBLE(KEY, MEMBER)                                                              \
  Field {                                                                                   \
    KEY, [](ExperimentConfig& c, const std::string& v) { c.MEMBER = to_double(KEY, v); }, \
        [](const ExperimentConfig& c) { return num(c.MEMBER); }                             \
  }
#define RL_INT(KEY, MEMBER)                                                                     \
  Field {                                                                                       \
    KEY, [](ExperimentConfig& c, const std::string& v) { c.MEMBER = static_cast<int>(to_int(KEY, v)); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); }                      \
  }
#define RL_BOOL(KEY, MEMBER)                                                               \
  Field {                                                                                  \
    KEY, [](ExperimentConfig& c, const std::string& v) { c.MEMBER = to_bool(KEY, v); },   \
        [](const ExperimentConfig& c) { return std::string(c.MEMBER ? "true" : "false"); } \
  }

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = {
      {"kind", [](ExperimentConfig& c, const std::string& v) { c.kind = parse_kind(v); },
       [](const ExperimentConfig& c) { return std::string(kind_name(c.kind)); }},
      RL_INT("d", rp.stable.d),
      RL_DOUBLE("beta", rp.stable.beta),
      RL_DOUBLE("sigma", rp.sigma),
      RL_DOUBLE("t", t),
      RL_INT("steps", steps),
      RL_INT("band_steps", quad.band_steps),
      RL_BOOL("mean_correction", quad.mean_correction),
      RL_DOUBLE("grading", quad.grading),
      RL_INT("cell_nodes", quad.cell_nodes),
      RL_DOUBLE("lambda_spacing", quad.lambda_spacing),
      RL_INT("lambda_refine", quad.lambda_refine),
      RL_DOUBLE("theta_spacing", quad.theta_spacing),
      RL_DOUBLE("theta_radius", quad.theta_radius),
      RL_INT("max_level", max_level),
      RL_DOUBLE("alpha", alpha),
      RL_DOUBLE("epsilon", epsilon),
      {"M_list",
       [](ExperimentConfig& c, const std::string& v) {
         c.M_list.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) c.M_list.push_back(to_double("M_list", trim(item)));
         if (c.M_list.empty()) throw ParameterError("config key 'M_list': empty list");
       },
       [](const ExperimentConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.M_list.size(); ++i) s += (i ? "," : "") + num(c.M_list[i]);
         return s;
       }},
      RL_INT("solver_max_iters", solver.max_iters),
      RL_INT("solver_restarts", solver.restarts),
      RL_DOUBLE("solver_tol", solver.tol),
      RL_DOUBLE("solver_step", solver.step),
      RL_INT("window_radius", solver.window_radius),
      {"solver_seed", [](ExperimentConfig& c, const std::string& v) { c.solver.seed = to_u64("solver_seed", v); },
       [](const ExperimentConfig& c) { return std::to_string(c.solver.seed); }},
      RL_DOUBLE("p", p),
      RL_BOOL("grid_sampler", grid_sampler),
      {"target", [](ExperimentConfig& c, const std::string& v) { c.target = v; },
       [](const ExperimentConfig& c) { return c.target; }},
      RL_DOUBLE("scale", scale),
      RL_INT("thresholds", thresholds),
      RL_DOUBLE("q_lo", q_lo),
      RL_DOUBLE("q_hi", q_hi),
      {"replicas", [](ExperimentConfig& c, const std::string& v) { c.replicas = to_u64("replicas", v); },
       [](const ExperimentConfig& c) { return std::to_string(c.replicas); }},
      {"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = to_u64("seed", v); },
       [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      RL_INT("jobs", jobs),
      {"out", [](ExperimentConfig& c, const std::string& v) { c.out = v; },
       [](const ExperimentConfig& c) { return c.out; }},
  };
  return fields;
}

#undef RL_DOUBLE
#undef RL_INT
#undef RL_BOOL

std::string fmtd(double v) { return num(v); }

}  // namespace

const char* kind_name(ExperimentKind k) {
  for (const auto& e : kKinds)
    if (e.kind == k) return e.name;
  return "eta";
}

ExperimentKind parse_kind(const std::string& s) {
  for (const auto& e : kKinds)
    if (s == e.name) return e.kind;
  throw ParameterError("unknown experiment kind '" + s +
                       "' (expected eta, gamma, zeta, spectral, rho, potential, tailfit or scaling-ks)");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> k;
  for (const auto& f : schema()) k.emplace_back(f.key);
  return k;
}

void set_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
  for (const auto& f : schema()) {
    if (key == f.key) {
      f.set(c, value);
      return;
    }
  }
  throw ParameterError("unknown config key '" + key + "'");
}

void apply_override(ExperimentConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ParameterError("override must look like key=value, got '" + assignment + "'");
  set_key(c, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      apply_override(c, line);
    } catch (const ParameterError& e) {
      throw ParameterError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const ExperimentConfig& c) {
  std::string out;
  for (const auto& f : schema()) out += std::string(f.key) + " = " + f.get(c) + "\n";
  return out;
}

void ExperimentConfig::validate() const {
  rp.stable.validate();
  quad.validate();
  if (!(t > 0.0)) throw ParameterError("t must be > 0");
  if (steps < 1) throw ParameterError("steps must be >= 1");
  if (jobs < 0) throw ParameterError("jobs must be >= 0");
  switch (kind) {
    case ExperimentKind::Eta:
      require_subcritical(rp, "experiment 'eta'");
      break;
    case ExperimentKind::Gamma:
      require_renormalizable_or_sub(rp, "experiment 'gamma'");
      if (steps % (1 << (max_level + 1)) != 0)
        throw ParameterError("gamma needs steps divisible by 2^(max_level + 1)");
      break;
    case ExperimentKind::Zeta:
      if (!(rp.sigma > 0.0 && rp.sigma < rp.d()))
        throw ParameterError("zeta needs 0 < sigma < d, got sigma = " + fmtd(rp.sigma));
      if (rp.sigma >= 2.0 * rp.beta())
        throw RegimeError("experiment 'zeta' needs sigma < 2 beta, got sigma = " + fmtd(rp.sigma));
      break;
    case ExperimentKind::Spectral:
      SpectralWeight{rp, alpha, epsilon}.validate();
      break;
    case ExperimentKind::Rho:
      SpectralWeight{rp, alpha, epsilon}.validate();
      if (!(alpha > 0.0)) throw ParameterError("experiment 'rho' needs alpha > 0");
      if (M_list.size() < 3) throw ParameterError("experiment 'rho' needs at least three M values");
      break;
    case ExperimentKind::Potential: {
      const double upper = std::min(static_cast<double>(rp.d()), 0.5 * (rp.d() + rp.beta()));
      if (!(p > 0.5 * rp.d() && p < upper))
        throw RegimeError("experiment 'potential' needs d/2 < p < min(d, (d + beta)/2), got p = " + fmtd(p));
      break;
    }
    case ExperimentKind::TailFit:
      if (target == "eta") require_subcritical(rp, "experiment 'tailfit' on eta");
      else if (target == "gamma") require_renormalizable_or_sub(rp, "experiment 'tailfit' on gamma");
      else throw ParameterError("tailfit target must be eta or gamma");
      if (thresholds < 4) throw ParameterError("tailfit needs at least 4 thresholds");
      if (!(q_lo > 0.0 && q_lo < q_hi && q_hi < 1.0)) throw ParameterError("need 0 < q_lo < q_hi < 1");
      break;
    case ExperimentKind::ScalingKs:
      if (!(scale > 0.0)) throw ParameterError("scale must be > 0");
      if (target == "eta") require_subcritical(rp, "scaling test on eta");
      else if (target == "gamma") require_renormalizable_or_sub(rp, "scaling test on gamma");
      else if (target == "zeta") {
        if (rp.sigma >= 2.0 * rp.beta() || rp.sigma >= rp.d()) throw RegimeError("scaling test on zeta needs sigma < min(2 beta, d)");
      } else if (target == "spectral") SpectralWeight{rp, alpha, epsilon}.validate();
      else if (target == "potential") {
        const double upper = std::min(static_cast<double>(rp.d()), 0.5 * (rp.d() + rp.beta()));
        if (!(p > 0.5 * rp.d() && p < upper))
          throw RegimeError("scaling test on F needs d/2 < p < min(d, (d + beta)/2)");
      } else throw ParameterError("scaling target must be eta, zeta, gamma, spectral or potential");
      if (replicas < 50) throw ParameterError("scaling test needs at least 50 replicas");
      break;
  }
}

}  // namespace riesz
