#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riesz/riesz.hpp"
#include "riesz/variational.hpp"

namespace riesz {

enum class ExperimentKind { Eta, Gamma, Zeta, Spectral, Rho, Potential, TailFit, ScalingKs };

const char* kind_name(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

// Flat key = value configuration. Unknown keys and malformed values are errors.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Eta;
  RieszParams rp{{1, 2.0}, 0.5};
  double t = 1.0;
  int steps = 256;
  QuadratureSpec quad;
  int max_level = 6;                 // gamma
  double alpha = 0.2;                // spectral / rho
  double epsilon = 0.5;
  std::vector<double> M_list{8, 16, 32, 64};
  SolverOptions solver;
  double p = 0.75;                   // potential
  bool grid_sampler = false;         // potential: white-noise grid instead of the representation
  std::string target = "eta";        // scaling-ks / tailfit population
  double scale = 2.0;                // scaling-ks time factor c
  int thresholds = 8;                // tailfit
  double q_lo = 0.95;
  double q_hi = 0.999;
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
  int jobs = 0;
  std::string out = "out";

  // Regime and range checks for the selected experiment; throws with the failed inequality.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Canonical text form; parse_config(serialize(c)) reproduces c exactly.
std::string serialize(const ExperimentConfig& c);
void apply_override(ExperimentConfig& c, const std::string& assignment);
void set_key(ExperimentConfig& c, const std::string& key, const std::string& value);
std::vector<std::string> config_keys();

}  // namespace riesz
