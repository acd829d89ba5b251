#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "riesz/config.hpp"
#include "riesz/mc.hpp"
#include "riesz/rng.hpp"

namespace riesz {

inline constexpr const char* kLabVersion = "0.3.1";

// Two populations of a scaling-law comparison: `direct` is the functional on [0, c t],
// `scaled` is c^{exponent} times the functional on [0, t] (with transported parameters for
// the smoothed functional). Drawn from the Path and Scaled lanes respectively.
struct ScalingSamples {
  std::vector<double> direct;
  std::vector<double> scaled;
  double exponent = 0.0;
  KsResult ks;
};

ScalingSamples scaling_samples(const ExperimentConfig& cfg);

// Replica sampler for the scalar functional `target` (eta, gamma, zeta, spectral, potential)
// on [0, cfg.t]. With Lane::Path the replica uses the Path / PathB / Noise streams; with
// Lane::Scaled it uses Scaled streams 2r and 2r + 1, independent of the former.
Sampler make_sampler(const ExperimentConfig& cfg, const std::string& target, Lane lane = Lane::Path);

struct RunSummary {
  std::filesystem::path out_dir;
  std::vector<std::string> files;
  std::map<std::string, double> results;
};

// Validates the config, runs it and writes manifest.json plus CSV and .dat files into
// out_dir (created if needed). Errors propagate as exceptions.
RunSummary run_experiment(const ExperimentConfig& cfg);

}  // namespace riesz
