#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riesz/config.hpp"
#include "riesz/error.hpp"
#include "riesz/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"riesz_lab: Monte Carlo lab for Riesz potentials of stable self-intersection measures"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  std::string config_path;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
  int jobs = -1;
  std::string out;
  std::vector<std::string> sets;
  run->add_option("config_pos", config_path, "config file")->check(CLI::ExistingFile);
  run->add_option("--config,-c", config_path, "config file")->check(CLI::ExistingFile);
  run->add_option("--replicas,-n", replicas, "number of replicas");
  run->add_option("--seed,-s", seed, "base seed");
  run->add_option("--jobs,-j", jobs, "worker threads (0: OpenMP default)");
  run->add_option("--out,-o", out, "output directory");
  run->add_option("--set", sets, "override a config key, key=value")->take_all();

  auto* keys = app.add_subcommand("keys", "list config keys with their defaults");
  auto* show = app.add_subcommand("show", "print the effective config after overrides");
  show->add_option("config", config_path, "config file")->check(CLI::ExistingFile);
  show->add_option("--set", sets, "override a config key, key=value")->take_all();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*keys) {
      std::cout << riesz::serialize(riesz::ExperimentConfig{});
      return 0;
    }
    riesz::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = riesz::load_config(config_path);
    for (const auto& s : sets) riesz::apply_override(cfg, s);
    if (run->count("--replicas")) cfg.replicas = replicas;
    if (run->count("--seed")) cfg.seed = seed;
    if (run->count("--jobs")) cfg.jobs = jobs;
    if (run->count("--out")) cfg.out = out;
    if (*show) {
      cfg.validate();
      std::cout << riesz::serialize(cfg);
      return 0;
    }
    if (config_path.empty()) throw riesz::ParameterError("run needs a config file");
    const auto summary = riesz::run_experiment(cfg);
    std::cout << riesz::kind_name(cfg.kind) << ": wrote";
    for (const auto& f : summary.files) std::cout << ' ' << f;
    std::cout << " to " << summary.out_dir.string() << '\n';
    for (const auto& [k, v] : summary.results) std::printf("  %-24s %.10g\n", k.c_str(), v);
    return 0;
  } catch (const riesz::RegimeError& e) {
    std::cerr << "regime error: " << e.what() << '\n';
    return 3;
  } catch (const riesz::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
