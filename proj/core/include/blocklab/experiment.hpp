#pragma once

#include <string>
#include <vector>

#include "blocklab/io.hpp"
#include "blocklab/rng.hpp"

#include "json.hpp"

namespace blocklab {

struct ExperimentConfig {
  std::string operation;  // thresholds | cycles | power | cycle-test | equiv-probe
  LoadedSpec model;
  std::vector<long> n_grid;
  std::vector<double> d_grid;      // optional d override grid (empty: spec's d)
  std::vector<double> alpha_grid;  // optional (empty: {0.05})
  long samples = 200;
  long calib_samples = 200;
  long eval_samples = 200;
  int kn = 0;  // 0: default K_n rule
  Seed seed;
  std::string out_dir;
  int workers = 0;
};

ExperimentConfig load_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config_file(const std::string& path);

struct ExperimentResult {
  std::string config_digest;       // FNV-1a over the canonical config JSON
  nlohmann::json records;          // array, one entry per grid cell (seed included)
  nlohmann::json metadata;         // timestamps, version; kept out of the records
  long failed_cells = 0;
};

ExperimentResult run(const ExperimentConfig& cfg);

// Writes records + metadata JSON into cfg.out_dir (timestamped file name);
// returns the path.
std::string persist(const ExperimentConfig& cfg, const ExperimentResult& res);

// kinds: power-curve (d, power, ci_lo, ci_hi), beta-star (alpha, beta_star,
// ci_lo, ci_hi), cycle-check (ell, empirical_mean, predicted_mean).
std::string emit_plot_data(const ExperimentResult& res, const std::string& kind);

}  // namespace blocklab
