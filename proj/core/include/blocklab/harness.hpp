#pragma once

#include <string>
#include <vector>

#include "blocklab/cycles.hpp"
#include "blocklab/model.hpp"
#include "blocklab/oracle.hpp"
#include "blocklab/rng.hpp"

namespace blocklab {

// K_n = max(3, ceil(log log n) + 3)
int default_kn(long n);

// T_n(G) = prod_{l=lmin}^{K_n} (1 + alpha_l)^{X_l}, lmin = 2 + 1{k=2}; log domain.
// alphas_by_l is indexed by l (entries below lmin ignored). Requires a simple graph.
double test_statistic(const FactorGraph& g, const std::vector<double>& alphas_by_l, int K_n);
double test_statistic(const CycleCensus& census, const std::vector<double>& alphas_by_l, int k);

struct Calibration {
  double c = 0;
  double randomize_prob = 0;  // gamma for exact size at T == c
  bool always_reject = false;  // alpha = 1 sentinel
  bool conservative = false;   // degenerate sample: never reject
  std::string warning;
};

// Smallest C with P_hat(T > C) <= alpha <= P_hat(T >= C): the floor(alpha N)-th
// largest sample value. Requires alpha * N >= 1 for a non-degenerate threshold.
Calibration calibrate_from_values(std::vector<double> values, double alpha);

// Calibrates against ER null draws at the spec's edge density.
Calibration calibrate(const HsbmSpec& h, long n, double alpha, int K_n, long null_samples,
                      Seed seed, int workers = 1);

struct TestReport {
  double alpha = 0;
  double c_threshold = 0;
  double randomize_prob = 0;
  double empirical_size = 0;
  double empirical_power = 0;
  double beta_star_reference = 0;  // limit-law E[L 1{L >= C}]; NaN when divergent
  double beta_star_lo = 0, beta_star_hi = 0;
  double beta_star_planted = 0;  // limit-law planted-quantile estimate
  long n = 0;
  int K_n = 0;
  long calib_samples = 0, eval_samples = 0;
  Seed seed;
  bool randomized = false;
  std::string warning;
};

// Calibrate on fresh ER draws, measure size on disjoint ER draws and power on
// planted HSBM draws; attach the limit-law power reference when it exists.
TestReport power_experiment(const HsbmSpec& h, long n, double alpha, int K_n, long calib_samples,
                            long eval_samples, Seed seed, int workers = 1,
                            bool randomized = false);

struct ProbeReport {
  double d = 0;
  long n = 0;
  long samples = 0;
  double overlap_dev = 0;     // mean over graphs of E<|R - pi pi^T|_1> (posterior pairs)
  double estimator_A = 0;     // mean overlap A(argmax-marginal estimator, sigma*)
  double baseline_A = 0;      // mean overlap A(independent pi-draw, sigma*)
  double two_point_dev = 0;   // mean over vertex pairs of 0.5 |P(su,sv|G) - pi pi^T|_1
  double overlap_dev_se = 0, estimator_A_se = 0, baseline_A_se = 0, two_point_dev_se = 0;
};

// Exact-oracle diagnostics on Poissonized planted draws at small n.
ProbeReport weak_recovery_probe(const ModelSpec& spec, long n, long samples, Seed seed,
                                OracleBudget b = {}, int workers = 1);

}  // namespace blocklab
