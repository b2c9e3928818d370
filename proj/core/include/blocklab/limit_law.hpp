#pragma once

#include <vector>

#include "blocklab/model.hpp"
#include "blocklab/rng.hpp"

namespace blocklab {

struct LimitLawConfig {
  std::vector<double> alphas;  // alphas[l], index l in [lmin, L]
  std::vector<double> means;   // means[l] = ((k-1) d)^l / (2l)
  int lmin = 3;
  int L = 3;
  int k = 2;
  double d = 0;
  bool divergent = false;  // (k-1) d max|alpha-driving eig| >= 1; sampling refused
};

// lmin = 2 + 1{k=2}; truncation at Lmax or the first l with alpha_l^2 mean_l < 1e-12.
LimitLawConfig make_limit_law(const HsbmSpec& h, int Lmax = 64);
LimitLawConfig make_limit_law(double d, int k, const std::vector<double>& alphas_by_l,
                              int lmin, int Lmax = 64);

struct LimitLawSample {
  double value = 1;
  int L = 0;
  bool planted = false;
};

// L = prod_{l in range} (1 + alpha_l)^{X_l} exp(-alpha_l mean_l), X_l ~ Poisson
// with mean mean_l (null) or (1+alpha_l) mean_l (planted).
LimitLawSample sample_L_infinity(const LimitLawConfig& cfg, Rng& rng);
LimitLawSample sample_L_star_infinity(const LimitLawConfig& cfg, Rng& rng);

// exp(sum alpha_l^2 mean_l) over the configured range: exact E[L_infinity^2].
double second_moment_reference(const LimitLawConfig& cfg);

struct PowerEstimate {
  double c_alpha = 0;
  double beta_null_weighted = 0;  // E[L 1{L >= C}] over null draws
  double beta_planted = 0;        // P(L* >= C) over planted draws
  double ci_lo = 0, ci_hi = 0;    // bootstrap CI for beta_null_weighted
  double ci2_lo = 0, ci2_hi = 0;  // bootstrap CI for beta_planted
  long samples = 0;
  bool atomic_regime = false;  // d < 1/(k-1)
  std::vector<double> support_head;  // leading support atoms in the atomic regime
};

PowerEstimate optimal_power(const LimitLawConfig& cfg, double alpha_level, long samples, Seed seed,
                            int workers = 1);

// type-7 quantile of a sorted sample
double quantile_type7(const std::vector<double>& sorted, double p);

}  // namespace blocklab
