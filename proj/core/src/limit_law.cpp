#include "blocklab/limit_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "blocklab/parallel.hpp"
#include "blocklab/spectral.hpp"

namespace blocklab {

LimitLawConfig make_limit_law(double d, int k, const std::vector<double>& alphas_by_l, int lmin,
                              int Lmax) {
  LimitLawConfig cfg;
  cfg.k = k;
  cfg.d = d;
  cfg.lmin = lmin;
  double kd = (k - 1) * d;
  int L = std::min<int>(Lmax, static_cast<int>(alphas_by_l.size()) - 1);
  cfg.alphas.assign(L + 1, 0.0);
  cfg.means.assign(L + 1, 0.0);
  double scale = std::pow(kd, lmin - 1);
  int last = lmin - 1;
  for (int l = lmin; l <= L; ++l) {
    scale *= kd;
    double mean = scale / (2.0 * l);
    double a = alphas_by_l[l];
    cfg.alphas[l] = a;
    cfg.means[l] = mean;
    last = l;
    if (a * a * mean < 1e-12 && l > lmin) break;
  }
  cfg.L = last;
  cfg.alphas.resize(cfg.L + 1);
  cfg.means.resize(cfg.L + 1);
  // divergence when the per-order second-moment mass fails to decay
  if (cfg.L >= lmin + 1) {
    double r = (cfg.alphas[cfg.L] * cfg.alphas[cfg.L] * cfg.means[cfg.L]) /
               std::max(1e-300, cfg.alphas[cfg.L - 1] * cfg.alphas[cfg.L - 1] * cfg.means[cfg.L - 1]);
    cfg.divergent = r >= 1.0 && cfg.alphas[cfg.L] != 0.0;
  }
  return cfg;
}

LimitLawConfig make_limit_law(const HsbmSpec& h, int Lmax) {
  auto alphas = hsbm_alphas(h, Lmax);
  int lmin = 2 + (h.k == 2 ? 1 : 0);
  return make_limit_law(h.d, h.k, alphas, lmin, Lmax);
}

namespace {

double sample_value(const LimitLawConfig& cfg, Rng& rng, bool planted) {
  if (cfg.divergent)
    throw std::invalid_argument("limit law: divergent regime (second moment infinite)");
  double logv = 0;
  for (int l = cfg.lmin; l <= cfg.L; ++l) {
    double a = cfg.alphas[l];
    if (a == 0) continue;
    double mean = planted ? (1.0 + a) * cfg.means[l] : cfg.means[l];
    if (1.0 + a <= 0) {
      // boundary weight: any positive count kills the product
      if (rng.poisson(std::max(0.0, mean)) > 0) return 0.0;
      logv -= a * cfg.means[l];
      continue;
    }
    long long x = rng.poisson(mean);
    logv += x * std::log1p(a) - a * cfg.means[l];
  }
  return std::exp(logv);
}

}  // namespace

LimitLawSample sample_L_infinity(const LimitLawConfig& cfg, Rng& rng) {
  return {sample_value(cfg, rng, false), cfg.L, false};
}

LimitLawSample sample_L_star_infinity(const LimitLawConfig& cfg, Rng& rng) {
  return {sample_value(cfg, rng, true), cfg.L, true};
}

double second_moment_reference(const LimitLawConfig& cfg) {
  double acc = 0;
  for (int l = cfg.lmin; l <= cfg.L; ++l) acc += cfg.alphas[l] * cfg.alphas[l] * cfg.means[l];
  return std::exp(acc);
}

double quantile_type7(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (p <= 0) return sorted.front();
  if (p >= 1) return sorted.back();
  double h = (sorted.size() - 1) * p;
  size_t lo = static_cast<size_t>(std::floor(h));
  double frac = h - lo;
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] * (1 - frac) + sorted[lo + 1] * frac;
}

PowerEstimate optimal_power(const LimitLawConfig& cfg, double alpha_level, long samples, Seed seed,
                            int workers) {
  if (!(alpha_level > 0) || !(alpha_level < 1))
    throw std::invalid_argument("optimal_power: alpha in (0,1)");
  if (samples < 100) throw std::invalid_argument("optimal_power: too few samples");

  PowerEstimate out;
  out.samples = samples;
  out.atomic_regime = cfg.d < 1.0 / (cfg.k - 1);

  std::vector<double> null_vals(samples), planted_vals(samples);
  parallel_for(samples, workers, [&](long i) {
    Rng r0 = Rng(seed).split(2 * static_cast<uint64_t>(i));
    Rng r1 = Rng(seed).split(2 * static_cast<uint64_t>(i) + 1);
    null_vals[i] = sample_value(cfg, r0, false);
    planted_vals[i] = sample_value(cfg, r1, true);
  });

  std::vector<double> sorted = null_vals;
  std::sort(sorted.begin(), sorted.end());
  double c = quantile_type7(sorted, 1.0 - alpha_level);
  out.c_alpha = c;

  auto beta1 = [&](const std::vector<double>& nv) {
    double acc = 0;
    for (double v : nv)
      if (v >= c) acc += v;
    return acc / nv.size();
  };
  auto beta2 = [&](const std::vector<double>& pv) {
    long cnt = 0;
    for (double v : pv)
      if (v >= c) ++cnt;
    return static_cast<double>(cnt) / pv.size();
  };
  out.beta_null_weighted = beta1(null_vals);
  out.beta_planted = beta2(planted_vals);

  // percentile bootstrap, 200 resamples
  Rng brng = Rng(seed).split(0xB007ull);
  std::vector<double> b1(200), b2(200), tmp(samples);
  for (int rep = 0; rep < 200; ++rep) {
    for (long i = 0; i < samples; ++i) tmp[i] = null_vals[brng.below(samples)];
    b1[rep] = beta1(tmp);
    for (long i = 0; i < samples; ++i) tmp[i] = planted_vals[brng.below(samples)];
    b2[rep] = beta2(tmp);
  }
  std::sort(b1.begin(), b1.end());
  std::sort(b2.begin(), b2.end());
  out.ci_lo = b1[4];
  out.ci_hi = b1[194];
  out.ci2_lo = b2[4];
  out.ci2_hi = b2[194];

  if (out.atomic_regime) {
    // leading support atoms: small count vectors on the truncated range
    int span = std::min(cfg.L, cfg.lmin + 3);
    double base = 0;
    for (int l = cfg.lmin; l <= cfg.L; ++l) base -= cfg.alphas[l] * cfg.means[l];
    std::vector<double> atoms;
    std::vector<int> x(span - cfg.lmin + 1, 0);
    // enumerate counts up to 3 per order
    long combos = 1;
    for (size_t i = 0; i < x.size(); ++i) combos *= 4;
    for (long code = 0; code < combos; ++code) {
      long rest = code;
      double logv = base;
      for (size_t i = 0; i < x.size(); ++i) {
        int xi = static_cast<int>(rest % 4);
        rest /= 4;
        logv += xi * std::log1p(cfg.alphas[cfg.lmin + static_cast<int>(i)]);
      }
      atoms.push_back(std::exp(logv));
    }
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end(),
                            [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
                atoms.end());
    if (atoms.size() > 16) atoms.resize(16);
    out.support_head = atoms;
  }
  return out;
}

}  // namespace blocklab
