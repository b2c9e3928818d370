#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace blocklab {

struct Seed {
  uint64_t master = 0;
  uint64_t stream = 0;
};

// Counter-based generator: the i-th output is a pure function of (key, i), so a
// stream can be split into independent substreams without touching shared state.
// Determinism contract: a value depends only on (master, stream path, draw index),
// never on how many workers consumed sibling streams.
class Rng {
 public:
  explicit Rng(Seed s) : key_(derive(derive(0x6a09e667f3bcc908ull, s.master), s.stream)) {}
  Rng(uint64_t master, uint64_t stream) : Rng(Seed{master, stream}) {}

  Rng split(uint64_t substream) const {
    Rng r(*this);
    r.key_ = derive(key_, substream);
    r.ctr_ = 0;
    return r;
  }

  uint64_t next_u64() { return mix(key_, ctr_++); }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  // (0, 1]; safe under log()
  double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // unbiased integer in [0, bound)
  uint64_t below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    uint64_t threshold = (-bound) % bound;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Exact Poisson sampler. Sequential inversion for small means, Hormann's PTRS
  // transformed rejection for large means.
  long long poisson(double mean) {
    if (mean < 0 || !std::isfinite(mean))
      throw std::invalid_argument("Rng::poisson: mean must be finite and nonnegative");
    if (mean == 0) return 0;
    return mean >= 10.0 ? poisson_ptrs(mean) : poisson_inversion(mean);
  }

  // Number of successes in n_trials Bernoulli(p) trials, n_trials allowed to be
  // huge (passed as a real count). Exact via geometric skips; O(successes).
  long long binomial_count(double n_trials, double p) {
    if (p <= 0 || n_trials < 1) return 0;
    if (p >= 1) return static_cast<long long>(n_trials);
    double log1mp = std::log1p(-p);
    double pos = 0;
    long long count = 0;
    for (;;) {
      double skip = std::floor(std::log(uniform_pos()) / log1mp);
      pos += skip + 1;
      if (pos > n_trials) return count;
      ++count;
    }
  }

 private:
  static uint64_t mix(uint64_t key, uint64_t ctr) {
    uint64_t z = key + ctr * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  static uint64_t derive(uint64_t key, uint64_t sub) {
    return mix(mix(key, 0x9f4a7c15632be59bull), sub + 0x2545f4914f6cdd1dull);
  }

  long long poisson_inversion(double mean) {
    double limit = std::exp(-mean);
    double prod = uniform_pos();
    long long k = 0;
    while (prod > limit) {
      prod *= uniform_pos();
      ++k;
    }
    return k;
  }

  // Hormann (1993), transformed rejection with squeeze; exact for mean >= 10.
  long long poisson_ptrs(double mean) {
    double slam = std::sqrt(mean);
    double loglam = std::log(mean);
    double b = 0.931 + 2.53 * slam;
    double a = -0.059 + 0.02483 * b;
    double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      double u = uniform() - 0.5;
      double v = uniform_pos();
      double us = 0.5 - std::fabs(u);
      double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= vr) return static_cast<long long>(kf);
      if (kf < 0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
          kf * loglam - mean - std::lgamma(kf + 1.0))
        return static_cast<long long>(kf);
    }
  }

  uint64_t key_;
  uint64_t ctr_ = 0;
};

}  // namespace blocklab
