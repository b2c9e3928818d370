#include "blocklab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "blocklab/limit_law.hpp"
#include "blocklab/parallel.hpp"
#include "blocklab/sampler.hpp"
#include "blocklab/spectral.hpp"

namespace blocklab {

int default_kn(long n) {
  if (n < 3) return 3;
  double ll = std::log(std::log(static_cast<double>(n)));
  int k = static_cast<int>(std::ceil(ll)) + 3;
  return std::max(3, k);
}

double test_statistic(const CycleCensus& census, const std::vector<double>& alphas_by_l, int k) {
  int lmin = 2 + (k == 2 ? 1 : 0);
  double logt = 0;
  for (int l = lmin; l <= census.K && l < static_cast<int>(alphas_by_l.size()); ++l) {
    long long x = census.hyper_at(l);
    if (x > 0) logt += x * std::log1p(alphas_by_l[l]);
  }
  return std::exp(logt);
}

double test_statistic(const FactorGraph& g, const std::vector<double>& alphas_by_l, int K_n) {
  if (!g.simple_flag && !is_simple(g))
    throw std::invalid_argument("test_statistic: graph is not simple");
  FactorGraph gs = g;
  gs.simple_flag = true;
  return test_statistic(count_hyper_cycles(gs, K_n), alphas_by_l, g.k);
}

Calibration calibrate_from_values(std::vector<double> values, double alpha) {
  Calibration out;
  long N = static_cast<long>(values.size());
  if (N == 0) throw std::invalid_argument("calibrate: empty sample");
  if (!(alpha > 0) || alpha > 1) throw std::invalid_argument("calibrate: alpha in (0,1]");
  std::sort(values.begin(), values.end(), std::greater<double>());
  if (alpha >= 1.0) {
    out.always_reject = true;
    out.c = values.back() - 1.0;
    return out;
  }
  if (values.front() == values.back()) {
    out.conservative = true;
    out.c = values.front();
    out.warning = "degenerate null sample (all T equal): conservative never-reject test";
    return out;
  }
  long r = static_cast<long>(std::floor(alpha * N));
  if (r >= N) r = N - 1;
  if (r < 1) {
    out.conservative = true;
    out.c = values.front();
    out.warning = "alpha * N < 1: not enough null samples, conservative never-reject test";
    return out;
  }
  double c = values[r - 1];  // r-th largest
  long gt = 0, ge = 0;
  for (double v : values) {
    if (v > c) ++gt;
    if (v >= c) ++ge;
  }
  out.c = c;
  long eq = ge - gt;
  if (eq > 0) out.randomize_prob = (alpha - static_cast<double>(gt) / N) / (static_cast<double>(eq) / N);
  out.randomize_prob = std::clamp(out.randomize_prob, 0.0, 1.0);
  return out;
}

namespace {

std::vector<double> null_statistics(const HsbmSpec& h, long n, int K_n,
                                    const std::vector<double>& alphas, long samples, Seed seed,
                                    uint64_t stream, int workers) {
  std::vector<double> vals(samples);
  parallel_for(samples, workers, [&](long i) {
    Rng rng = Rng(seed).split(stream).split(static_cast<uint64_t>(i));
    FactorGraph g = sample_er_hypergraph(n, h.d, h.k, rng);
    vals[i] = test_statistic(count_hyper_cycles(g, K_n), alphas, h.k);
  });
  return vals;
}

}  // namespace

Calibration calibrate(const HsbmSpec& h, long n, double alpha, int K_n, long null_samples,
                      Seed seed, int workers) {
  auto alphas = hsbm_alphas(h, K_n);
  return calibrate_from_values(null_statistics(h, n, K_n, alphas, null_samples, seed, 1, workers),
                               alpha);
}

TestReport power_experiment(const HsbmSpec& h, long n, double alpha, int K_n, long calib_samples,
                            long eval_samples, Seed seed, int workers, bool randomized) {
  TestReport rep;
  rep.alpha = alpha;
  rep.n = n;
  rep.K_n = K_n;
  rep.calib_samples = calib_samples;
  rep.eval_samples = eval_samples;
  rep.seed = seed;
  rep.randomized = randomized;

  auto alphas = hsbm_alphas(h, K_n);
  Calibration cal = calibrate_from_values(
      null_statistics(h, n, K_n, alphas, calib_samples, seed, 1, workers), alpha);
  rep.c_threshold = cal.c;
  rep.randomize_prob = cal.randomize_prob;
  rep.warning = cal.warning;

  auto reject_rate = [&](const std::vector<double>& vals, uint64_t gamma_stream) {
    Rng grng = Rng(seed).split(gamma_stream);
    long cnt = 0;
    for (double v : vals) {
      bool rej;
      if (cal.always_reject)
        rej = true;
      else if (cal.conservative)
        rej = false;
      else if (v > cal.c)
        rej = true;
      else if (randomized && v == cal.c)
        rej = grng.uniform() < cal.randomize_prob;
      else
        rej = false;
      if (rej) ++cnt;
    }
    return static_cast<double>(cnt) / vals.size();
  };

  // disjoint seed streams: 1 calibration, 2 size, 3 power
  rep.empirical_size =
      reject_rate(null_statistics(h, n, K_n, alphas, eval_samples, seed, 2, workers), 0xE51ull);

  std::vector<double> pvals(eval_samples);
  parallel_for(eval_samples, workers, [&](long i) {
    Rng rng = Rng(seed).split(3).split(static_cast<uint64_t>(i));
    auto [sigma, g] = sample_hsbm(h, n, rng);
    pvals[i] = test_statistic(count_hyper_cycles(g, K_n), alphas, h.k);
  });
  rep.empirical_power = reject_rate(pvals, 0xE52ull);

  LimitLawConfig cfg = make_limit_law(h);
  if (!cfg.divergent) {
    try {
      PowerEstimate pe = optimal_power(cfg, alpha, 200000, seed_for_sample(seed, 4), workers);
      rep.beta_star_reference = pe.beta_null_weighted;
      rep.beta_star_lo = pe.ci_lo;
      rep.beta_star_hi = pe.ci_hi;
      rep.beta_star_planted = pe.beta_planted;
    } catch (const std::exception& e) {
      rep.beta_star_reference = std::nan("");
      rep.warning += std::string(rep.warning.empty() ? "" : "; ") + e.what();
    }
  } else {
    rep.beta_star_reference = std::nan("");
    if (cfg.divergent)
      rep.warning += std::string(rep.warning.empty() ? "" : "; ") +
                     "limit law divergent above the detection threshold: no power reference";
  }
  return rep;
}

ProbeReport weak_recovery_probe(const ModelSpec& spec, long n, long samples, Seed seed,
                                OracleBudget b, int workers) {
  ProbeReport rep;
  rep.d = spec.d;
  rep.n = n;
  rep.samples = samples;
  int q = spec.q;
  if (std::pow(static_cast<double>(q), static_cast<double>(n)) > static_cast<double>(b.max_states))
    throw std::invalid_argument("weak_recovery_probe: q^n exceeds the oracle budget");

  struct Cell {
    double dev = 0, a = 0, base = 0, tp = 0;
  };
  std::vector<Cell> cells(samples);
  parallel_for(samples, workers, [&](long i) {
    Rng rng = Rng(seed).split(static_cast<uint64_t>(i));
    auto [sigma, g] = sample_poisson_planted(spec, n, rng);
    PosteriorTable t = exact_posterior(spec, g, b);
    cells[i].dev =
        posterior_overlap_expectation(spec, g, b, seed_for_sample(seed, 0xAA000000ull + i));

    // argmax-marginal estimator with random tie-breaking, marginals pinned on
    // vertex 0 having label 0: plain marginals are identically pi for label-
    // symmetric models, the pinned conditional is the informative variant
    std::vector<double> marg(static_cast<size_t>(n) * q, 0.0);
    double pinned_mass = 0;
    for (size_t s = 0; s < t.mass.size(); ++s)
      if (t.mass[s] > 0 && t.label(static_cast<long>(s), 0) == 0) pinned_mass += t.mass[s];
    for (size_t s = 0; s < t.mass.size(); ++s) {
      if (t.mass[s] == 0) continue;
      if (pinned_mass > 0 && t.label(static_cast<long>(s), 0) != 0) continue;
      for (long v = 0; v < n; ++v)
        marg[static_cast<size_t>(v) * q + t.label(static_cast<long>(s), v)] += t.mass[s];
    }
    CommunityAssignment est(n);
    for (long v = 0; v < n; ++v) {
      double best = -1;
      int arg = 0, ties = 0;
      for (int c = 0; c < q; ++c) {
        double r = marg[static_cast<size_t>(v) * q + c] / spec.pi[c];
        if (r > best + 1e-12) {
          best = r;
          arg = c;
          ties = 1;
        } else if (r > best - 1e-12) {
          ++ties;
          if (rng.below(ties) == 0) arg = c;
        }
      }
      est[v] = arg;
    }
    cells[i].a = overlap_A(est, sigma, q);

    CommunityAssignment indep(n);
    for (long v = 0; v < n; ++v) {
      double u = rng.uniform(), acc = 0;
      int c = q - 1;
      for (int j = 0; j < q; ++j) {
        acc += spec.pi[j];
        if (u < acc) {
          c = j;
          break;
        }
      }
      indep[v] = c;
    }
    cells[i].base = overlap_A(indep, sigma, q);

    double tp = 0;
    long pairs = 0;
    for (long u = 0; u < n; ++u)
      for (long v = u + 1; v < n; ++v) {
        Eigen::MatrixXd m2 = two_point_from_table(t, u, v);
        double l1 = 0;
        for (int a2 = 0; a2 < q; ++a2)
          for (int b2 = 0; b2 < q; ++b2) l1 += std::fabs(m2(a2, b2) - spec.pi[a2] * spec.pi[b2]);
        tp += 0.5 * l1;
        ++pairs;
      }
    cells[i].tp = tp / pairs;
  });

  auto mean_se = [&](auto get, double& mean, double& se) {
    mean = 0;
    for (auto& c : cells) mean += get(c);
    mean /= samples;
    double var = 0;
    for (auto& c : cells) {
      double d2 = get(c) - mean;
      var += d2 * d2;
    }
    var = samples > 1 ? var / (samples - 1) : 0;
    se = std::sqrt(var / samples);
  };
  mean_se([](const Cell& c) { return c.dev; }, rep.overlap_dev, rep.overlap_dev_se);
  mean_se([](const Cell& c) { return c.a; }, rep.estimator_A, rep.estimator_A_se);
  mean_se([](const Cell& c) { return c.base; }, rep.baseline_A, rep.baseline_A_se);
  mean_se([](const Cell& c) { return c.tp; }, rep.two_point_dev, rep.two_point_dev_se);
  return rep;
}

}  // namespace blocklab
