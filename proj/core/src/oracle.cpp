#include "blocklab/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "blocklab/parallel.hpp"
#include "blocklab/sampler.hpp"

namespace blocklab {

namespace {

long state_count(int q, long n, long cap) {
  double states = std::pow(static_cast<double>(q), static_cast<double>(n));
  if (states > static_cast<double>(cap))
    throw std::invalid_argument("oracle: q^n exceeds the enumeration budget");
  return static_cast<long>(states + 0.5);
}

struct StreamLse {
  double m = -INFINITY;
  double s = 0;
  void add(double x) {
    if (x == -INFINITY) return;
    if (x > m) {
      s = s * std::exp(m - x) + 1.0;
      m = x;
    } else {
      s += std::exp(x - m);
    }
  }
  double log() const { return m + std::log(s); }
};

struct Evaluator {
  const ModelSpec& spec;
  const FactorGraph& g;
  long n;
  int q, k;
  long m;
  std::vector<double> log_pi;
  std::vector<long> pow_q;  // q^(n-1-v)
  mutable std::unordered_map<uint64_t, double> ebar_cache;

  Evaluator(const ModelSpec& s, const FactorGraph& g_) : spec(s), g(g_) {
    n = g.n;
    q = s.q;
    k = s.k;
    m = g.m();
    if (g.k != k) throw std::invalid_argument("oracle: graph arity does not match the spec");
    for (const auto& cl : g.clauses) {
      if (cl.wid < 0 || cl.wid >= static_cast<int>(s.weights.psis.size()))
        throw std::invalid_argument("oracle: clause weight id out of range");
      for (int v : cl.vars)
        if (v < 0 || v >= n) throw std::invalid_argument("oracle: clause variable out of range");
    }
    log_pi.resize(q);
    for (int i = 0; i < q; ++i) log_pi[i] = std::log(s.pi[i]);
    pow_q.resize(n);
    long p = 1;
    for (long v = n - 1; v >= 0; --v) {
      pow_q[v] = p;
      p *= q;
    }
  }

  void labels_of(long state, std::vector<int>& lab) const {
    for (long v = 0; v < n; ++v) lab[v] = static_cast<int>((state / pow_q[v]) % q);
  }

  // E_{p,u}[psi(sigma_omega)] as a function of the color counts of sigma
  double log_ebar(const std::vector<int>& counts) const {
    uint64_t key = 0;
    for (int i = 0; i < q; ++i) key = key * static_cast<uint64_t>(n + 1) + counts[i];
    auto it = ebar_cache.find(key);
    if (it != ebar_cache.end()) return it->second;
    double total = 0;
    double inv_n = 1.0 / static_cast<double>(n);
    for (size_t w = 0; w < spec.weights.psis.size(); ++w) {
      const auto& tab = spec.weights.psis[w].table;
      double acc = 0;
      for (size_t idx = 0; idx < tab.size(); ++idx) {
        double pr = 1;
        size_t rest = idx;
        for (int s2 = 0; s2 < k; ++s2) {
          pr *= counts[rest % q] * inv_n;
          rest /= q;
        }
        acc += tab[idx] * pr;
      }
      total += spec.weights.probs[w] * acc;
    }
    double lg = std::log(total);
    ebar_cache.emplace(key, lg);
    return lg;
  }

  // log pi(sigma) + log psi_G(sigma) - m log Ebar(sigma)
  double log_term(const std::vector<int>& lab, std::vector<int>& counts,
                  std::vector<int>& colors) const {
    double lp = 0;
    std::fill(counts.begin(), counts.end(), 0);
    for (long v = 0; v < n; ++v) {
      lp += log_pi[lab[v]];
      ++counts[lab[v]];
    }
    for (const auto& cl : g.clauses) {
      for (int s2 = 0; s2 < k; ++s2) colors[s2] = lab[cl.vars[s2]];
      lp += std::log(spec.weights.psis[cl.wid].at(colors.data()));
    }
    lp -= m * log_ebar(counts);
    return lp;
  }
};

}  // namespace

int PosteriorTable::label(long state, long v) const {
  long p = 1;
  for (long i = n - 1; i > v; --i) p *= q;
  return static_cast<int>((state / p) % q);
}

double exact_log_likelihood(const ModelSpec& spec, const FactorGraph& g, OracleBudget b) {
  long states = state_count(spec.q, g.n, b.max_states);
  Evaluator ev(spec, g);
  std::vector<int> lab(g.n), counts(spec.q), colors(spec.k);
  StreamLse lse;
  for (long s = 0; s < states; ++s) {
    ev.labels_of(s, lab);
    lse.add(ev.log_term(lab, counts, colors));
  }
  return lse.log();
}

double exact_likelihood(const ModelSpec& spec, const FactorGraph& g, OracleBudget b) {
  return std::exp(exact_log_likelihood(spec, g, b));
}

PosteriorTable exact_posterior(const ModelSpec& spec, const FactorGraph& g, OracleBudget b) {
  long states = state_count(spec.q, g.n, b.max_states);
  Evaluator ev(spec, g);
  PosteriorTable t;
  t.q = spec.q;
  t.n = g.n;
  t.mass.resize(states);
  std::vector<int> lab(g.n), counts(spec.q), colors(spec.k);
  StreamLse lse;
  for (long s = 0; s < states; ++s) {
    ev.labels_of(s, lab);
    t.mass[s] = ev.log_term(lab, counts, colors);
    lse.add(t.mass[s]);
  }
  t.log_likelihood = lse.log();
  t.likelihood = std::exp(t.log_likelihood);
  for (double& v : t.mass) v = std::exp(v - t.log_likelihood);
  return t;
}

Eigen::MatrixXd two_point_from_table(const PosteriorTable& t, long u, long v) {
  if (u == v) throw std::invalid_argument("two_point: u != v required");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t.q, t.q);
  long pu = 1, pv = 1;
  for (long i = t.n - 1; i > u; --i) pu *= t.q;
  for (long i = t.n - 1; i > v; --i) pv *= t.q;
  for (size_t s = 0; s < t.mass.size(); ++s) {
    int lu = static_cast<int>((s / pu) % t.q);
    int lv = static_cast<int>((s / pv) % t.q);
    out(lu, lv) += t.mass[s];
  }
  return out;
}

Eigen::MatrixXd two_point(const ModelSpec& spec, const FactorGraph& g, long u, long v,
                          OracleBudget b) {
  return two_point_from_table(exact_posterior(spec, g, b), u, v);
}

namespace {

double l1_to_pi_outer(const std::vector<double>& joint, const std::vector<double>& pi, int q) {
  double acc = 0;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) acc += std::fabs(joint[static_cast<size_t>(i) * q + j] - pi[i] * pi[j]);
  return acc;
}

}  // namespace

double posterior_overlap_expectation(const ModelSpec& spec, const FactorGraph& g, OracleBudget b,
                                     Seed seed) {
  PosteriorTable t = exact_posterior(spec, g, b);
  long N = static_cast<long>(t.mass.size());
  long n = g.n;
  int q = spec.q;
  double inv_n = 1.0 / n;

  double pair_ops = static_cast<double>(N) * N * (q == 2 ? 1 : n);
  if (pair_ops <= b.max_pair_ops) {
    if (q == 2 && n <= 62) {
      // states are bitmasks: joint counts via popcount
      uint64_t full = (n == 62) ? ((1ull << 62) - 1) : ((1ull << n) - 1);
      double total = 0;
      for (long s1 = 0; s1 < N; ++s1) {
        double m1 = t.mass[s1];
        if (m1 == 0) continue;
        uint64_t a = static_cast<uint64_t>(s1);
        for (long s2 = 0; s2 < N; ++s2) {
          uint64_t bmask = static_cast<uint64_t>(s2);
          // label 1 bits: mixed-radix digit order matches bit order up to reversal,
          // which leaves joint counts unchanged
          double n11 = static_cast<double>(__builtin_popcountll(a & bmask));
          double n10 = static_cast<double>(__builtin_popcountll(a & ~bmask & full));
          double n01 = static_cast<double>(__builtin_popcountll(~a & bmask & full));
          double n00 = n - n11 - n10 - n01;
          double dist = std::fabs(n00 * inv_n - spec.pi[0] * spec.pi[0]) +
                        std::fabs(n01 * inv_n - spec.pi[0] * spec.pi[1]) +
                        std::fabs(n10 * inv_n - spec.pi[1] * spec.pi[0]) +
                        std::fabs(n11 * inv_n - spec.pi[1] * spec.pi[1]);
          total += m1 * t.mass[s2] * dist;
        }
      }
      return total;
    }
    std::vector<std::vector<int>> labs(N, std::vector<int>(n));
    Evaluator ev(spec, g);
    for (long s = 0; s < N; ++s) ev.labels_of(s, labs[s]);
    std::vector<double> joint(static_cast<size_t>(q) * q);
    double total = 0;
    for (long s1 = 0; s1 < N; ++s1) {
      if (t.mass[s1] == 0) continue;
      for (long s2 = 0; s2 < N; ++s2) {
        std::fill(joint.begin(), joint.end(), 0.0);
        for (long v = 0; v < n; ++v)
          joint[static_cast<size_t>(labs[s1][v]) * q + labs[s2][v]] += inv_n;
        total += t.mass[s1] * t.mass[s2] * l1_to_pi_outer(joint, spec.pi, q);
      }
    }
    return total;
  }

  // pair sampling from the exact table via CDF inversion
  std::vector<double> cdf(t.mass.size());
  double acc = 0;
  for (size_t s = 0; s < t.mass.size(); ++s) {
    acc += t.mass[s];
    cdf[s] = acc;
  }
  auto draw = [&](Rng& rng) {
    double u = rng.uniform() * acc;
    return static_cast<long>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  };
  Rng rng = Rng(seed).split(0x9A125ull);
  Evaluator ev(spec, g);
  std::vector<int> l1(n), l2(n);
  std::vector<double> joint(static_cast<size_t>(q) * q);
  double total = 0;
  for (long rep = 0; rep < b.pair_samples; ++rep) {
    ev.labels_of(draw(rng), l1);
    ev.labels_of(draw(rng), l2);
    std::fill(joint.begin(), joint.end(), 0.0);
    for (long v = 0; v < n; ++v) joint[static_cast<size_t>(l1[v]) * q + l2[v]] += inv_n;
    total += l1_to_pi_outer(joint, spec.pi, q);
  }
  return total / b.pair_samples;
}

MutualInfoReport mutual_information_terms(const ModelSpec& spec, long n, long samples, Seed seed,
                                          OracleBudget b, int workers) {
  state_count(spec.q, n, b.max_states);
  MutualInfoReport out;
  out.samples = samples;
  std::vector<double> vals(samples);
  parallel_for(samples, workers, [&](long i) {
    Rng rng = Rng(seed).split(static_cast<uint64_t>(i));
    auto [sigma, g] = sample_poisson_planted(spec, n, rng);
    vals[i] = exact_log_likelihood(spec, g, b);
  });
  double mean = 0;
  for (double v : vals) mean += v;
  mean /= samples;
  double var = 0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var = samples > 1 ? var / (samples - 1) : 0;
  out.e_logL = mean;
  out.e_logL_se = std::sqrt(var / samples);

  // (d/k) E_{p,pi}[(psi/xi) log(psi/xi)]
  double xi = spec.xi();
  double acc = 0;
  for (size_t w = 0; w < spec.weights.psis.size(); ++w) {
    const auto& tab = spec.weights.psis[w].table;
    for (size_t idx = 0; idx < tab.size(); ++idx) {
      double pr = 1;
      size_t rest = idx;
      for (int s2 = 0; s2 < spec.k; ++s2) {
        pr *= spec.pi[rest % spec.q];
        rest /= spec.q;
      }
      double ratio = tab[idx] / xi;
      acc += spec.weights.probs[w] * pr * ratio * std::log(ratio);
    }
  }
  out.single_letter = spec.d / spec.k * acc;
  out.i_estimate = -out.e_logL / n + out.single_letter;
  return out;
}

double hsbm_single_letter(const HsbmSpec& h) {
  double acc = 0;
  for (size_t idx = 0; idx < h.m0.size(); ++idx) {
    double pr = 1;
    size_t rest = idx;
    for (int s2 = 0; s2 < h.k; ++s2) {
      pr *= h.pi[rest % h.q];
      rest /= h.q;
    }
    acc += pr * h.m0[idx] * std::log(h.m0[idx]);
  }
  return h.d / h.k * acc;
}

double free_energy_derivative_functional(const ModelSpec& spec, const FactorGraph& g,
                                         OracleBudget b) {
  PosteriorTable t = exact_posterior(spec, g, b);
  Evaluator ev(spec, g);
  long N = static_cast<long>(t.mass.size());
  long n = g.n;
  int k = spec.k, q = spec.q;

  // precompute labels and per-state Ebar
  std::vector<std::vector<int>> labs(N, std::vector<int>(n));
  std::vector<double> inv_ebar(N);
  std::vector<int> counts(q);
  for (long s = 0; s < N; ++s) {
    ev.labels_of(s, labs[s]);
    std::fill(counts.begin(), counts.end(), 0);
    for (long v = 0; v < n; ++v) ++counts[labs[s][v]];
    inv_ebar[s] = std::exp(-ev.log_ebar(counts));
  }

  double tuples = std::pow(static_cast<double>(n), k);
  if (static_cast<double>(N) * tuples > b.max_pair_ops)
    throw std::invalid_argument("free_energy_derivative_functional: budget exceeded");
  long ntuples = static_cast<long>(tuples + 0.5);

  double total = 0;
  std::vector<int> omega(k), colors(k);
  for (size_t w = 0; w < spec.weights.psis.size(); ++w) {
    const auto& psi = spec.weights.psis[w];
    double acc = 0;
    for (long code = 0; code < ntuples; ++code) {
      long rest = code;
      for (int s2 = 0; s2 < k; ++s2) {
        omega[s2] = static_cast<int>(rest % n);
        rest /= n;
      }
      double bracket = 0;
      for (long s = 0; s < N; ++s) {
        if (t.mass[s] == 0) continue;
        for (int s2 = 0; s2 < k; ++s2) colors[s2] = labs[s][omega[s2]];
        bracket += t.mass[s] * psi.at(colors.data()) * inv_ebar[s];
      }
      if (bracket > 0) acc += bracket * std::log(bracket);
    }
    total += spec.weights.probs[w] * acc / tuples;
  }
  return total / k;
}

namespace {

double enumerate_configs(const ModelSpec& spec, long n, long m,
                         const std::function<double(const FactorGraph&)>& h, bool planted) {
  int k = spec.k, q = spec.q;
  long nw = static_cast<long>(spec.weights.psis.size());
  double tuples_d = std::pow(static_cast<double>(n), k);
  long tuples = static_cast<long>(tuples_d + 0.5);
  long per_clause = tuples * nw;
  double total_configs = std::pow(static_cast<double>(per_clause), static_cast<double>(m));
  if (total_configs > 2e7) throw std::invalid_argument("enumeration: too many clause configurations");
  long configs = static_cast<long>(total_configs + 0.5);

  FactorGraph g;
  g.n = n;
  g.k = k;
  g.clauses.assign(m, Clause{0, std::vector<int>(k, 0)});

  if (!planted) {
    double base_p = 1.0;
    double acc = 0;
    for (long code = 0; code < configs; ++code) {
      long rest = code;
      double p = base_p;
      for (long a = 0; a < m; ++a) {
        long cc = rest % per_clause;
        rest /= per_clause;
        g.clauses[a].wid = static_cast<int>(cc % nw);
        long t = cc / nw;
        for (int s2 = 0; s2 < k; ++s2) {
          g.clauses[a].vars[s2] = static_cast<int>(t % n);
          t /= n;
        }
        p *= spec.weights.probs[g.clauses[a].wid] / tuples_d;
      }
      g.simple_flag = false;
      acc += p * h(g);
    }
    return acc;
  }

  // planted law: sum over sigma and clause configs with the tilted clause law
  long states = state_count(q, n, 20000000);
  Evaluator dummy_ev(spec, g);
  std::vector<int> lab(n), counts(q), colors(k);
  double acc = 0;
  for (long s = 0; s < states; ++s) {
    dummy_ev.labels_of(s, lab);
    std::fill(counts.begin(), counts.end(), 0);
    double p_sigma = 1;
    for (long v = 0; v < n; ++v) {
      p_sigma *= spec.pi[lab[v]];
      ++counts[lab[v]];
    }
    double ebar = std::exp(dummy_ev.log_ebar(counts));
    for (long code = 0; code < configs; ++code) {
      long rest = code;
      double p = p_sigma;
      for (long a = 0; a < m; ++a) {
        long cc = rest % per_clause;
        rest /= per_clause;
        g.clauses[a].wid = static_cast<int>(cc % nw);
        long t = cc / nw;
        for (int s2 = 0; s2 < k; ++s2) {
          g.clauses[a].vars[s2] = static_cast<int>(t % n);
          t /= n;
        }
        for (int s2 = 0; s2 < k; ++s2) colors[s2] = lab[g.clauses[a].vars[s2]];
        p *= spec.weights.probs[g.clauses[a].wid] *
             spec.weights.psis[g.clauses[a].wid].at(colors.data()) / (tuples_d * ebar);
      }
      g.simple_flag = false;
      acc += p * h(g);
    }
  }
  return acc;
}

}  // namespace

double null_expectation(const ModelSpec& spec, long n, long m,
                        const std::function<double(const FactorGraph&)>& h) {
  return enumerate_configs(spec, n, m, h, false);
}

double planted_expectation(const ModelSpec& spec, long n, long m,
                           const std::function<double(const FactorGraph&)>& h) {
  return enumerate_configs(spec, n, m, h, true);
}

}  // namespace blocklab
