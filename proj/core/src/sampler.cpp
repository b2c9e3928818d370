#include "blocklab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>
#include <vector>

namespace blocklab {

namespace {

CommunityAssignment sample_assignment(const std::vector<double>& pi, long n, Rng& rng) {
  int q = static_cast<int>(pi.size());
  std::vector<double> cdf(q);
  double acc = 0;
  for (int i = 0; i < q; ++i) {
    acc += pi[i];
    cdf[i] = acc;
  }
  CommunityAssignment sigma(n);
  for (long v = 0; v < n; ++v) {
    double u = rng.uniform() * acc;
    int c = 0;
    while (c + 1 < q && u >= cdf[c]) ++c;
    sigma[v] = c;
  }
  return sigma;
}

int sample_weighted(const std::vector<double>& w, double total, Rng& rng) {
  double u = rng.uniform() * total;
  double acc = 0;
  int last = static_cast<int>(w.size()) - 1;
  for (int i = 0; i < last; ++i) {
    acc += w[i];
    if (u < acc) return i;
  }
  return last;
}

}  // namespace

Seed seed_for_sample(Seed base, uint64_t index) {
  return Seed{base.master, base.stream * 0x100000001b3ull + index + 1};
}

FactorGraph sample_null(const ModelSpec& spec, long n, long m, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_null: n >= 1 required");
  FactorGraph g;
  g.n = n;
  g.k = spec.k;
  g.clauses.resize(m);
  int nw = static_cast<int>(spec.weights.psis.size());
  for (long a = 0; a < m; ++a) {
    Clause& cl = g.clauses[a];
    cl.wid = nw == 1 ? 0 : sample_weighted(spec.weights.probs, 1.0, rng);
    cl.vars.resize(spec.k);
    for (int s = 0; s < spec.k; ++s) cl.vars[s] = static_cast<int>(rng.below(n));
  }
  return g;
}

FactorGraph sample_planted_given(const ModelSpec& spec, const CommunityAssignment& sigma, long m,
                                 Rng& rng) {
  long n = static_cast<long>(sigma.size());
  if (n < 1) throw std::invalid_argument("sample_planted_given: empty assignment");
  int q = spec.q, k = spec.k;
  std::vector<double> counts(q, 0.0);
  std::vector<std::vector<int>> members(q);
  for (long v = 0; v < n; ++v) {
    counts[sigma[v]] += 1.0;
    members[sigma[v]].push_back(static_cast<int>(v));
  }

  // W_psi = sum over color tuples of psi(colors) * prod counts[color_s]
  size_t nw = spec.weights.psis.size();
  std::vector<double> wpsi(nw, 0.0);
  double wtotal = 0;
  long tsz = static_cast<long>(spec.weights.psis[0].table.size());
  for (size_t w = 0; w < nw; ++w) {
    const auto& tab = spec.weights.psis[w].table;
    double acc = 0;
    for (long idx = 0; idx < tsz; ++idx) {
      double pr = 1;
      long rest = idx;
      for (int s = k - 1; s >= 0; --s) {
        pr *= counts[rest % q];
        rest /= q;
      }
      acc += tab[idx] * pr;
    }
    wpsi[w] = spec.weights.probs[w] * acc;
    wtotal += wpsi[w];
  }
  if (!(wtotal > 0)) throw std::runtime_error("sample_planted_given: degenerate clause law");

  FactorGraph g;
  g.n = n;
  g.k = k;
  g.clauses.resize(m);

  // suffix color-count products per table block, reused per clause
  std::vector<double> colw(q);
  std::vector<int> colors(k);
  for (long a = 0; a < m; ++a) {
    Clause& cl = g.clauses[a];
    cl.wid = nw == 1 ? 0 : sample_weighted(wpsi, wtotal, rng);
    const auto& tab = spec.weights.psis[cl.wid].table;
    cl.vars.resize(k);
    long prefix = 0;   // table index of the chosen color prefix
    long block = tsz;  // size of the current suffix block
    for (int s = 0; s < k; ++s) {
      block /= q;
      double tot = 0;
      for (int c = 0; c < q; ++c) {
        // S(prefix+c) = sum over suffix completions of psi * prod counts
        double sum = 0;
        long base = prefix + static_cast<long>(c) * block;
        for (long off = 0; off < block; ++off) {
          double pr = 1;
          long rest = off;
          for (int s2 = k - 1; s2 > s; --s2) {
            pr *= counts[rest % q];
            rest /= q;
          }
          sum += tab[base + off] * pr;
        }
        colw[c] = counts[c] * sum;
        tot += colw[c];
      }
      int c = sample_weighted(colw, tot, rng);
      colors[s] = c;
      prefix += static_cast<long>(c) * block;
      // uniform vertex within the class (with repetition across coordinates)
      const auto& cls = members[c];
      cl.vars[s] = cls[rng.below(cls.size())];
    }
  }
  return g;
}

std::pair<CommunityAssignment, FactorGraph> sample_planted(const ModelSpec& spec, long n, long m,
                                                           Rng& rng) {
  CommunityAssignment sigma = sample_assignment(spec.pi, n, rng);
  FactorGraph g = sample_planted_given(spec, sigma, m, rng);
  return {std::move(sigma), std::move(g)};
}

FactorGraph sample_poisson_null(const ModelSpec& spec, long n, Rng& rng) {
  long m = rng.poisson(spec.d * static_cast<double>(n) / spec.k);
  return sample_null(spec, n, m, rng);
}

std::pair<CommunityAssignment, FactorGraph> sample_poisson_planted(const ModelSpec& spec, long n,
                                                                   Rng& rng) {
  long m = rng.poisson(spec.d * static_cast<double>(n) / spec.k);
  return sample_planted(spec, n, m, rng);
}

namespace {

double choose(double n, int r) {
  double acc = 1;
  for (int i = 0; i < r; ++i) acc *= (n - i) / (i + 1);
  return acc;
}

// enumerate multisets of size k over q colors as multiplicity vectors
void enumerate_multisets(int q, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> mult(q, 0);
  // lexicographic recursion unrolled via explicit stack over colors
  std::function<void(int, int)> rec = [&](int color, int remaining) {
    if (color == q - 1) {
      mult[color] = remaining;
      out.push_back(mult);
      return;
    }
    for (int take = remaining; take >= 0; --take) {
      mult[color] = take;
      rec(color + 1, remaining - take);
    }
  };
  rec(0, k);
}

}  // namespace

std::pair<CommunityAssignment, FactorGraph> sample_hsbm(const HsbmSpec& h, long n, Rng& rng) {
  if (n < h.k) throw std::invalid_argument("sample_hsbm: n >= k required");
  double denom = choose(static_cast<double>(n), h.k - 1);
  double pmax = h.d * *std::max_element(h.m0.begin(), h.m0.end()) / denom;
  if (pmax > 1.0) throw std::invalid_argument("sample_hsbm: hyperedge probability exceeds 1");

  CommunityAssignment sigma = sample_assignment(h.pi, n, rng);
  std::vector<std::vector<int>> members(h.q);
  for (long v = 0; v < n; ++v) members[sigma[v]].push_back(static_cast<int>(v));

  FactorGraph g;
  g.n = n;
  g.k = h.k;

  std::vector<std::vector<int>> patterns;
  enumerate_multisets(h.q, h.k, patterns);

  std::vector<int> colors(h.k);
  std::vector<int> picked;
  std::set<int> chosen;
  for (const auto& mult : patterns) {
    // representative color tuple for the symmetric tensor lookup
    int pos = 0;
    for (int c = 0; c < h.q; ++c)
      for (int t = 0; t < mult[c]; ++t) colors[pos++] = c;
    double p = h.d * h.m0[h.index(colors.data())] / denom;
    double total = 1;
    for (int c = 0; c < h.q; ++c) {
      if (mult[c] == 0) continue;
      total *= choose(static_cast<double>(members[c].size()), mult[c]);
    }
    if (total < 1) continue;
    long long t = rng.binomial_count(total, p);
    if (t <= 0) continue;

    // Binomial conditioned on its count is a uniform t-subset of the distinct
    // vertex sets with this color pattern; sample uniformly, reject duplicates.
    std::set<std::vector<int>> seen;
    while (static_cast<long long>(seen.size()) < t) {
      picked.clear();
      for (int c = 0; c < h.q; ++c) {
        int need = mult[c];
        if (need == 0) continue;
        const auto& cls = members[c];
        chosen.clear();
        while (static_cast<int>(chosen.size()) < need)
          chosen.insert(cls[rng.below(cls.size())]);
        picked.insert(picked.end(), chosen.begin(), chosen.end());
      }
      std::sort(picked.begin(), picked.end());
      if (!seen.insert(picked).second) continue;
      Clause cl;
      cl.wid = 0;
      cl.vars = picked;
      g.clauses.push_back(std::move(cl));
    }
  }
  g.simple_flag = true;
  return {std::move(sigma), std::move(g)};
}

FactorGraph sample_er_hypergraph(long n, double d, int k, Rng& rng) {
  HsbmSpec h;
  h.k = k;
  h.q = 2;  // two dummy colors, no tilt
  h.pi = {0.5, 0.5};
  long sz = 1;
  for (int i = 0; i < k; ++i) sz *= 2;
  h.m0.assign(sz, 1.0);
  h.d = d;
  return sample_hsbm(h, n, rng).second;
}

ConditionedSample condition_simple(const ModelSpec& spec, long n, Rng& rng, bool planted,
                                   long budget) {
  ConditionedSample out;
  for (long attempt = 1; attempt <= budget; ++attempt) {
    if (planted) {
      auto [sigma, g] = sample_poisson_planted(spec, n, rng);
      if (is_simple(g)) {
        g.simple_flag = true;
        out.sigma = std::move(sigma);
        out.graph = std::move(g);
        out.attempts = attempt;
        return out;
      }
    } else {
      FactorGraph g = sample_poisson_null(spec, n, rng);
      if (is_simple(g)) {
        g.simple_flag = true;
        out.graph = std::move(g);
        out.attempts = attempt;
        return out;
      }
    }
  }
  throw std::runtime_error("condition_simple: rejection budget exceeded (spec too dense)");
}

FactorGraph gamma_resample(const FactorGraph& g, const ModelSpec& spec, double gamma, Rng& rng) {
  if (gamma < 0 || gamma > 1) throw std::invalid_argument("gamma_resample: gamma in [0,1]");
  FactorGraph out = g;
  out.simple_flag = false;
  int nw = static_cast<int>(spec.weights.psis.size());
  for (auto& cl : out.clauses) {
    if (!rng.bernoulli(gamma)) continue;
    cl.wid = nw == 1 ? 0 : sample_weighted(spec.weights.probs, 1.0, rng);
    for (int s = 0; s < g.k; ++s) cl.vars[s] = static_cast<int>(rng.below(g.n));
  }
  out.simple_flag = is_simple(out);
  return out;
}

FactorGraph thin_clauses(const FactorGraph& g, double keep_prob, Rng& rng) {
  FactorGraph out;
  out.n = g.n;
  out.k = g.k;
  for (const auto& cl : g.clauses)
    if (rng.bernoulli(keep_prob)) out.clauses.push_back(cl);
  out.simple_flag = is_simple(out);
  return out;
}

}  // namespace blocklab
