#include <map>

#include "doctest.h"

#include "blocklab/sampler.hpp"
#include "helpers.hpp"

using namespace blocklab;

namespace {

// two symmetric tables, so the prior is closed under coordinate permutations
ModelSpec two_weight_spec() {
  ModelSpec s;
  s.k = 2;
  s.q = 2;
  s.pi = {0.5, 0.5};
  s.d = 2.0;
  WeightFunction p1{0, 2, 2, {2, 1, 1, 2}};
  WeightFunction p2{1, 2, 2, {1, 1, 1, 1}};
  s.weights.psis = {p1, p2};
  s.weights.probs = {0.3, 0.7};
  s.validate();
  return s;
}

}  // namespace

TEST_CASE("null sampler: clause count, uniform tuples, prior marginal") {
  ModelSpec spec = two_weight_spec();
  Rng rng(Seed{11, 0});
  long n = 50, m = 40000;
  FactorGraph g = sample_null(spec, n, m, rng);
  CHECK(g.m() == m);

  std::vector<long> vfreq(n, 0);
  long w0 = 0;
  for (const auto& cl : g.clauses) {
    for (int v : cl.vars) ++vfreq[v];
    w0 += cl.wid == 0;
  }
  double e = 2.0 * m / n;
  double chi2 = 0;
  for (long c : vfreq) chi2 += (c - e) * (c - e) / e;
  CHECK(chi2 < 49 + 4 * std::sqrt(2.0 * 49));  // ~4 sigma for 49 dof
  double p0 = static_cast<double>(w0) / m;
  CHECK(std::fabs(p0 - 0.3) < 4 * std::sqrt(0.3 * 0.7 / m));
}

TEST_CASE("planted clause law: probability proportional to psi(sigma_tuple)") {
  ModelSpec spec = testutil::sbm51_factor();  // point mass, table diag 5 / off 1
  CommunityAssignment sigma{0, 1, 1};
  Rng rng(Seed{12, 0});
  long draws = 40000;
  std::map<std::pair<int, int>, long> counts;
  for (long i = 0; i < draws; ++i) {
    FactorGraph g = sample_planted_given(spec, sigma, 1, rng);
    counts[{g.clauses[0].vars[0], g.clauses[0].vars[1]}]++;
  }
  // expected weights: 5 when sigma_u == sigma_v (5 ordered pairs), 1 otherwise
  // (4 ordered pairs); total 29
  double chi2 = 0;
  for (int u = 0; u < 3; ++u)
    for (int v = 0; v < 3; ++v) {
      double w = sigma[u] == sigma[v] ? 5.0 : 1.0;
      double e = draws * w / 29.0;
      double c = static_cast<double>(counts[{u, v}]);
      chi2 += (c - e) * (c - e) / e;
    }
  CHECK(chi2 < 26.1);  // chi-square_8 99.9% quantile
}

TEST_CASE("planted assignment marginal follows pi") {
  ModelSpec spec = testutil::sbm32_factor();
  Rng rng(Seed{13, 0});
  long n = 2000, ones = 0;
  auto [sigma, g] = sample_planted(spec, n, 10, rng);
  (void)g;
  for (int c : sigma) ones += c;
  CHECK(std::fabs(ones / static_cast<double>(n) - 0.5) < 4 * std::sqrt(0.25 / n));
}

TEST_CASE("poissonized clause count has mean d n / k") {
  ModelSpec spec = testutil::sbm51_factor();
  Rng rng(Seed{14, 0});
  long n = 200, reps = 3000;
  std::vector<double> ms(reps);
  for (long i = 0; i < reps; ++i) {
    Rng r = rng.split(i);
    ms[i] = static_cast<double>(sample_poisson_null(spec, n, r).m());
  }
  auto mo = testutil::moments(ms);
  double want = spec.d * n / spec.k;  // 300
  CHECK(std::fabs(mo.mean - want) < 4 * mo.se);
  CHECK(mo.var == doctest::Approx(want).epsilon(0.15));
}

TEST_CASE("HSBM sampler: simple by construction, edge count matches density") {
  HsbmSpec h = testutil::sbm51();
  long n = 60, reps = 2000;
  std::vector<double> ms(reps);
  Rng base(Seed{15, 0});
  for (long i = 0; i < reps; ++i) {
    Rng r = base.split(i);
    auto [sigma, g] = sample_hsbm(h, n, r);
    CHECK(g.simple_flag);
    CHECK(is_simple(g));
    CHECK(static_cast<long>(sigma.size()) == n);
    ms[i] = static_cast<double>(g.m());
  }
  auto mo = testutil::moments(ms);
  // per-pair probability d M0 / C(n, k-1): E m = C(n,2) d / n = d (n-1) / 2
  CHECK(std::fabs(mo.mean - h.d * (n - 1) / 2.0) < 4 * mo.se);
}

TEST_CASE("HSBM within/between class edge ratio reflects the tensor") {
  HsbmSpec h = testutil::sbm51();
  long n = 400;
  Rng rng(Seed{16, 0});
  double within = 0, between = 0, wp = 0, bp = 0;
  for (int rep = 0; rep < 60; ++rep) {
    Rng r = rng.split(rep);
    auto [sigma, g] = sample_hsbm(h, n, r);
    long c0 = 0;
    for (int c : sigma) c0 += c == 0;
    long c1 = n - c0;
    wp += c0 * (c0 - 1) / 2.0 + c1 * (c1 - 1) / 2.0;
    bp += static_cast<double>(c0) * c1;
    for (const auto& cl : g.clauses) {
      if (sigma[cl.vars[0]] == sigma[cl.vars[1]])
        ++within;
      else
        ++between;
    }
  }
  // P(edge | same class) / P(edge | diff class) = a / b = 5
  double ratio = (within / wp) / (between / bp);
  CHECK(ratio == doctest::Approx(5.0).epsilon(0.15));
}

TEST_CASE("k=3 HSBM sampler produces valid simple 3-uniform graphs") {
  HsbmSpec h = symmetric_sbm(2, 5, 1, 3);
  Rng rng(Seed{17, 0});
  auto [sigma, g] = sample_hsbm(h, 80, rng);
  (void)sigma;
  CHECK(g.k == 3);
  CHECK(is_simple(g));
  // mean edges d n / k = 2*80/3; single draw, just sanity-range
  CHECK(g.m() > 10);
  CHECK(g.m() < 150);
}

TEST_CASE("conditioning on simplicity: acceptance rate near exp(-d/2 - d^2/4)") {
  ModelSpec spec = testutil::sbm51_factor();  // d = 3
  long n = 600, reps = 200;
  std::vector<double> attempts(reps);
  Rng base(Seed{18, 0});
  for (long i = 0; i < reps; ++i) {
    Rng r = base.split(i);
    ConditionedSample cs = condition_simple(spec, n, r, false);
    CHECK(cs.graph.simple_flag);
    CHECK(is_simple(cs.graph));
    attempts[i] = static_cast<double>(cs.attempts);
  }
  auto mo = testutil::moments(attempts);
  double want = std::exp(3.0 / 2.0 + 9.0 / 4.0);  // 1 / acceptance probability
  CHECK(std::fabs(mo.mean - want) < 5 * mo.se + 0.05 * want);
}

TEST_CASE("gamma resampling: gamma = 0 is identity, m always preserved") {
  ModelSpec spec = testutil::sbm51_factor();
  Rng rng(Seed{19, 0});
  FactorGraph g = sample_poisson_null(spec, 100, rng);
  FactorGraph same = gamma_resample(g, spec, 0.0, rng);
  REQUIRE(same.m() == g.m());
  for (long i = 0; i < g.m(); ++i) CHECK(same.clauses[i].vars == g.clauses[i].vars);

  FactorGraph mixed = gamma_resample(g, spec, 0.5, rng);
  CHECK(mixed.m() == g.m());
  long changed = 0;
  for (long i = 0; i < g.m(); ++i) changed += mixed.clauses[i].vars != g.clauses[i].vars;
  CHECK(changed > 0);
}

TEST_CASE("thinning keeps each clause independently") {
  ModelSpec spec = testutil::sbm51_factor();
  Rng rng(Seed{20, 0});
  FactorGraph g = sample_null(spec, 100, 5000, rng);
  std::vector<double> kept(300);
  for (int i = 0; i < 300; ++i) {
    Rng r = rng.split(i);
    kept[i] = static_cast<double>(thin_clauses(g, 0.3, r).m());
  }
  auto mo = testutil::moments(kept);
  CHECK(std::fabs(mo.mean - 1500.0) < 4 * mo.se);
  CHECK(mo.var == doctest::Approx(5000 * 0.3 * 0.7).epsilon(0.2));
}

TEST_CASE("seed_for_sample is deterministic and index-sensitive") {
  Seed base{100, 5};
  Seed s1 = seed_for_sample(base, 0);
  Seed s2 = seed_for_sample(base, 0);
  Seed s3 = seed_for_sample(base, 1);
  CHECK(s1.master == s2.master);
  CHECK(s1.stream == s2.stream);
  CHECK((s1.master != s3.master || s1.stream != s3.stream));
}
