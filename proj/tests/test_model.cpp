#include <stdexcept>

#include "doctest.h"

#include "blocklab/model.hpp"
#include "blocklab/rng.hpp"
#include "helpers.hpp"

using namespace blocklab;

TEST_CASE("symmetric SBM (a=5, b=1): degree, tensor, validation") {
  HsbmSpec h = testutil::sbm51();
  CHECK(h.d == doctest::Approx(3.0).epsilon(1e-14));
  int c00[2] = {0, 0}, c01[2] = {0, 1};
  CHECK(h.m0[h.index(c00)] == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK(h.m0[h.index(c01)] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(h.degree_balanced());
  CHECK_NOTHROW(h.validate());
  CHECK(sbm_lambda(2, 5, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("k=3 symmetric tensor: degree formula d = (a-b)/q^{k-1} + b") {
  HsbmSpec h = symmetric_sbm(2, 5, 1, 3);
  CHECK(h.d == doctest::Approx(2.0).epsilon(1e-14));  // (5-1)/4 + 1
  CHECK(h.degree_balanced());
}

TEST_CASE("factor form of an HSBM: point mass with xi = d") {
  ModelSpec spec = testutil::sbm51_factor();
  CHECK(spec.weights.psis.size() == 1);
  CHECK(spec.weights.probs[0] == 1.0);
  // xi = E[psi] = d * sum M0 prod pi = d
  CHECK(spec.xi() == doctest::Approx(3.0).epsilon(1e-14));
  CHECK_NOTHROW(spec.validate());
}

TEST_CASE("weight table indexing: first coordinate most significant") {
  WeightFunction psi;
  psi.k = 2;
  psi.q = 3;
  psi.table = {0, 1, 2, 10, 11, 12, 20, 21, 22};
  int c[2] = {2, 1};
  CHECK(psi.at(c) == 21);
}

TEST_CASE("permute_weight transposes a k=2 table") {
  WeightFunction psi;
  psi.k = 2;
  psi.q = 2;
  psi.table = {1, 2, 3, 4};
  WeightFunction t = permute_weight(psi, {1, 0});
  CHECK(t.table == std::vector<double>{1, 3, 2, 4});
  // involution
  CHECK(permute_weight(t, {1, 0}).table == psi.table);
}

TEST_CASE("prior validation rejects non-closed supports") {
  WeightFunction psi;
  psi.k = 2;
  psi.q = 2;
  psi.table = {1, 2, 3, 4};  // not symmetric, transpose missing
  WeightPrior p;
  p.psis = {psi};
  p.probs = {1.0};
  CHECK_THROWS_AS(p.validate(2, 2), std::invalid_argument);

  // adding the transpose with equal mass fixes it
  p.psis.push_back(permute_weight(psi, {1, 0}));
  p.psis[1].id = 1;
  p.probs = {0.5, 0.5};
  CHECK_NOTHROW(p.validate(2, 2));

  // unequal masses break closure again
  p.probs = {0.6, 0.4};
  CHECK_THROWS_AS(p.validate(2, 2), std::invalid_argument);
}

TEST_CASE("spec validation failures") {
  ModelSpec s = testutil::sbm51_factor();
  s.pi = {0.6, 0.5};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = testutil::sbm51_factor();
  s.weights.psis[0].table[0] = -1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  HsbmSpec h = testutil::sbm51();
  h.m0[1] = 2.0;  // breaks symmetry
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
}

TEST_CASE("is_simple: (H1) and (H2)") {
  FactorGraph g = testutil::graph2(5, {{0, 1}, {1, 2}});
  CHECK(is_simple(g));
  g.clauses.push_back({0, {3, 3}});  // repeated variable
  CHECK_FALSE(is_simple(g));
  g.clauses.pop_back();
  g.clauses.push_back({0, {2, 1}});  // same set as {1,2}
  CHECK_FALSE(is_simple(g));
}

TEST_CASE("overlap matrix sums to one") {
  CommunityAssignment a{0, 0, 1, 1}, b{0, 1, 0, 1};
  OverlapMatrix r = overlap_matrix(a, b, 2);
  double s = 0;
  for (double x : r.r) s += x;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r(0, 0) == doctest::Approx(0.25));
}

TEST_CASE("overlap A: identity, relabeling, constants") {
  CommunityAssignment a{0, 0, 1, 1, 0, 1};
  CHECK(overlap_A(a, a, 2) == doctest::Approx(1.0));
  CommunityAssignment flipped{1, 1, 0, 0, 1, 0};
  CHECK(overlap_A(a, flipped, 2) == doctest::Approx(1.0));  // max over relabelings
  // constant estimator: one empty class contributes 0
  CommunityAssignment c{0, 0, 0, 0, 0, 0};
  CHECK(overlap_A(c, a, 2) == doctest::Approx(0.25));  // (1/2)(3/6 + 0)... best matching 3/6
  // A >= 1/q whenever both classes of s1 are nonempty
  CommunityAssignment b{0, 1, 0, 1, 0, 1};
  CHECK(overlap_A(a, b, 2) >= 0.5 - 1e-12);
}

TEST_CASE("overlap A tilde uses pi denominators") {
  CommunityAssignment a{0, 0, 1, 1}, b{0, 0, 1, 1};
  CHECK(overlap_A_tilde(a, b, {0.5, 0.5}) == doctest::Approx(1.0));
}

TEST_CASE("Hungarian assignment matches exhaustive search") {
  Rng rng(Seed{77, 0});
  for (int rep = 0; rep < 50; ++rep) {
    int q = 5;
    std::vector<double> score(q * q);
    for (double& s : score) s = rng.uniform();
    double hung = assignment_max(score, q);
    // exhaustive
    std::vector<int> perm{0, 1, 2, 3, 4};
    double best = 0;
    do {
      double acc = 0;
      for (int i = 0; i < q; ++i) acc += score[i * q + perm[i]];
      best = std::max(best, acc);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(hung == doctest::Approx(best).epsilon(1e-12));
  }
}
