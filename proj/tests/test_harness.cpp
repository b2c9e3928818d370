#include <cmath>

#include "doctest.h"

#include "blocklab/harness.hpp"
#include "blocklab/sampler.hpp"
#include "blocklab/spectral.hpp"
#include "helpers.hpp"

using namespace blocklab;

TEST_CASE("cycle length cap rule") {
  CHECK(default_kn(10) == 4);
  CHECK(default_kn(1000) == 5);
  CHECK(default_kn(4000) == 6);
  CHECK(default_kn(2) == 3);
}

TEST_CASE("test statistic: no cycles gives 1, triangle gives 1 + lambda^3") {
  HsbmSpec h = testutil::sbm51();
  auto alphas = hsbm_alphas(h, 5);

  FactorGraph path = testutil::graph2(5, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(test_statistic(path, alphas, 5) == doctest::Approx(1.0).epsilon(1e-12));

  FactorGraph tri = testutil::graph2(3, {{0, 1}, {1, 2}, {2, 0}});
  CHECK(test_statistic(tri, alphas, 5) == doctest::Approx(35.0 / 27.0).epsilon(1e-12));

  std::vector<double> zeros(6, 0.0);
  CHECK(test_statistic(tri, zeros, 5) == doctest::Approx(1.0));

  FactorGraph bad = testutil::graph2(3, {{0, 1}, {1, 0}});
  CHECK_THROWS_AS(test_statistic(bad, alphas, 5), std::invalid_argument);
}

TEST_CASE("statistic ignores structure outside short cycles") {
  HsbmSpec h = testutil::sbm51();
  auto alphas = hsbm_alphas(h, 5);
  Rng rng(Seed{400, 0});
  FactorGraph g = sample_er_hypergraph(50, 3.0, 2, rng);
  double before = test_statistic(g, alphas, 5);
  FactorGraph ext = g;
  ext.n += 2;
  ext.clauses.push_back({0, {50, 51}});
  ext.simple_flag = is_simple(ext);
  CHECK(test_statistic(ext, alphas, 5) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("calibration: order-statistic threshold and randomization") {
  Calibration c = calibrate_from_values({1, 1, 2, 2, 3}, 0.2);
  CHECK(c.c == doctest::Approx(3.0));
  CHECK_FALSE(c.conservative);
  CHECK_FALSE(c.always_reject);
  // P(T > 3) = 0, atom P(T = 3) = 0.2, so gamma = (0.2 - 0)/0.2 = 1
  CHECK(c.randomize_prob == doctest::Approx(1.0));

  Calibration all = calibrate_from_values({1, 1, 2, 2, 3}, 1.0);
  CHECK(all.always_reject);
  CHECK(all.c < 1.0);

  Calibration cons = calibrate_from_values({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.05);
  CHECK(cons.conservative);
  CHECK_FALSE(cons.warning.empty());

  Calibration degen = calibrate_from_values({2, 2, 2, 2, 2}, 0.2);
  CHECK(degen.conservative);

  CHECK_THROWS(calibrate_from_values({}, 0.1));
  CHECK_THROWS(calibrate_from_values({1, 2}, 0.0));
}

TEST_CASE("calibrated threshold has size within binomial noise") {
  // near-continuous sample: empirical size of T > C close to alpha on fresh data
  Rng rng(Seed{401, 0});
  std::vector<double> calib(4000), fresh(4000);
  for (double& v : calib) v = rng.uniform() * 10;
  for (double& v : fresh) v = rng.uniform() * 10;
  Calibration c = calibrate_from_values(calib, 0.05);
  long rej = 0;
  for (double v : fresh) rej += v > c.c;
  double size = static_cast<double>(rej) / fresh.size();
  CHECK(size < 0.05 + 3 * std::sqrt(0.05 * 0.95 / 4000));
  CHECK(size > 0.05 - 3 * std::sqrt(0.05 * 0.95 / 4000));
}

TEST_CASE("end-to-end graph calibration satisfies both order inequalities") {
  HsbmSpec h = testutil::sbm51();
  Calibration c = calibrate(h, 300, 0.1, 4, 300, Seed{402, 0});
  CHECK(std::isfinite(c.c));
  CHECK(c.randomize_prob >= 0);
  CHECK(c.randomize_prob <= 1);
}

TEST_CASE("power experiment: size control and null-equals-alternative sanity") {
  HsbmSpec h = testutil::sbm51();
  TestReport rep = power_experiment(h, 400, 0.1, 4, 300, 300, Seed{403, 0});
  double se = std::sqrt(0.1 * 0.9 / 300);
  CHECK(rep.empirical_size <= 0.1 + 3 * se);
  CHECK(rep.empirical_power >= rep.empirical_size - 3 * se);  // signal never hurts
  CHECK(rep.K_n == 4);
  CHECK(std::isnan(rep.beta_star_reference));  // divergent above threshold

  // b = a: no community structure, power == size in distribution
  HsbmSpec flat = symmetric_sbm(2, 3, 3);
  TestReport rep2 = power_experiment(flat, 400, 0.1, 4, 300, 300, Seed{404, 0});
  CHECK(std::fabs(rep2.empirical_power - rep2.empirical_size) < 4 * se * 1.5);
}

TEST_CASE("below-threshold power experiment attaches the reference value") {
  HsbmSpec h = testutil::sbm32();
  TestReport rep = power_experiment(h, 500, 0.05, 5, 200, 200, Seed{405, 0});
  CHECK_FALSE(std::isnan(rep.beta_star_reference));
  CHECK(rep.beta_star_reference > 0.03);
  CHECK(rep.beta_star_reference < 0.1);
}

TEST_CASE("weak recovery probe: no-signal baseline agreement") {
  // d = 0: posterior is the prior, estimator is independent of sigma*
  HsbmSpec h = testutil::sbm51();
  h.d = 0.001;  // effectively no clauses at n = 8
  ModelSpec spec = hsbm_to_factor_spec(h);
  ProbeReport rep = weak_recovery_probe(spec, 8, 60, Seed{406, 0});
  double se = std::sqrt(rep.estimator_A_se * rep.estimator_A_se +
                        rep.baseline_A_se * rep.baseline_A_se);
  CHECK(std::fabs(rep.estimator_A - rep.baseline_A) < 3 * se + 1e-6);
  CHECK(rep.estimator_A >= 0.5 - 3 * rep.estimator_A_se);  // A >= 1/q
  CHECK(rep.two_point_dev < 0.05);
}

TEST_CASE("weak recovery probe: strong signal beats the baseline") {
  HsbmSpec h = testutil::sbm51();
  h.d = 4.0;  // well above d_KS = 2.25
  ModelSpec spec = hsbm_to_factor_spec(h);
  ProbeReport rep = weak_recovery_probe(spec, 10, 40, Seed{407, 0});
  double se = std::sqrt(rep.estimator_A_se * rep.estimator_A_se +
                        rep.baseline_A_se * rep.baseline_A_se);
  CHECK(rep.estimator_A - rep.baseline_A > 3 * se);
  CHECK(rep.overlap_dev > 0);
  CHECK(rep.two_point_dev > 0);
}
