#include <cmath>

#include "doctest.h"

#include "blocklab/spectral.hpp"
#include "helpers.hpp"

using namespace blocklab;

TEST_CASE("two-community SBM (a=5, b=1): transition matrix and KS threshold") {
  ModelSpec spec = testutil::sbm51_factor();
  Eigen::MatrixXd phi = compute_phi(spec.weights.psis[0], spec);
  CHECK(phi(0, 0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(phi(0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(phi(1, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  // rows sum to 1: Phi is a stochastic matrix
  CHECK(phi.row(0).sum() == doctest::Approx(1.0).epsilon(1e-12));

  SpectralSummary s = ks_threshold(spec);
  CHECK(s.sym_ok);
  // top eigenvalue of the centered two-point operator is lambda^2 = 4/9
  CHECK(s.lambda_ks == doctest::Approx(4.0 / 9.0).epsilon(1e-10));
  CHECK(s.d_ks == doctest::Approx(2.25).epsilon(1e-10));
  // remaining spectrum vanishes: dim of the nontrivial space is (q-1)^2 = 1
  int nonzero = 0;
  for (double e : s.xi_star_eigs) nonzero += std::fabs(e) > 1e-10;
  CHECK(nonzero == 1);
}

TEST_CASE("factor-model and tensor-model threshold paths agree") {
  for (auto [a, b] : {std::pair<double, double>{5, 1}, {3, 2}, {7, 2}}) {
    HsbmSpec h = symmetric_sbm(2, a, b);
    SpectralSummary s = ks_threshold(hsbm_to_factor_spec(h));
    CHECK(s.d_ks == doctest::Approx(hsbm_d_ks(h)).epsilon(1e-10));
  }
}

TEST_CASE("cycle weights alpha_l = (q-1) lambda^l for symmetric SBM") {
  for (int q : {2, 3}) {
    HsbmSpec h = symmetric_sbm(q, 5, 1);
    double lam = sbm_lambda(q, 5, 1);
    auto alphas = hsbm_alphas(h, 8);
    for (int l = 1; l <= 8; ++l)
      CHECK(alphas[l] == doctest::Approx((q - 1) * std::pow(lam, l)).epsilon(1e-10));
  }
}

TEST_CASE("B matrix row structure for k=3") {
  HsbmSpec h = symmetric_sbm(2, 5, 1, 3);
  Eigen::MatrixXd B = hsbm_b_matrix(h);
  // stationary direction: B^T applied to pi... rows of B sum to 1 under degree balance
  CHECK((B * Eigen::VectorXd::Ones(2))(0) == doctest::Approx(1.0).epsilon(1e-10));
  auto alphas = hsbm_alphas(h, 5);
  CHECK(alphas[1] == doctest::Approx(B.trace() - 1.0).epsilon(1e-12));
}

TEST_CASE("(SYM) holds for degree-balanced tensors, fails otherwise") {
  CHECK(check_sym(testutil::sbm32_factor()).first);

  // a non-balanced weight: psi(i,j) depends on i only
  ModelSpec s;
  s.k = 2;
  s.q = 2;
  s.pi = {0.5, 0.5};
  s.d = 1.0;
  WeightFunction p1{0, 2, 2, {2, 2, 1, 1}};
  WeightFunction p2{1, 2, 2, {2, 1, 2, 1}};  // transpose, for closure
  s.weights.psis = {p1, p2};
  s.weights.probs = {0.5, 0.5};
  s.validate();
  auto [ok, viol] = check_sym(s);
  CHECK_FALSE(ok);
  CHECK(viol > 0.1);
}

TEST_CASE("second-moment functional: F(pi pi^T) = xi^2 and tensor-form values") {
  ModelSpec spec = testutil::sbm51_factor();
  Eigen::MatrixXd R(2, 2);
  R << 0.25, 0.25, 0.25, 0.25;  // = pi pi^T
  CHECK(f_of_r(spec, R) == doctest::Approx(9.0).epsilon(1e-10));  // xi^2 = d^2

  HsbmSpec h = testutil::sbm51();
  CHECK(f_of_r(h, R) == doctest::Approx(1.0).epsilon(1e-10));  // normalized M0

  // perfectly correlated overlap R = diag(pi): F = sum M0^2 prod pi = 13/9
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = D(1, 1) = 0.5;
  CHECK(f_of_r(h, D) == doctest::Approx(13.0 / 9.0).epsilon(1e-10));
}

TEST_CASE("(MIN) verdict: symmetric SBM minimizes F at pi pi^T") {
  MinVerdict v = check_min(testutil::sbm32_factor(), 10, 3);
  CHECK(v.min_at_pi_outer);
  CHECK(v.f_pi <= v.best_f + 1e-9);
}

TEST_CASE("channel information function i0") {
  // closed form at lambda = 1/2
  double want = 0.75 * std::log(1.5) + 0.25 * std::log(0.5);
  CHECK(i0(2, 0.5) == doctest::Approx(want).epsilon(1e-14));
  CHECK(i0(2, 0.0) == doctest::Approx(0.0));
  CHECK_THROWS(i0(2, 1.5));
  CHECK_THROWS(i0(1, 0.5));
}
