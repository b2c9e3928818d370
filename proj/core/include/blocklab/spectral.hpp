#pragma once

#include <Eigen/Dense>
#include <vector>

#include "blocklab/model.hpp"

namespace blocklab {

struct SpectralSummary {
  std::vector<Eigen::MatrixXd> phi_psi;  // per weight function
  Eigen::MatrixXd phi;                   // prior-averaged
  Eigen::MatrixXd xi_star;               // q^2 x q^2
  std::vector<double> xi_star_eigs;      // real spectrum (self-adjoint under <.,.>_pi)
  double lambda_ks = 0;                  // max |eig|
  double d_ks = 0;                       // ((k-1) lambda_ks)^{-1}, +inf when lambda_ks = 0
  bool sym_ok = false;
  double sym_violation = 0;
};

// Phi_psi(i,j) = xi^{-1} E_pi[psi(sigma) | sigma_1 = i, sigma_2 = j] pi_j
Eigen::MatrixXd compute_phi(const WeightFunction& psi, const ModelSpec& spec);
// General slot pair (s, t), 1-based slots, s != t.
Eigen::MatrixXd compute_phi_st(const WeightFunction& psi, const ModelSpec& spec, int s, int t);

// (SYM): E_pi[psi(sigma) | sigma_s = tau] = xi for every psi, s, tau.
std::pair<bool, double> check_sym(const ModelSpec& spec, double tol_ = 1e-10);

SpectralSummary ks_threshold(const ModelSpec& spec);

// B(i,j) = sum over i_1..i_{k-2} of M0(i_1..i_{k-2}, i, j) pi_j prod pi_{i_s}
Eigen::MatrixXd hsbm_b_matrix(const HsbmSpec& h);
// alphas[l] = tr(B^l) - 1 for l = 1..L (alphas[0] unused); cross-checked against
// the eigenvalue form internally.
std::vector<double> hsbm_alphas(const HsbmSpec& h, int L);
double hsbm_d_ks(const HsbmSpec& h);  // |lambda_2|^{-2}

// F(R) = sum_{sigma,tau in [q]^k} E_p[psi(sigma) psi(tau)] prod_s R(sigma_s, tau_s)
double f_of_r(const ModelSpec& spec, const Eigen::MatrixXd& R);
double f_of_r(const HsbmSpec& h, const Eigen::MatrixXd& R);  // uses normalized M0

struct MinVerdict {
  bool min_at_pi_outer = false;  // heuristic verdict
  double f_pi = 0;               // F(pi pi^T)
  double best_f = 0;
  Eigen::MatrixXd best_r;
};
MinVerdict check_min(const ModelSpec& spec, int starts = 20, uint64_t seed = 1);

// Single-community-channel mutual information I0(q, lambda).
double i0(int q, double lambda);

}  // namespace blocklab
