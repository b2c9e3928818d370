#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "blocklab/model.hpp"
#include "blocklab/rng.hpp"

namespace blocklab {

struct OracleBudget {
  long max_states = 20000000;        // q^n cap for enumeration
  double max_pair_ops = 4e9;         // full double-loop cap for pair expectations
  long pair_samples = 2000000;       // fallback sampling budget
};

// L(G) = sum_sigma pi(sigma) psi_G(sigma) / E[psi_{G(n,m)}(sigma)], the exact
// planted/null likelihood ratio at m = |clauses|.
double exact_likelihood(const ModelSpec& spec, const FactorGraph& g, OracleBudget b = {});
double exact_log_likelihood(const ModelSpec& spec, const FactorGraph& g, OracleBudget b = {});

struct PosteriorTable {
  int q = 0;
  long n = 0;
  std::vector<double> mass;  // q^n entries, state index in mixed radix (vertex 0 most significant)
  double likelihood = 0;
  double log_likelihood = 0;
  int label(long state, long v) const;
};

PosteriorTable exact_posterior(const ModelSpec& spec, const FactorGraph& g, OracleBudget b = {});

Eigen::MatrixXd two_point(const ModelSpec& spec, const FactorGraph& g, long u, long v,
                          OracleBudget b = {});
Eigen::MatrixXd two_point_from_table(const PosteriorTable& t, long u, long v);

// <|R_{s1,s2} - pi pi^T|_1>_G, two independent posterior draws.
double posterior_overlap_expectation(const ModelSpec& spec, const FactorGraph& g,
                                     OracleBudget b = {}, Seed seed = {});

struct MutualInfoReport {
  double e_logL = 0;        // Monte-Carlo E log L(G*) (this is D_KL(G* || G))
  double e_logL_se = 0;
  double single_letter = 0;  // (d/k) E_{p,pi}[(psi/xi) log(psi/xi)]
  double i_estimate = 0;     // asymptotic-formula estimate per vertex, not exact I
  long samples = 0;
};

MutualInfoReport mutual_information_terms(const ModelSpec& spec, long n, long samples, Seed seed,
                                          OracleBudget b = {}, int workers = 1);

// (d/k) sum M0 log M0 prod pi.
double hsbm_single_letter(const HsbmSpec& h);

// (1/k) E_{psi~p, omega~Unif(V^k)}[ <psi(sigma_omega)/Ebar(sigma)>_G log <...>_G ].
double free_energy_derivative_functional(const ModelSpec& spec, const FactorGraph& g,
                                         OracleBudget b = {});

// Exact expectation over ALL null graphs with m clauses of h(G); enumerates
// (n^k |Psi|)^m clause configurations.
double null_expectation(const ModelSpec& spec, long n, long m,
                        const std::function<double(const FactorGraph&)>& h);

// Same under the planted law (joint over sigma*, G); enumerates q^n assignments too.
double planted_expectation(const ModelSpec& spec, long n, long m,
                           const std::function<double(const FactorGraph&)>& h);

}  // namespace blocklab
