#pragma once

#include <utility>

#include "blocklab/model.hpp"
#include "blocklab/rng.hpp"

namespace blocklab {

// Null model: m clauses, neighborhoods i.i.d. uniform over V^k (with repetition),
// weight ids i.i.d. from the prior.
FactorGraph sample_null(const ModelSpec& spec, long n, long m, Rng& rng);

// Planted model: sigma* ~ pi^n; each clause (psi, tuple) with probability
// proportional to p(psi) * psi(sigma*_tuple).
std::pair<CommunityAssignment, FactorGraph> sample_planted(const ModelSpec& spec, long n, long m,
                                                           Rng& rng);
FactorGraph sample_planted_given(const ModelSpec& spec, const CommunityAssignment& sigma, long m,
                                 Rng& rng);

// Poissonized clause count m ~ Poisson(d n / k).
FactorGraph sample_poisson_null(const ModelSpec& spec, long n, Rng& rng);
std::pair<CommunityAssignment, FactorGraph> sample_poisson_planted(const ModelSpec& spec, long n,
                                                                   Rng& rng);

// HSBM: each unordered distinct-vertex k-set included independently with
// probability d * M0(colors) / C(n, k-1). Output is simple by construction.
std::pair<CommunityAssignment, FactorGraph> sample_hsbm(const HsbmSpec& h, long n, Rng& rng);

// ER k-uniform hypergraph: HSBM with no community tilt.
FactorGraph sample_er_hypergraph(long n, double d, int k, Rng& rng);

// Rejection-sample the Poissonized model until the graph satisfies (H1)+(H2).
struct ConditionedSample {
  CommunityAssignment sigma;  // empty when planted == false
  FactorGraph graph;
  long attempts = 0;
};
ConditionedSample condition_simple(const ModelSpec& spec, long n, Rng& rng, bool planted = true,
                                   long budget = 100000);

// Each clause independently replaced by a null-law clause with probability gamma.
FactorGraph gamma_resample(const FactorGraph& g, const ModelSpec& spec, double gamma, Rng& rng);

// Keep each clause independently with probability keep_prob (Poisson thinning).
FactorGraph thin_clauses(const FactorGraph& g, double keep_prob, Rng& rng);

Seed seed_for_sample(Seed base, uint64_t index);

}  // namespace blocklab
