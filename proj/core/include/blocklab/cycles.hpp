#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "blocklab/model.hpp"

namespace blocklab {

struct Signature {
  int ell = 0;
  std::vector<int> psis;                  // weight-function ids along the cycle
  std::vector<std::pair<int, int>> slots;  // (s_i, t_i), 1-based, s_i != t_i
  auto operator<=>(const Signature&) const = default;
};

struct CycleCensus {
  int K = 0;
  std::map<int, long long> hyper;          // ell -> X_ell
  std::map<Signature, long long> zeta;     // signature -> X_zeta
  long long hyper_at(int ell) const {
    auto it = hyper.find(ell);
    return it == hyper.end() ? 0 : it->second;
  }
};

// Undirected hypergraph cycles: distinct vertices v1..vl and distinct hyperedges
// a1..al with {v_i, v_{i+1}} in a_i, counted once per rotation+reflection class.
// Reported for l >= 3 when k = 2 and l >= 2 when k >= 3. Requires a simple graph.
CycleCensus count_hyper_cycles(const FactorGraph& g, int K);

// Factor-graph cycles with slot structure, counted per signature. Rotation is
// quotiented by anchoring at the minimal variable, reflection by keeping the
// lexicographically smaller of a traversal and its reversal.
CycleCensus count_zeta_cycles(const FactorGraph& g, int K);

struct ZetaParams {
  double lambda = 0;       // (1/2l) (d/k)^l prod p(psi_i)
  double lambda_star = 0;  // lambda * tr(Phi_zeta)
  double delta = 0;        // tr(Phi_zeta) - 1
  bool sym_ok = true;
};
ZetaParams zeta_params(const ModelSpec& spec, const Signature& zeta);

struct LambdaIdentity {
  double lhs = 0;  // exp of the truncated series sum_{l<=L} sum_{zeta in S_l} lambda delta^2
  double rhs = 0;  // eigenvalue product prod (1 - (k-1) d lambda)^{-1/2}
  double gap = 0;
  double tail_bound = 0;  // geometric bound on the dropped exponent mass
};
LambdaIdentity lambda_identity_check(const ModelSpec& spec, int L);

// Raw enumeration of sum_{zeta in S_l} lambda_zeta delta_zeta^2 (cross-check only;
// |Psi|^l (k(k-1))^l terms).
double zeta_sum_raw(const ModelSpec& spec, int l);

}  // namespace blocklab
