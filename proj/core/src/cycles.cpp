#include "blocklab/cycles.hpp"

#include <cmath>
#include <stdexcept>

#include "blocklab/spectral.hpp"

namespace blocklab {

namespace {

struct HyperDfs {
  const FactorGraph& g;
  const std::vector<std::vector<int>>& incidence;  // vertex -> clause ids
  int K;
  int anchor = 0;
  std::vector<char> visited;
  std::vector<char> used;
  std::vector<long long> directed;  // directed closed traversals per length

  HyperDfs(const FactorGraph& g_, const std::vector<std::vector<int>>& inc, int K_)
      : g(g_), incidence(inc), K(K_), visited(g_.n, 0), used(g_.clauses.size(), 0),
        directed(K_ + 1, 0) {}

  void walk(int v, int depth) {
    for (int a : incidence[v]) {
      if (used[a]) continue;
      used[a] = 1;
      for (int w : g.clauses[a].vars) {
        if (w == v) continue;
        if (w == anchor) {
          if (depth + 1 >= 2) ++directed[depth + 1];
        } else if (w > anchor && !visited[w] && depth + 1 < K) {
          visited[w] = 1;
          walk(w, depth + 1);
          visited[w] = 0;
        }
      }
      used[a] = 0;
    }
  }
};

}  // namespace

CycleCensus count_hyper_cycles(const FactorGraph& g, int K) {
  if (!g.simple_flag || !is_simple(g))
    throw std::invalid_argument("count_hyper_cycles: requires a simple-flagged simple graph");
  if (K < 2) throw std::invalid_argument("count_hyper_cycles: K >= 2");
  std::vector<std::vector<int>> incidence(g.n);
  for (size_t a = 0; a < g.clauses.size(); ++a)
    for (int v : g.clauses[a].vars) incidence[v].push_back(static_cast<int>(a));

  HyperDfs dfs(g, incidence, K);
  for (long u = 0; u < g.n; ++u) {
    if (incidence[u].empty()) continue;
    dfs.anchor = static_cast<int>(u);
    dfs.visited[u] = 1;
    dfs.walk(static_cast<int>(u), 0);
    dfs.visited[u] = 0;
  }

  CycleCensus out;
  out.K = K;
  int lmin = g.k == 2 ? 3 : 2;
  for (int l = lmin; l <= K; ++l) out.hyper[l] = dfs.directed[l] / 2;
  return out;
}

namespace {

struct ZetaDfs {
  const FactorGraph& g;
  const std::vector<std::vector<std::pair<int, int>>>& incidence;  // var -> (clause, slot)
  int K;
  int anchor = 0;
  std::vector<char> visited;
  std::vector<char> used;
  std::vector<int> path_vars;                     // v1..v_depth
  std::vector<int> path_clauses;                  // j1..j_depth
  std::vector<std::pair<int, int>> path_slots;    // (s,t), 0-based during search
  std::map<Signature, long long>* zeta = nullptr;

  // traversal vs reversal, lexicographic on (v2..vl, j1..jl, flattened slots)
  bool canonical() const {
    size_t l = path_clauses.size();
    for (size_t i = 1; i < l; ++i) {
      int fwd = path_vars[i], rev = path_vars[l - i];
      if (fwd != rev) return fwd < rev;
    }
    for (size_t i = 0; i < l; ++i) {
      int fwd = path_clauses[i], rev = path_clauses[l - 1 - i];
      if (fwd != rev) return fwd < rev;
    }
    for (size_t i = 0; i < l; ++i) {
      auto [s, t] = path_slots[i];
      auto [rs, rt] = path_slots[l - 1 - i];
      if (s != rt) return s < rt;
      if (t != rs) return t < rs;
    }
    return true;  // palindromic traversal; count once
  }

  void record() {
    Signature sig;
    sig.ell = static_cast<int>(path_clauses.size());
    for (int j : path_clauses) sig.psis.push_back(g.clauses[j].wid);
    for (auto [s, t] : path_slots) sig.slots.emplace_back(s + 1, t + 1);
    ++(*zeta)[sig];
  }

  void walk(int v, int depth) {
    for (auto [a, s] : incidence[v]) {
      if (used[a]) continue;
      used[a] = 1;
      const auto& vars = g.clauses[a].vars;
      for (int t = 0; t < g.k; ++t) {
        if (t == s) continue;
        int w = vars[t];
        path_clauses.push_back(a);
        path_slots.emplace_back(s, t);
        if (w == anchor) {
          if (canonical()) record();
        } else if (w > anchor && !visited[w] && depth + 1 < K) {
          visited[w] = 1;
          path_vars.push_back(w);
          walk(w, depth + 1);
          path_vars.pop_back();
          visited[w] = 0;
        }
        path_clauses.pop_back();
        path_slots.pop_back();
      }
      used[a] = 0;
    }
  }
};

}  // namespace

CycleCensus count_zeta_cycles(const FactorGraph& g, int K) {
  if (K < 1) throw std::invalid_argument("count_zeta_cycles: K >= 1");
  std::vector<std::vector<std::pair<int, int>>> incidence(g.n);
  for (size_t a = 0; a < g.clauses.size(); ++a)
    for (int s = 0; s < g.k; ++s)
      incidence[g.clauses[a].vars[s]].emplace_back(static_cast<int>(a), s);

  CycleCensus out;
  out.K = K;
  ZetaDfs dfs{g, incidence, K, 0, std::vector<char>(g.n, 0),
              std::vector<char>(g.clauses.size(), 0), {}, {}, {}, &out.zeta};
  for (long u = 0; u < g.n; ++u) {
    if (incidence[u].empty()) continue;
    dfs.anchor = static_cast<int>(u);
    dfs.visited[u] = 1;
    dfs.path_vars = {static_cast<int>(u)};
    dfs.walk(static_cast<int>(u), 0);
    dfs.visited[u] = 0;
  }
  return out;
}

ZetaParams zeta_params(const ModelSpec& spec, const Signature& zeta) {
  if (zeta.ell < 1 || static_cast<int>(zeta.psis.size()) != zeta.ell ||
      static_cast<int>(zeta.slots.size()) != zeta.ell)
    throw std::invalid_argument("zeta_params: malformed signature");
  ZetaParams out;
  out.sym_ok = check_sym(spec).first;
  double lambda = std::pow(spec.d / spec.k, zeta.ell) / (2.0 * zeta.ell);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(spec.q, spec.q);
  for (int i = 0; i < zeta.ell; ++i) {
    int wid = zeta.psis[i];
    if (wid < 0 || wid >= static_cast<int>(spec.weights.psis.size()))
      throw std::invalid_argument("zeta_params: unknown weight id in signature");
    lambda *= spec.weights.probs[wid];
    auto [s, t] = zeta.slots[i];
    phi = phi * compute_phi_st(spec.weights.psis[wid], spec, s, t);
  }
  out.lambda = lambda;
  double tr = phi.trace();
  out.lambda_star = lambda * tr;
  out.delta = tr - 1.0;
  return out;
}

LambdaIdentity lambda_identity_check(const ModelSpec& spec, int L) {
  SpectralSummary ss = ks_threshold(spec);
  double kd = (spec.k - 1) * spec.d;
  if (!(spec.d < ss.d_ks))
    throw std::invalid_argument("lambda_identity_check: requires d < d_KS (series diverges)");

  int q = spec.q;
  // sum_{zeta in S_l} lambda delta^2 = (((k-1)d)^l / 2l) (tr Xi^l - 2 tr Phibar^l + 1).
  // The trace difference equals tr of the l-th power of E_p[(Phi - 1 pi^T) (x)
  // (Phi - 1 pi^T)] (the cross terms vanish under (SYM)); accumulate that form
  // directly, since the raw difference of traces cancels to below double
  // precision while the ((k-1)d)^l prefactor keeps growing.
  Eigen::MatrixXd pi_outer = Eigen::MatrixXd::Zero(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) pi_outer(i, j) = spec.pi[j];
  Eigen::MatrixXd xic = Eigen::MatrixXd::Zero(q * q, q * q);
  for (size_t w = 0; w < spec.weights.psis.size(); ++w) {
    Eigen::MatrixXd a = ss.phi_psi[w] - pi_outer;
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        xic.block(i * q, j * q, q, q) += spec.weights.probs[w] * a(i, j) * a;
  }

  double exponent = 0;
  Eigen::MatrixXd xp = Eigen::MatrixXd::Identity(q * q, q * q);
  double scale = 1;
  for (int l = 1; l <= L; ++l) {
    xp = xp * xic;
    scale *= kd;
    exponent += scale / (2.0 * l) * xp.trace();
  }

  LambdaIdentity out;
  out.lhs = std::exp(exponent);
  double rhs = 1;
  for (double e : ss.xi_star_eigs) rhs *= std::pow(1.0 - kd * e, -0.5);
  out.rhs = rhs;
  out.gap = std::fabs(out.lhs - rhs);
  double r = kd * ss.lambda_ks;
  out.tail_bound =
      r < 1 ? q * q * std::pow(r, L + 1) / (2.0 * (L + 1) * (1.0 - r)) : INFINITY;
  return out;
}

double zeta_sum_raw(const ModelSpec& spec, int l) {
  int k = spec.k;
  int nw = static_cast<int>(spec.weights.psis.size());
  int nslots = k * (k - 1);
  std::vector<std::pair<int, int>> slot_list;
  for (int s = 1; s <= k; ++s)
    for (int t = 1; t <= k; ++t)
      if (s != t) slot_list.emplace_back(s, t);

  double total = 0;
  // mixed-radix enumeration over (psi, slot) choices per position
  long combos = 1;
  for (int i = 0; i < l; ++i) combos *= static_cast<long>(nw) * nslots;
  Signature sig;
  sig.ell = l;
  sig.psis.resize(l);
  sig.slots.resize(l);
  for (long code = 0; code < combos; ++code) {
    long rest = code;
    for (int i = 0; i < l; ++i) {
      sig.psis[i] = static_cast<int>(rest % nw);
      rest /= nw;
      sig.slots[i] = slot_list[rest % nslots];
      rest /= nslots;
    }
    ZetaParams zp = zeta_params(spec, sig);
    total += zp.lambda * zp.delta * zp.delta;
  }
  return total;
}

}  // namespace blocklab
