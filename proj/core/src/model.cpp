#include "blocklab/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace blocklab {

namespace {

long ipow(int q, int k) {
  long r = 1;
  for (int i = 0; i < k; ++i) r *= q;
  return r;
}

// iterate colors as mixed-radix counter; returns false when wrapped
bool next_colors(std::vector<int>& c, int q) {
  for (int s = static_cast<int>(c.size()) - 1; s >= 0; --s) {
    if (++c[s] < q) return true;
    c[s] = 0;
  }
  return false;
}

}  // namespace

void WeightFunction::validate() const {
  if (k < 1 || q < 2) throw std::invalid_argument("weight function: need k >= 1, q >= 2");
  long sz = ipow(q, k);
  if (sz > tol::kMaxTableEntries) throw std::invalid_argument("weight table exceeds q^k cap");
  if (static_cast<long>(table.size()) != sz)
    throw std::invalid_argument("weight table must have exactly q^k entries");
  for (double v : table)
    if (!(v > 0) || !std::isfinite(v))
      throw std::invalid_argument("weight table entries must be strictly positive");
}

WeightFunction permute_weight(const WeightFunction& psi, const std::vector<int>& theta) {
  if (static_cast<int>(theta.size()) != psi.k)
    throw std::invalid_argument("permute_weight: permutation arity mismatch");
  std::vector<bool> seen(psi.k, false);
  for (int v : theta) {
    if (v < 0 || v >= psi.k || seen[v]) throw std::invalid_argument("permute_weight: not a bijection");
    seen[v] = true;
  }
  WeightFunction out = psi;
  std::vector<int> c(psi.k, 0), pc(psi.k);
  do {
    for (int s = 0; s < psi.k; ++s) pc[s] = c[theta[s]];
    out.table[out.table_index(c.data())] = psi.at(pc.data());
  } while (next_colors(c, psi.q));
  return out;
}

void WeightPrior::validate(int k, int q) const {
  if (psis.empty() || psis.size() != probs.size())
    throw std::invalid_argument("weight prior: empty or mismatched entries");
  double total = 0;
  for (size_t i = 0; i < psis.size(); ++i) {
    psis[i].validate();
    if (psis[i].k != k || psis[i].q != q)
      throw std::invalid_argument("weight prior: arity/community mismatch");
    if (!(probs[i] > 0)) throw std::invalid_argument("weight prior: probabilities must be positive");
    total += probs[i];
  }
  if (std::fabs(total - 1.0) > tol::kProb)
    throw std::invalid_argument("weight prior: probabilities must sum to 1");

  // permutation closure with equal mass, checked by matching tables
  std::map<std::vector<double>, double> mass;
  for (size_t i = 0; i < psis.size(); ++i) mass[psis[i].table] = probs[i];
  std::vector<int> theta(k);
  std::iota(theta.begin(), theta.end(), 0);
  do {
    for (size_t i = 0; i < psis.size(); ++i) {
      WeightFunction pp = permute_weight(psis[i], theta);
      auto it = mass.find(pp.table);
      if (it == mass.end() || std::fabs(it->second - probs[i]) > tol::kProb)
        throw std::invalid_argument(
            "weight prior: support not closed under coordinate permutations with equal mass");
    }
  } while (std::next_permutation(theta.begin(), theta.end()));
}

double ModelSpec::xi() const {
  double total = 0;
  std::vector<int> c(k, 0);
  for (size_t w = 0; w < weights.psis.size(); ++w) {
    const auto& psi = weights.psis[w];
    double acc = 0;
    std::fill(c.begin(), c.end(), 0);
    do {
      double pr = 1;
      for (int s = 0; s < k; ++s) pr *= pi[c[s]];
      acc += pr * psi.at(c.data());
    } while (next_colors(c, q));
    total += weights.probs[w] * acc;
  }
  return total;
}

void ModelSpec::validate() const {
  if (k < 2 || q < 2) throw std::invalid_argument("model spec: need k >= 2, q >= 2");
  if (static_cast<int>(pi.size()) != q) throw std::invalid_argument("model spec: pi size != q");
  double s = 0;
  for (double p : pi) {
    if (!(p > 0)) throw std::invalid_argument("model spec: pi entries must be positive");
    s += p;
  }
  if (std::fabs(s - 1.0) > tol::kProb) throw std::invalid_argument("model spec: pi must sum to 1");
  if (!(d > 0) && d != 0) throw std::invalid_argument("model spec: d must be nonnegative");
  weights.validate(k, q);
  double x = xi();
  if (!(x > 0) || !std::isfinite(x)) throw std::invalid_argument("model spec: xi must be positive");
}

bool HsbmSpec::degree_balanced(double tol_) const {
  // sum over the other k-1 coordinates of M0 * prod pi equals 1 for every color
  for (int i = 0; i < q; ++i) {
    double acc = 0;
    std::vector<int> c(k, 0);
    do {
      if (c[k - 1] != i) continue;
      double pr = 1;
      for (int s = 0; s < k - 1; ++s) pr *= pi[c[s]];
      acc += pr * m0[index(c.data())];
    } while (next_colors(c, q));
    if (std::fabs(acc - 1.0) > tol_) return false;
  }
  return true;
}

void HsbmSpec::validate() const {
  if (k < 2 || q < 2) throw std::invalid_argument("hsbm spec: need k >= 2, q >= 2");
  if (static_cast<int>(pi.size()) != q) throw std::invalid_argument("hsbm spec: pi size != q");
  double s = 0;
  for (double p : pi) {
    if (!(p > 0)) throw std::invalid_argument("hsbm spec: pi entries must be positive");
    s += p;
  }
  if (std::fabs(s - 1.0) > tol::kProb) throw std::invalid_argument("hsbm spec: pi must sum to 1");
  long sz = ipow(q, k);
  if (sz > tol::kMaxTableEntries) throw std::invalid_argument("hsbm tensor exceeds q^k cap");
  if (static_cast<long>(m0.size()) != sz)
    throw std::invalid_argument("hsbm spec: m0 must have q^k entries");
  for (double v : m0)
    if (!(v > 0)) throw std::invalid_argument("hsbm spec: m0 entries must be positive");

  // symmetry under index permutations
  std::vector<int> theta(k);
  std::iota(theta.begin(), theta.end(), 0);
  std::vector<int> c(k), pc(k);
  while (std::next_permutation(theta.begin(), theta.end())) {
    std::fill(c.begin(), c.end(), 0);
    do {
      for (int s2 = 0; s2 < k; ++s2) pc[s2] = c[theta[s2]];
      if (std::fabs(m0[index(c.data())] - m0[index(pc.data())]) > tol::kInvariant)
        throw std::invalid_argument("hsbm spec: m0 must be a symmetric tensor");
    } while (next_colors(c, q));
  }

  // normalization: sum M0 * prod pi = 1
  double acc = 0;
  std::fill(c.begin(), c.end(), 0);
  do {
    double pr = 1;
    for (int s2 = 0; s2 < k; ++s2) pr *= pi[c[s2]];
    acc += pr * m0[index(c.data())];
  } while (next_colors(c, q));
  if (std::fabs(acc - 1.0) > tol::kInvariant)
    throw std::invalid_argument("hsbm spec: m0 fails normalization sum M0 prod pi = 1");
}

HsbmSpec symmetric_sbm(int q, double a, double b, int k) {
  if (q < 2 || k < 2) throw std::invalid_argument("symmetric_sbm: need q >= 2, k >= 2");
  if (!(a > 0) || !(b > 0)) throw std::invalid_argument("symmetric_sbm: need a, b > 0");
  HsbmSpec h;
  h.k = k;
  h.q = q;
  h.pi.assign(q, 1.0 / q);
  long sz = ipow(q, k);
  h.m0.assign(sz, b);
  // diagonal entries (all colors equal) get a
  for (int i = 0; i < q; ++i) {
    long idx = 0;
    for (int s = 0; s < k; ++s) idx = idx * q + i;
    h.m0[idx] = a;
  }
  // d = sum M prod pi with M = the (a,b) tensor; then M0 = M/d
  double qk1 = static_cast<double>(ipow(q, k - 1));
  h.d = (a - b) / qk1 + b;  // q * a * q^{-k} + (q^k - q) * b * q^{-k}
  for (double& v : h.m0) v /= h.d;
  h.validate();
  return h;
}

double sbm_lambda(int q, double a, double b) { return (a - b) / (a + (q - 1) * b); }

ModelSpec hsbm_to_factor_spec(const HsbmSpec& h) {
  h.validate();
  ModelSpec spec;
  spec.k = h.k;
  spec.q = h.q;
  spec.pi = h.pi;
  spec.d = h.d;
  WeightFunction psi;
  psi.id = 0;
  psi.k = h.k;
  psi.q = h.q;
  psi.table = h.m0;
  for (double& v : psi.table) v *= h.d;  // M = d * M0
  spec.weights.psis = {psi};
  spec.weights.probs = {1.0};
  spec.validate();
  return spec;
}

bool is_simple(const FactorGraph& g) {
  std::set<std::vector<int>> seen;
  std::vector<int> key;
  for (const auto& cl : g.clauses) {
    key = cl.vars;
    std::sort(key.begin(), key.end());
    for (size_t i = 1; i < key.size(); ++i)
      if (key[i] == key[i - 1]) return false;  // (H1)
    if (!seen.insert(key).second) return false;  // (H2)
  }
  return true;
}

OverlapMatrix overlap_matrix(const CommunityAssignment& s1, const CommunityAssignment& s2, int q) {
  if (s1.size() != s2.size()) throw std::invalid_argument("overlap_matrix: length mismatch");
  if (s1.empty()) throw std::invalid_argument("overlap_matrix: empty assignments");
  OverlapMatrix r;
  r.q = q;
  r.r.assign(static_cast<size_t>(q) * q, 0.0);
  double inv = 1.0 / static_cast<double>(s1.size());
  for (size_t v = 0; v < s1.size(); ++v) r.r[static_cast<size_t>(s1[v]) * q + s2[v]] += inv;
  return r;
}

double assignment_max(const std::vector<double>& score, int q) {
  // Hungarian algorithm (Jonker-Volgenant style potentials), maximization via negation.
  const double INF = 1e100;
  std::vector<double> u(q + 1, 0), v(q + 1, 0);
  std::vector<int> p(q + 1, 0), way(q + 1, 0);
  auto cost = [&](int i, int j) { return -score[static_cast<size_t>(i) * q + j]; };
  for (int i = 1; i <= q; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(q + 1, INF);
    std::vector<bool> used(q + 1, false);
    do {
      used[j0] = true;
      int i0 = p[j0], j1 = -1;
      double delta = INF;
      for (int j = 1; j <= q; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= q; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double best = 0;
  for (int j = 1; j <= q; ++j) best += score[static_cast<size_t>(p[j] - 1) * q + (j - 1)];
  return best;
}

namespace {

double overlap_with_denoms(const CommunityAssignment& s1, const CommunityAssignment& s2, int q,
                           const std::vector<double>& denom) {
  if (s1.size() != s2.size()) throw std::invalid_argument("overlap: length mismatch");
  std::vector<double> joint(static_cast<size_t>(q) * q, 0.0);
  for (size_t v = 0; v < s1.size(); ++v) joint[static_cast<size_t>(s1[v]) * q + s2[v]] += 1.0;
  std::vector<double> score(static_cast<size_t>(q) * q, 0.0);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      score[static_cast<size_t>(i) * q + j] =
          denom[i] > 0 ? joint[static_cast<size_t>(i) * q + j] / denom[i] : 0.0;

  double best;
  if (q <= 8) {
    best = 0;
    std::vector<int> gamma(q);
    std::iota(gamma.begin(), gamma.end(), 0);
    do {
      double acc = 0;
      for (int i = 0; i < q; ++i) acc += score[static_cast<size_t>(i) * q + gamma[i]];
      best = std::max(best, acc);
    } while (std::next_permutation(gamma.begin(), gamma.end()));
  } else {
    best = assignment_max(score, q);
  }
  return best / q;
}

}  // namespace

double overlap_A(const CommunityAssignment& s1, const CommunityAssignment& s2, int q) {
  std::vector<double> denom(q, 0.0);
  for (int c : s1) denom[c] += 1.0;
  return overlap_with_denoms(s1, s2, q, denom);
}

double overlap_A_tilde(const CommunityAssignment& s1, const CommunityAssignment& s2,
                       const std::vector<double>& pi) {
  int q = static_cast<int>(pi.size());
  std::vector<double> denom(q);
  for (int i = 0; i < q; ++i) denom[i] = pi[i] * static_cast<double>(s1.size());
  return overlap_with_denoms(s1, s2, q, denom);
}

}  // namespace blocklab
