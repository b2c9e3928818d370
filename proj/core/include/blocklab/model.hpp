#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace blocklab {

// Community labels and weight-table color indices are 0-based internally.
// External formats (JSON, graph text) are 1-based.

struct WeightFunction {
  int id = 0;
  int k = 2;
  int q = 2;
  // dense, q^k entries; first coordinate most significant:
  // index(c1..ck) = ((c1*q + c2)*q + ...)*q + ck
  std::vector<double> table;

  long table_index(const int* colors) const {
    long idx = 0;
    for (int s = 0; s < k; ++s) idx = idx * q + colors[s];
    return idx;
  }
  double at(const int* colors) const { return table[table_index(colors)]; }
  void validate() const;
};

// ψ^θ(c1..ck) = ψ(c_{θ(1)}, ..., c_{θ(k)}); theta is 0-based.
WeightFunction permute_weight(const WeightFunction& psi, const std::vector<int>& theta);

struct WeightPrior {
  std::vector<WeightFunction> psis;
  std::vector<double> probs;
  void validate(int k, int q) const;  // includes permutation closure with equal mass
};

struct ModelSpec {
  int k = 2;
  int q = 2;
  std::vector<double> pi;
  WeightPrior weights;
  double d = 0;

  double xi() const;  // E_{p,pi}[psi(sigma)]
  void validate() const;
};

struct HsbmSpec {
  int k = 2;
  int q = 2;
  std::vector<double> pi;
  std::vector<double> m0;  // flat symmetric tensor, q^k entries, same indexing as WeightFunction
  double d = 0;

  long index(const int* colors) const {
    long idx = 0;
    for (int s = 0; s < k; ++s) idx = idx * q + colors[s];
    return idx;
  }
  bool degree_balanced(double tol = 1e-10) const;
  void validate() const;
};

// Symmetric (hyper)SBM in the (a, b) parametrization: M(i..i)=a, M=b otherwise.
// For k=2 this is the classical SBM with d = (a+(q-1)b)/q, lambda = (a-b)/(a+(q-1)b).
HsbmSpec symmetric_sbm(int q, double a, double b, int k = 2);
double sbm_lambda(int q, double a, double b);

// Point mass p_M on the single weight function M = d * M0.
ModelSpec hsbm_to_factor_spec(const HsbmSpec& h);

struct Clause {
  int wid = 0;
  std::vector<int> vars;  // 0-based, size k
};

struct FactorGraph {
  long n = 0;
  int k = 2;
  std::vector<Clause> clauses;
  bool simple_flag = false;  // set only after verifying (H1) and (H2)
  long m() const { return static_cast<long>(clauses.size()); }
};

// (H1): k distinct variables per clause; (H2): no two clauses share the same
// variable set up to permutation.
bool is_simple(const FactorGraph& g);

using CommunityAssignment = std::vector<int>;

struct OverlapMatrix {
  int q = 0;
  std::vector<double> r;  // row-major q x q, entries sum to 1
  double operator()(int i, int j) const { return r[static_cast<size_t>(i) * q + j]; }
};

OverlapMatrix overlap_matrix(const CommunityAssignment& s1, const CommunityAssignment& s2, int q);

// A(s1,s2) = max_{permutation G} (1/q) sum_i |{v: s1_v=i, s2_v=G(i)}| / |{v: s1_v=i}|.
// Empty classes of s1 contribute 0. Exhaustive search for q <= 8, Hungarian otherwise.
double overlap_A(const CommunityAssignment& s1, const CommunityAssignment& s2, int q);
// Same with n*pi_i denominators.
double overlap_A_tilde(const CommunityAssignment& s1, const CommunityAssignment& s2,
                       const std::vector<double>& pi);

// Solves max-weight assignment on a q x q score matrix; returns the optimum value.
double assignment_max(const std::vector<double>& score, int q);

namespace tol {
inline constexpr double kProb = 1e-12;
inline constexpr double kInvariant = 1e-10;
inline constexpr long kMaxTableEntries = 1000000;  // q^k cap
}  // namespace tol

}  // namespace blocklab
