#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "blocklab/io.hpp"
#include "blocklab/model.hpp"

namespace testutil {

inline blocklab::HsbmSpec sbm51() { return blocklab::symmetric_sbm(2, 5, 1); }
inline blocklab::HsbmSpec sbm32() { return blocklab::symmetric_sbm(2, 3, 2); }
inline blocklab::ModelSpec sbm51_factor() { return blocklab::hsbm_to_factor_spec(sbm51()); }
inline blocklab::ModelSpec sbm32_factor() { return blocklab::hsbm_to_factor_spec(sbm32()); }

struct Moments {
  double mean = 0, var = 0, se = 0;
  long n = 0;
};

inline Moments moments(const std::vector<double>& v) {
  Moments m;
  m.n = static_cast<long>(v.size());
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / m.n;
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var = m.n > 1 ? m.var / (m.n - 1) : 0;
  m.se = std::sqrt(m.var / m.n);
  return m;
}

// edges given as 0-based pairs, single weight id 0
inline blocklab::FactorGraph graph2(long n, std::vector<std::pair<int, int>> edges) {
  blocklab::FactorGraph g;
  g.n = n;
  g.k = 2;
  for (auto [u, v] : edges) g.clauses.push_back({0, {u, v}});
  g.simple_flag = blocklab::is_simple(g);
  return g;
}

// Spearman rank correlation, no tie handling (callers pass distinct values)
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (size_t i = 0; i < v.size(); ++i)
      for (size_t j = 0; j < v.size(); ++j)
        if (v[j] < v[i]) r[i] += 1;
    return r;
  };
  auto rx = ranks(x), ry = ranks(y);
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double num = 0, dx = 0, dy = 0;
  for (size_t i = 0; i < rx.size(); ++i) {
    num += (rx[i] - mx) * (ry[i] - my);
    dx += (rx[i] - mx) * (rx[i] - mx);
    dy += (ry[i] - my) * (ry[i] - my);
  }
  return num / std::sqrt(dx * dy);
}

}  // namespace testutil
