#include "blocklab/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "blocklab/rng.hpp"

namespace blocklab {

Eigen::MatrixXd compute_phi_st(const WeightFunction& psi, const ModelSpec& spec, int s, int t) {
  if (s < 1 || t < 1 || s > spec.k || t > spec.k || s == t)
    throw std::invalid_argument("compute_phi_st: slots must be distinct and in 1..k");
  int q = spec.q, k = spec.k;
  double xi = spec.xi();
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(q, q);
  long tsz = static_cast<long>(psi.table.size());
  std::vector<int> colors(k);
  for (long idx = 0; idx < tsz; ++idx) {
    long rest = idx;
    for (int s2 = k - 1; s2 >= 0; --s2) {
      colors[s2] = static_cast<int>(rest % q);
      rest /= q;
    }
    double pr = 1;
    for (int s2 = 0; s2 < k; ++s2)
      if (s2 != s - 1 && s2 != t - 1) pr *= spec.pi[colors[s2]];
    // E[psi | sigma_s = i, sigma_t = j] accumulates over interior coordinates
    phi(colors[s - 1], colors[t - 1]) += psi.table[idx] * pr;
  }
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) phi(i, j) *= spec.pi[j] / xi;
  return phi;
}

Eigen::MatrixXd compute_phi(const WeightFunction& psi, const ModelSpec& spec) {
  return compute_phi_st(psi, spec, 1, 2);
}

std::pair<bool, double> check_sym(const ModelSpec& spec, double tol_) {
  double xi = spec.xi();
  int q = spec.q, k = spec.k;
  double worst = 0;
  std::vector<int> colors(k);
  for (const auto& psi : spec.weights.psis) {
    for (int s = 0; s < k; ++s) {
      std::vector<double> cond(q, 0.0);
      long tsz = static_cast<long>(psi.table.size());
      for (long idx = 0; idx < tsz; ++idx) {
        long rest = idx;
        for (int s2 = k - 1; s2 >= 0; --s2) {
          colors[s2] = static_cast<int>(rest % q);
          rest /= q;
        }
        double pr = 1;
        for (int s2 = 0; s2 < k; ++s2)
          if (s2 != s) pr *= spec.pi[colors[s2]];
        cond[colors[s]] += psi.table[idx] * pr;
      }
      for (int tau = 0; tau < q; ++tau) worst = std::max(worst, std::fabs(cond[tau] - xi));
    }
  }
  return {worst <= tol_, worst};
}

SpectralSummary ks_threshold(const ModelSpec& spec) {
  int q = spec.q;
  SpectralSummary out;
  auto [ok, viol] = check_sym(spec);
  out.sym_ok = ok;
  out.sym_violation = viol;

  Eigen::VectorXd pi(q);
  for (int i = 0; i < q; ++i) pi(i) = spec.pi[i];
  Eigen::MatrixXd one_pit = Eigen::VectorXd::Ones(q) * pi.transpose();

  out.phi = Eigen::MatrixXd::Zero(q, q);
  out.xi_star = Eigen::MatrixXd::Zero(q * q, q * q);
  for (size_t w = 0; w < spec.weights.psis.size(); ++w) {
    Eigen::MatrixXd phi = compute_phi(spec.weights.psis[w], spec);
    out.phi_psi.push_back(phi);
    out.phi += spec.weights.probs[w] * phi;
    Eigen::MatrixXd c = phi - one_pit;
    // Kronecker product c (x) c
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        out.xi_star.block(i * q, j * q, q, q) += spec.weights.probs[w] * c(i, j) * c;
  }

  // self-adjoint under <x,y>_pi with weight diag(pi) (x) diag(pi); conjugate by
  // the square root to use a symmetric eigensolver
  Eigen::VectorXd w2(q * q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) w2(i * q + j) = std::sqrt(spec.pi[i] * spec.pi[j]);
  Eigen::MatrixXd s = w2.asDiagonal() * out.xi_star * w2.cwiseInverse().asDiagonal();
  Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  out.xi_star_eigs.assign(es.eigenvalues().data(), es.eigenvalues().data() + q * q);
  out.lambda_ks = 0;
  for (double e : out.xi_star_eigs) out.lambda_ks = std::max(out.lambda_ks, std::fabs(e));
  out.d_ks = out.lambda_ks > 1e-14
                 ? 1.0 / ((spec.k - 1) * out.lambda_ks)
                 : std::numeric_limits<double>::infinity();
  return out;
}

Eigen::MatrixXd hsbm_b_matrix(const HsbmSpec& h) {
  int q = h.q, k = h.k;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(q, q);
  long tsz = static_cast<long>(h.m0.size());
  std::vector<int> colors(k);
  for (long idx = 0; idx < tsz; ++idx) {
    long rest = idx;
    for (int s2 = k - 1; s2 >= 0; --s2) {
      colors[s2] = static_cast<int>(rest % q);
      rest /= q;
    }
    double pr = 1;
    for (int s2 = 0; s2 < k - 2; ++s2) pr *= h.pi[colors[s2]];
    b(colors[k - 2], colors[k - 1]) += h.m0[idx] * pr * h.pi[colors[k - 1]];
  }
  return b;
}

std::vector<double> hsbm_alphas(const HsbmSpec& h, int L) {
  Eigen::MatrixXd b = hsbm_b_matrix(h);
  int q = h.q;
  std::vector<double> alphas(L + 1, 0.0);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(q, q);
  Eigen::EigenSolver<Eigen::MatrixXd> es(b);
  for (int l = 1; l <= L; ++l) {
    power = power * b;
    alphas[l] = power.trace() - 1.0;
    // eigenvalue route must agree
    std::complex<double> acc = 0;
    for (int i = 0; i < q; ++i) acc += std::pow(es.eigenvalues()(i), l);
    if (std::fabs(acc.real() - 1.0 - alphas[l]) > 1e-8 || std::fabs(acc.imag()) > 1e-8)
      throw std::runtime_error("hsbm_alphas: trace/eigenvalue disagreement");
  }
  return alphas;
}

double hsbm_d_ks(const HsbmSpec& h) {
  Eigen::MatrixXd b = hsbm_b_matrix(h);
  Eigen::EigenSolver<Eigen::MatrixXd> es(b);
  // second largest modulus; the Perron eigenvalue is 1 when the degree condition holds
  std::vector<double> mods;
  for (int i = 0; i < h.q; ++i) mods.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(mods.begin(), mods.end(), std::greater<>());
  double l2 = mods.size() > 1 ? mods[1] : 0.0;
  return l2 > 1e-14 ? 1.0 / (l2 * l2) : std::numeric_limits<double>::infinity();
}

namespace {

double f_of_r_weights(const WeightPrior& weights, const std::vector<double>& pi_unused, int q,
                      int k, const Eigen::MatrixXd& R) {
  (void)pi_unused;
  long tsz = 1;
  for (int i = 0; i < k; ++i) tsz *= q;
  if (tsz > 3163) throw std::invalid_argument("f_of_r: q^k too large for the q^{2k} sum");
  double total = 0;
  std::vector<int> cs(k), ct(k);
  for (size_t w = 0; w < weights.psis.size(); ++w) {
    const auto& tab = weights.psis[w].table;
    double acc = 0;
    for (long a = 0; a < tsz; ++a) {
      long rest = a;
      for (int s = k - 1; s >= 0; --s) {
        cs[s] = static_cast<int>(rest % q);
        rest /= q;
      }
      for (long b = 0; b < tsz; ++b) {
        rest = b;
        for (int s = k - 1; s >= 0; --s) {
          ct[s] = static_cast<int>(rest % q);
          rest /= q;
        }
        double pr = 1;
        for (int s = 0; s < k; ++s) pr *= R(cs[s], ct[s]);
        acc += tab[a] * tab[b] * pr;
      }
    }
    total += weights.probs[w] * acc;
  }
  return total;
}

void check_r_pi(const Eigen::MatrixXd& R, const std::vector<double>& pi, double tol_) {
  int q = static_cast<int>(pi.size());
  if (R.rows() != q || R.cols() != q) throw std::invalid_argument("f_of_r: R must be q x q");
  for (int i = 0; i < q; ++i) {
    if (std::fabs(R.row(i).sum() - pi[i]) > tol_ || std::fabs(R.col(i).sum() - pi[i]) > tol_)
      throw std::invalid_argument("f_of_r: R outside R_pi (margin mismatch)");
    for (int j = 0; j < q; ++j)
      if (R(i, j) < -tol_) throw std::invalid_argument("f_of_r: R has negative entries");
  }
}

// iterative proportional fitting of a positive matrix onto margins pi, pi
Eigen::MatrixXd ipf(Eigen::MatrixXd R, const std::vector<double>& pi, int iters = 400) {
  int q = static_cast<int>(pi.size());
  for (int it = 0; it < iters; ++it) {
    for (int i = 0; i < q; ++i) {
      double s = R.row(i).sum();
      if (s > 0) R.row(i) *= pi[i] / s;
    }
    for (int j = 0; j < q; ++j) {
      double s = R.col(j).sum();
      if (s > 0) R.col(j) *= pi[j] / s;
    }
  }
  return R;
}

}  // namespace

double f_of_r(const ModelSpec& spec, const Eigen::MatrixXd& R) {
  check_r_pi(R, spec.pi, 1e-8);
  return f_of_r_weights(spec.weights, spec.pi, spec.q, spec.k, R);
}

double f_of_r(const HsbmSpec& h, const Eigen::MatrixXd& R) {
  check_r_pi(R, h.pi, 1e-8);
  WeightPrior wp;
  WeightFunction psi;
  psi.k = h.k;
  psi.q = h.q;
  psi.table = h.m0;
  wp.psis = {psi};
  wp.probs = {1.0};
  return f_of_r_weights(wp, h.pi, h.q, h.k, R);
}

MinVerdict check_min(const ModelSpec& spec, int starts, uint64_t seed) {
  int q = spec.q;
  Eigen::VectorXd piv(q);
  for (int i = 0; i < q; ++i) piv(i) = spec.pi[i];
  Eigen::MatrixXd pi_outer = piv * piv.transpose();

  MinVerdict out;
  out.f_pi = f_of_r_weights(spec.weights, spec.pi, q, spec.k, pi_outer);
  out.best_f = out.f_pi;
  out.best_r = pi_outer;

  auto consider = [&](const Eigen::MatrixXd& R) {
    double f = f_of_r_weights(spec.weights, spec.pi, q, spec.k, R);
    if (f < out.best_f) {
      out.best_f = f;
      out.best_r = R;
    }
  };

  Rng rng(seed, 0xC3ECull);
  // coarse 1-D scan: for q = 2 the polytope R_pi is a segment
  if (q == 2) {
    double p0 = spec.pi[0];
    double lo = std::max(0.0, 2 * p0 - 1), hi = p0;
    for (int t = 0; t <= 2000; ++t) {
      double r = lo + (hi - lo) * t / 2000.0;
      Eigen::MatrixXd R(2, 2);
      R << r, p0 - r, p0 - r, 1 - 2 * p0 + r;
      if (R.minCoeff() < 0) continue;
      consider(R);
    }
  } else if (q == 3) {
    // coarse random lattice over R_pi via IPF of positive seeds
    for (int t = 0; t < 2000; ++t) {
      Eigen::MatrixXd R(q, q);
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) R(i, j) = rng.uniform_pos();
      consider(ipf(R, spec.pi));
    }
  }

  // multi-start projected gradient descent (numeric gradient, IPF re-projection)
  for (int s0 = 0; s0 < starts; ++s0) {
    Eigen::MatrixXd R(q, q);
    if (s0 == 0) {
      R = pi_outer;
    } else {
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) R(i, j) = rng.uniform_pos();
      R = ipf(R, spec.pi);
    }
    double step = 0.05;
    double f = f_of_r_weights(spec.weights, spec.pi, q, spec.k, R);
    for (int it = 0; it < 200; ++it) {
      Eigen::MatrixXd grad(q, q);
      double h2 = 1e-6;
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
          Eigen::MatrixXd Rp = R;
          Rp(i, j) += h2;
          grad(i, j) = (f_of_r_weights(spec.weights, spec.pi, q, spec.k, Rp) - f) / h2;
        }
      Eigen::MatrixXd Rn = R - step * grad;
      Rn = Rn.cwiseMax(1e-12);
      Rn = ipf(Rn, spec.pi, 60);
      double fn = f_of_r_weights(spec.weights, spec.pi, q, spec.k, Rn);
      if (fn < f - 1e-14) {
        R = Rn;
        f = fn;
        step *= 1.2;
      } else {
        step *= 0.5;
        if (step < 1e-10) break;
      }
    }
    consider(R);
  }

  out.min_at_pi_outer =
      out.best_f >= out.f_pi - 1e-9 || (out.best_r - pi_outer).cwiseAbs().maxCoeff() < 1e-4;
  return out;
}

double i0(int q, double lambda) {
  if (q < 2) throw std::invalid_argument("i0: q >= 2");
  if (!(lambda > -1.0 / (q - 1)) || !(lambda < 1.0))
    throw std::invalid_argument("i0: lambda must lie in (-1/(q-1), 1)");
  if (lambda == 0) return 0;
  double on = 1 + (q - 1) * lambda;
  return on / q * std::log(on) + (q - 1) * (1 - lambda) / q * std::log(1 - lambda);
}

}  // namespace blocklab
