#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "blocklab/cycles.hpp"
#include "blocklab/experiment.hpp"
#include "blocklab/harness.hpp"
#include "blocklab/io.hpp"
#include "blocklab/limit_law.hpp"
#include "blocklab/oracle.hpp"
#include "blocklab/sampler.hpp"
#include "blocklab/spectral.hpp"

using nlohmann::json;

namespace {

void emit_out(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
  } else {
    std::ofstream f(out);
    if (!f) throw std::invalid_argument("cannot open output file " + out);
    f << text;
  }
}

json census_json(const blocklab::CycleCensus& c) {
  json hyper = json::object();
  for (const auto& [l, x] : c.hyper) hyper[std::to_string(l)] = x;
  json zeta = json::array();
  for (const auto& [sig, x] : c.zeta) {
    json slots = json::array();
    for (auto [s, t] : sig.slots) slots.push_back({s, t});
    zeta.push_back({{"ell", sig.ell}, {"psis", sig.psis}, {"slots", slots}, {"count", x}});
  }
  return {{"kn", c.K}, {"hyper", hyper}, {"zeta", zeta}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blocklab: planted factor models, cycle statistics, and detection tests"};
  app.require_subcommand(1);

  uint64_t seed_master = 0, seed_stream = 0;
  int workers = 0;
  std::string out;
  app.add_option("--seed", seed_master, "master seed")->capture_default_str();
  app.add_option("--seed-stream", seed_stream, "seed stream id")->capture_default_str();
  app.add_option("--workers", workers, "worker threads (0: BLOCKLAB_WORKERS or hardware)");
  app.add_option("--out", out, "output file (default: stdout)");

  std::string spec_path, graph_path, config_path, result_path, kind;
  long n = 1000, m = -1, samples = 200, calib = 0;
  double alpha = 0.05;
  int kn = 0;
  bool planted = false, hsbm = false, simple = false;
  long u = 1, v = 2;
  std::string mode;

  auto* c_sample = app.add_subcommand("sample", "draw a graph from the null/planted/HSBM law");
  c_sample->add_option("--spec", spec_path, "model spec JSON")->required();
  c_sample->add_option("--n", n, "number of variables")->required();
  c_sample->add_option("--m", m, "clause count (default: Poisson(d n / k))");
  c_sample->add_flag("--planted", planted, "planted factor model");
  c_sample->add_flag("--hsbm", hsbm, "HSBM hyperedge law (tensor-form spec)");
  c_sample->add_flag("--simple", simple, "condition on (H1)+(H2) by rejection");

  auto* c_thresh = app.add_subcommand("thresholds", "KS threshold and spectral summary");
  c_thresh->add_option("--spec", spec_path)->required();

  auto* c_cycles = app.add_subcommand("cycles", "cycle census of a graph file");
  c_cycles->add_option("--graph", graph_path)->required();
  c_cycles->add_option("--kn", kn, "max cycle length (default: K_n rule)");

  auto* c_power = app.add_subcommand("power", "limit-law power curve beta*(alpha)");
  c_power->add_option("--spec", spec_path)->required();
  c_power->add_option("--alpha", alpha)->capture_default_str();
  c_power->add_option("--samples", samples)->capture_default_str();

  auto* c_test = app.add_subcommand("cycle-test", "calibrated cycle-count test: size and power");
  c_test->add_option("--spec", spec_path)->required();
  c_test->add_option("--n", n)->required();
  c_test->add_option("--alpha", alpha)->capture_default_str();
  c_test->add_option("--samples", samples, "evaluation draws per arm")->capture_default_str();
  c_test->add_option("--calib", calib, "calibration draws (default: samples)");
  c_test->add_option("--kn", kn, "cycle length cap (default: K_n rule)");

  auto* c_oracle = app.add_subcommand("oracle", "exact likelihood ratio and posterior (small n)");
  c_oracle->add_option("--spec", spec_path)->required();
  c_oracle->add_option("--graph", graph_path)->required();
  c_oracle->add_option("--mode", mode, "report: likelihood (default) | two-point")
      ->capture_default_str();
  c_oracle->add_option("--u", u, "first vertex (1-based, two-point mode)");
  c_oracle->add_option("--v", v, "second vertex (1-based, two-point mode)");

  auto* c_probe = app.add_subcommand("equiv-probe", "exact-oracle weak-recovery diagnostics");
  c_probe->add_option("--spec", spec_path)->required();
  c_probe->add_option("--n", n)->required();
  c_probe->add_option("--samples", samples)->capture_default_str();

  auto* c_run = app.add_subcommand("run", "execute an experiment config over its grid");
  c_run->add_option("--config", config_path)->required();

  auto* c_emit = app.add_subcommand("emit", "plot-ready CSV from a result file");
  c_emit->add_option("--result", result_path)->required();
  c_emit->add_option("--kind", kind, "power-curve | beta-star | cycle-check")->required();

  for (auto* sub : app.get_subcommands([](CLI::App*) { return true; })) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  blocklab::Seed seed{seed_master, seed_stream};
  try {
    if (*c_sample) {
      auto loaded = blocklab::load_spec_file(spec_path);
      blocklab::Rng rng(seed);
      blocklab::FactorGraph g;
      blocklab::CommunityAssignment sigma;
      if (hsbm) {
        if (!loaded.hsbm) throw std::invalid_argument("sample --hsbm: tensor-form spec required");
        std::tie(sigma, g) = blocklab::sample_hsbm(*loaded.hsbm, n, rng);
      } else if (simple) {
        auto cs = blocklab::condition_simple(loaded.spec, n, rng, planted);
        sigma = cs.sigma;
        g = cs.graph;
      } else if (planted) {
        if (m >= 0) {
          sigma.resize(n);
          for (long i = 0; i < n; ++i) {
            double uu = rng.uniform(), acc = 0;
            int c = loaded.spec.q - 1;
            for (int j = 0; j < loaded.spec.q; ++j) {
              acc += loaded.spec.pi[j];
              if (uu < acc) { c = j; break; }
            }
            sigma[i] = c;
          }
          g = blocklab::sample_planted_given(loaded.spec, sigma, m, rng);
        } else {
          std::tie(sigma, g) = blocklab::sample_poisson_planted(loaded.spec, n, rng);
        }
      } else {
        g = m >= 0 ? blocklab::sample_null(loaded.spec, n, m, rng)
                   : blocklab::sample_poisson_null(loaded.spec, n, rng);
      }
      std::string text = blocklab::factor_graph_to_text(g);
      if (!sigma.empty())
        text += "# sigma " + blocklab::assignment_to_json(sigma).dump() + "\n";
      emit_out(text, out);
      return 0;
    }

    if (*c_thresh) {
      auto loaded = blocklab::load_spec_file(spec_path);
      auto s = blocklab::ks_threshold(loaded.spec);
      json j{{"lambda_ks", s.lambda_ks},
             {"d_ks", s.d_ks},
             {"d", loaded.spec.d},
             {"xi_star_eigs", s.xi_star_eigs},
             {"sym_ok", s.sym_ok},
             {"sym_violation", s.sym_violation}};
      if (loaded.hsbm) {
        j["d_ks_hsbm"] = blocklab::hsbm_d_ks(*loaded.hsbm);
        j["alphas"] = blocklab::hsbm_alphas(*loaded.hsbm, 8);
        if (loaded.sbm_a && loaded.sbm_b)
          j["lambda"] = blocklab::sbm_lambda(loaded.hsbm->q, *loaded.sbm_a, *loaded.sbm_b);
      }
      emit_out(j.dump(2), out);
      return 0;
    }

    if (*c_cycles) {
      blocklab::FactorGraph g = blocklab::read_factor_graph(graph_path);
      if (!g.simple_flag) throw std::invalid_argument("cycles: graph is not simple");
      int K = kn > 0 ? kn : blocklab::default_kn(g.n);
      json j = census_json(blocklab::count_zeta_cycles(g, K));
      j["hyper"] = census_json(blocklab::count_hyper_cycles(g, K))["hyper"];
      emit_out(j.dump(2), out);
      return 0;
    }

    if (*c_power) {
      auto loaded = blocklab::load_spec_file(spec_path);
      if (!loaded.hsbm) throw std::invalid_argument("power: tensor-form spec required");
      auto cfg = blocklab::make_limit_law(*loaded.hsbm);
      auto pe = blocklab::optimal_power(cfg, alpha, samples, seed, workers);
      json j{{"alpha", alpha},
             {"c_alpha", pe.c_alpha},
             {"beta_star", pe.beta_null_weighted},
             {"beta_star_ci", {pe.ci_lo, pe.ci_hi}},
             {"beta_planted", pe.beta_planted},
             {"beta_planted_ci", {pe.ci2_lo, pe.ci2_hi}},
             {"samples", pe.samples},
             {"atomic_regime", pe.atomic_regime}};
      if (!pe.support_head.empty()) j["support_head"] = pe.support_head;
      emit_out(j.dump(2), out);
      return 0;
    }

    if (*c_test) {
      auto loaded = blocklab::load_spec_file(spec_path);
      if (!loaded.hsbm) throw std::invalid_argument("cycle-test: tensor-form spec required");
      int K = kn > 0 ? kn : blocklab::default_kn(n);
      auto rep = blocklab::power_experiment(*loaded.hsbm, n, alpha, K,
                                            calib > 0 ? calib : samples, samples, seed, workers);
      json j{{"alpha", rep.alpha},
             {"n", rep.n},
             {"kn", rep.K_n},
             {"c_threshold", rep.c_threshold},
             {"empirical_size", rep.empirical_size},
             {"empirical_power", rep.empirical_power},
             {"calib_samples", rep.calib_samples},
             {"eval_samples", rep.eval_samples}};
      if (!std::isnan(rep.beta_star_reference)) {
        j["beta_star_reference"] = rep.beta_star_reference;
        j["beta_star_ci"] = {rep.beta_star_lo, rep.beta_star_hi};
      }
      if (!rep.warning.empty()) j["warning"] = rep.warning;
      emit_out(j.dump(2), out);
      return 0;
    }

    if (*c_oracle) {
      auto loaded = blocklab::load_spec_file(spec_path);
      blocklab::FactorGraph g = blocklab::read_factor_graph(graph_path);
      if (mode == "two-point") {
        auto m2 = blocklab::two_point(loaded.spec, g, u - 1, v - 1);
        json rows = json::array();
        for (int i = 0; i < m2.rows(); ++i) {
          json row = json::array();
          for (int jj = 0; jj < m2.cols(); ++jj) row.push_back(m2(i, jj));
          rows.push_back(row);
        }
        emit_out(json{{"u", u}, {"v", v}, {"joint", rows}}.dump(2), out);
      } else {
        double logl = blocklab::exact_log_likelihood(loaded.spec, g);
        emit_out(json{{"log_likelihood", logl}, {"likelihood", std::exp(logl)}}.dump(2), out);
      }
      return 0;
    }

    if (*c_probe) {
      auto loaded = blocklab::load_spec_file(spec_path);
      auto rep = blocklab::weak_recovery_probe(loaded.spec, n, samples, seed, {}, workers);
      json j{{"d", rep.d},
             {"n", rep.n},
             {"samples", rep.samples},
             {"overlap_dev", rep.overlap_dev},
             {"overlap_dev_se", rep.overlap_dev_se},
             {"estimator_A", rep.estimator_A},
             {"estimator_A_se", rep.estimator_A_se},
             {"baseline_A", rep.baseline_A},
             {"baseline_A_se", rep.baseline_A_se},
             {"two_point_dev", rep.two_point_dev},
             {"two_point_dev_se", rep.two_point_dev_se}};
      emit_out(j.dump(2), out);
      return 0;
    }

    if (*c_run) {
      auto cfg = blocklab::load_experiment_config_file(config_path);
      if (workers > 0) cfg.workers = workers;
      if (seed_master != 0 || seed_stream != 0) cfg.seed = seed;
      if (!out.empty()) cfg.out_dir = out;
      auto res = blocklab::run(cfg);
      std::string path = blocklab::persist(cfg, res);
      std::cerr << "wrote " << path << "\n";
      return res.failed_cells > 0 ? 3 : 0;
    }

    if (*c_emit) {
      std::ifstream in(result_path);
      if (!in) throw std::invalid_argument("cannot open " + result_path);
      json doc;
      in >> doc;
      blocklab::ExperimentResult res;
      res.records = doc.at("records");
      res.metadata = doc.value("metadata", json::object());
      emit_out(blocklab::emit_plot_data(res, kind), out);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
