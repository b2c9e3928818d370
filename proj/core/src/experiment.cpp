#include "blocklab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "blocklab/cycles.hpp"
#include "blocklab/harness.hpp"
#include "blocklab/parallel.hpp"
#include "blocklab/sampler.hpp"
#include "blocklab/spectral.hpp"

namespace blocklab {

namespace {

std::vector<double> num_list(const nlohmann::json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  if (j.at(key).is_array())
    for (const auto& v : j.at(key)) out.push_back(v.get<double>());
  else
    out.push_back(j.at(key).get<double>());
  return out;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string iso_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%S", std::gmtime(&t));
  return buf;
}

nlohmann::json seed_json(Seed s) {
  return {{"master", s.master}, {"stream", s.stream}};
}

nlohmann::json report_json(const TestReport& r) {
  nlohmann::json j{{"alpha", r.alpha},
                   {"c_threshold", r.c_threshold},
                   {"randomize_prob", r.randomize_prob},
                   {"empirical_size", r.empirical_size},
                   {"empirical_power", r.empirical_power},
                   {"beta_star_planted", r.beta_star_planted},
                   {"n", r.n},
                   {"kn", r.K_n},
                   {"calib_samples", r.calib_samples},
                   {"eval_samples", r.eval_samples},
                   {"randomized", r.randomized},
                   {"seed", seed_json(r.seed)}};
  if (std::isnan(r.beta_star_reference)) {
    j["beta_star_reference"] = nullptr;
  } else {
    j["beta_star_reference"] = r.beta_star_reference;
    j["beta_star_lo"] = r.beta_star_lo;
    j["beta_star_hi"] = r.beta_star_hi;
  }
  if (!r.warning.empty()) j["warning"] = r.warning;
  return j;
}

nlohmann::json probe_json(const ProbeReport& r) {
  return {{"d", r.d},
          {"n", r.n},
          {"samples", r.samples},
          {"overlap_dev", r.overlap_dev},
          {"overlap_dev_se", r.overlap_dev_se},
          {"estimator_A", r.estimator_A},
          {"estimator_A_se", r.estimator_A_se},
          {"baseline_A", r.baseline_A},
          {"baseline_A_se", r.baseline_A_se},
          {"two_point_dev", r.two_point_dev},
          {"two_point_dev_se", r.two_point_dev_se}};
}

}  // namespace

ExperimentConfig load_experiment_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (!j.contains("operation")) throw std::invalid_argument("config: missing operation");
  cfg.operation = j.at("operation").get<std::string>();
  static const char* ops[] = {"thresholds", "cycles", "power", "cycle-test", "equiv-probe"};
  bool known = false;
  for (const char* op : ops) known = known || cfg.operation == op;
  if (!known) throw std::invalid_argument("config: unknown operation " + cfg.operation);

  if (j.contains("spec"))
    cfg.model = load_spec_file(j.at("spec").get<std::string>());
  else if (j.contains("model"))
    cfg.model = load_spec_json(j.at("model"));
  else
    throw std::invalid_argument("config: need spec (path) or model (inline)");

  for (double v : num_list(j, "n")) cfg.n_grid.push_back(static_cast<long>(v));
  cfg.d_grid = num_list(j, "d");
  cfg.alpha_grid = num_list(j, "alpha");
  if (cfg.operation != "thresholds" && cfg.n_grid.empty())
    throw std::invalid_argument("config: empty n grid");
  if (cfg.alpha_grid.empty()) cfg.alpha_grid.push_back(0.05);

  cfg.samples = j.value("samples", cfg.samples);
  cfg.calib_samples = j.value("calib_samples", cfg.samples);
  cfg.eval_samples = j.value("eval_samples", cfg.samples);
  cfg.kn = j.value("kn", 0);
  cfg.workers = j.value("workers", 0);
  cfg.out_dir = j.value("out_dir", std::string("."));
  if (j.contains("seed")) {
    if (j.at("seed").is_object()) {
      cfg.seed.master = j.at("seed").value("master", 0ull);
      cfg.seed.stream = j.at("seed").value("stream", 0ull);
    } else {
      cfg.seed.master = j.at("seed").get<uint64_t>();
    }
  }
  if (cfg.samples < 1 || cfg.calib_samples < 1 || cfg.eval_samples < 1)
    throw std::invalid_argument("config: sample budgets must be positive");
  return cfg;
}

ExperimentConfig load_experiment_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return load_experiment_config(j);
}

namespace {

nlohmann::json config_canonical(const ExperimentConfig& cfg) {
  nlohmann::json j{{"operation", cfg.operation},
                   {"n", cfg.n_grid},
                   {"d", cfg.d_grid},
                   {"alpha", cfg.alpha_grid},
                   {"samples", cfg.samples},
                   {"calib_samples", cfg.calib_samples},
                   {"eval_samples", cfg.eval_samples},
                   {"kn", cfg.kn},
                   {"seed", seed_json(cfg.seed)}};
  if (cfg.model.hsbm)
    j["model"] = hsbm_spec_to_json(*cfg.model.hsbm);
  else
    j["model"] = model_spec_to_json(cfg.model.spec);
  return j;
}

// d override: rebuild from the tensor form when available so the point-mass
// weight rescales with d
void apply_d(LoadedSpec& m, double d) {
  if (m.hsbm) {
    m.hsbm->d = d;
    m.spec = hsbm_to_factor_spec(*m.hsbm);
  } else {
    m.spec.d = d;
  }
}

nlohmann::json run_cell(const ExperimentConfig& cfg, long n, double d, double alpha, Seed seed) {
  LoadedSpec m = cfg.model;
  if (d > 0) apply_d(m, d);

  if (cfg.operation == "thresholds") {
    SpectralSummary s = ks_threshold(m.spec);
    nlohmann::json j{{"lambda_ks", s.lambda_ks},
                     {"d_ks", s.d_ks},
                     {"xi_star_eigs", s.xi_star_eigs},
                     {"sym_ok", s.sym_ok},
                     {"sym_violation", s.sym_violation}};
    if (m.hsbm) {
      j["d_ks_hsbm"] = hsbm_d_ks(*m.hsbm);
      j["alphas"] = hsbm_alphas(*m.hsbm, 8);
      if (m.sbm_a && m.sbm_b)
        j["lambda"] = sbm_lambda(m.hsbm->q, *m.sbm_a, *m.sbm_b);
    }
    return j;
  }

  if (cfg.operation == "cycles") {
    if (!m.hsbm) throw std::invalid_argument("cycles: tensor-form spec required");
    int K = cfg.kn > 0 ? cfg.kn : default_kn(n);
    int lmin = 2 + (m.hsbm->k == 2 ? 1 : 0);
    std::vector<std::vector<double>> counts(cfg.samples);
    long S = cfg.samples;
    const HsbmSpec& h = *m.hsbm;
    parallel_for(S, cfg.workers, [&](long i) {
      Rng rng = Rng(seed).split(static_cast<uint64_t>(i));
      FactorGraph g = sample_er_hypergraph(n, h.d, h.k, rng);
      CycleCensus c = count_hyper_cycles(g, K);
      counts[i].assign(K + 1, 0.0);
      for (int l = lmin; l <= K; ++l) counts[i][l] = static_cast<double>(c.hyper_at(l));
    });
    nlohmann::json rows = nlohmann::json::array();
    for (int l = lmin; l <= K; ++l) {
      double mean = 0, var = 0;
      for (long i = 0; i < S; ++i) mean += counts[i][l];
      mean /= S;
      for (long i = 0; i < S; ++i) var += (counts[i][l] - mean) * (counts[i][l] - mean);
      var = S > 1 ? var / (S - 1) : 0;
      double pred = std::pow((h.k - 1) * h.d, l) / (2.0 * l);
      rows.push_back({{"ell", l},
                      {"empirical_mean", mean},
                      {"empirical_var", var},
                      {"predicted_mean", pred},
                      {"se", std::sqrt(var / S)}});
    }
    return {{"kn", K}, {"samples", S}, {"rows", rows}};
  }

  if (cfg.operation == "power" || cfg.operation == "cycle-test") {
    if (!m.hsbm) throw std::invalid_argument(cfg.operation + ": tensor-form spec required");
    int K = cfg.kn > 0 ? cfg.kn : default_kn(n);
    TestReport rep = power_experiment(*m.hsbm, n, alpha, K, cfg.calib_samples, cfg.eval_samples,
                                      seed, cfg.workers);
    return report_json(rep);
  }

  if (cfg.operation == "equiv-probe") {
    ProbeReport rep = weak_recovery_probe(m.spec, n, cfg.samples, seed, OracleBudget{},
                                          cfg.workers);
    return probe_json(rep);
  }

  throw std::invalid_argument("unknown operation " + cfg.operation);
}

}  // namespace

ExperimentResult run(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.config_digest = hex64(fnv1a(config_canonical(cfg).dump()));
  res.records = nlohmann::json::array();

  std::vector<long> ns = cfg.n_grid.empty() ? std::vector<long>{0} : cfg.n_grid;
  std::vector<double> ds = cfg.d_grid.empty() ? std::vector<double>{0} : cfg.d_grid;
  uint64_t cell = 0;
  for (long n : ns)
    for (double d : ds)
      for (double alpha : cfg.alpha_grid) {
        Seed cs = seed_for_sample(cfg.seed, cell);
        nlohmann::json rec{{"cell", cell},
                           {"n", n},
                           {"d", d > 0 ? d : (cfg.model.hsbm ? cfg.model.hsbm->d : cfg.model.spec.d)},
                           {"alpha", alpha},
                           {"seed", seed_json(cs)}};
        try {
          rec["result"] = run_cell(cfg, n, d, alpha, cs);
        } catch (const std::exception& e) {
          rec["error"] = e.what();
          ++res.failed_cells;
        }
        res.records.push_back(std::move(rec));
        ++cell;
      }

  res.metadata = {{"timestamp", iso_now()},
                  {"tool_version", "0.1.0"},
                  {"config_digest", res.config_digest},
                  {"failed_cells", res.failed_cells}};
  return res;
}

std::string persist(const ExperimentConfig& cfg, const ExperimentResult& res) {
  std::filesystem::create_directories(cfg.out_dir);
  std::string path = cfg.out_dir + "/" + cfg.operation + "-" + res.config_digest + "-" +
                     res.metadata.at("timestamp").get<std::string>() + ".json";
  std::ofstream out(path);
  out << nlohmann::json{{"records", res.records}, {"metadata", res.metadata}}.dump(2) << "\n";
  return path;
}

std::string emit_plot_data(const ExperimentResult& res, const std::string& kind) {
  std::ostringstream csv;
  if (kind == "power-curve") {
    csv << "d,power,ci_lo,ci_hi\n";
    for (const auto& rec : res.records) {
      if (!rec.contains("result")) continue;
      const auto& r = rec.at("result");
      if (!r.contains("empirical_power")) throw std::invalid_argument("emit: missing power column");
      double p = r.at("empirical_power").get<double>();
      long ne = r.at("eval_samples").get<long>();
      double se = std::sqrt(std::max(0.0, p * (1 - p) / ne));
      csv << rec.at("d").get<double>() << "," << p << "," << (p - 2 * se) << "," << (p + 2 * se)
          << "\n";
    }
    return csv.str();
  }
  if (kind == "beta-star") {
    csv << "alpha,beta_star,ci_lo,ci_hi\n";
    for (const auto& rec : res.records) {
      if (!rec.contains("result")) continue;
      const auto& r = rec.at("result");
      if (!r.contains("beta_star_reference") || r.at("beta_star_reference").is_null())
        throw std::invalid_argument("emit: missing beta_star column");
      csv << rec.at("alpha").get<double>() << "," << r.at("beta_star_reference").get<double>()
          << "," << r.at("beta_star_lo").get<double>() << "," << r.at("beta_star_hi").get<double>()
          << "\n";
    }
    return csv.str();
  }
  if (kind == "cycle-check") {
    csv << "ell,empirical_mean,predicted_mean\n";
    for (const auto& rec : res.records) {
      if (!rec.contains("result") || !rec.at("result").contains("rows"))
        throw std::invalid_argument("emit: missing cycle rows");
      for (const auto& row : rec.at("result").at("rows"))
        csv << row.at("ell").get<int>() << "," << row.at("empirical_mean").get<double>() << ","
            << row.at("predicted_mean").get<double>() << "\n";
    }
    return csv.str();
  }
  throw std::invalid_argument("emit: unknown kind " + kind);
}

}  // namespace blocklab
