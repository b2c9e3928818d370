#include <algorithm>
#include <fstream>

#include "doctest.h"

#include "blocklab/experiment.hpp"
#include "helpers.hpp"

using namespace blocklab;
using nlohmann::json;

namespace {

json base_config() {
  return json{{"operation", "cycles"},
              {"model", {{"q", 2}, {"a", 5}, {"b", 1}}},
              {"n", {120}},
              {"samples", 40},
              {"kn", 4},
              {"seed", 9}};
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(load_experiment_config(json{{"operation", "cycles"}}), std::invalid_argument);
  CHECK_THROWS_AS(load_experiment_config(json{{"operation", "nope"},
                                              {"model", {{"q", 2}, {"a", 5}, {"b", 1}}}}),
                  std::invalid_argument);
  // empty n grid rejected for sampling operations
  json j = base_config();
  j.erase("n");
  CHECK_THROWS_AS(load_experiment_config(j), std::invalid_argument);
  // thresholds-only config needs no n
  json t{{"operation", "thresholds"}, {"model", {{"q", 2}, {"a", 5}, {"b", 1}}}};
  ExperimentConfig cfg = load_experiment_config(t);
  ExperimentResult res = run(cfg);
  CHECK(res.failed_cells == 0);
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0]["result"]["d_ks"].get<double>() == doctest::Approx(2.25).epsilon(1e-9));
}

TEST_CASE("identical configs reproduce byte-identical records") {
  ExperimentConfig cfg = load_experiment_config(base_config());
  ExperimentResult a = run(cfg);
  ExperimentResult b = run(cfg);
  CHECK(a.records.dump() == b.records.dump());
  CHECK(a.config_digest == b.config_digest);
  CHECK(a.failed_cells == 0);
}

TEST_CASE("worker count never changes numerical records") {
  ExperimentConfig cfg = load_experiment_config(base_config());
  cfg.workers = 1;
  ExperimentResult one = run(cfg);
  cfg.workers = 4;
  ExperimentResult four = run(cfg);
  CHECK(one.records.dump() == four.records.dump());
}

TEST_CASE("seed changes records, and every record carries its seed") {
  ExperimentConfig cfg = load_experiment_config(base_config());
  ExperimentResult a = run(cfg);
  cfg.seed.master = 10;
  ExperimentResult b = run(cfg);
  CHECK(a.records.dump() != b.records.dump());
  for (const auto& rec : a.records) {
    CHECK(rec.contains("seed"));
    CHECK(rec.at("seed").contains("master"));
  }
}

TEST_CASE("grid runs record per-cell errors and keep going") {
  json j{{"operation", "equiv-probe"},
         {"model", {{"q", 2}, {"a", 5}, {"b", 1}}},
         {"n", {4, 40}},  // n = 40 exceeds the oracle state budget
         {"samples", 3},
         {"seed", 1}};
  ExperimentConfig cfg = load_experiment_config(j);
  ExperimentResult res = run(cfg);
  CHECK(res.failed_cells == 1);
  REQUIRE(res.records.size() == 2);
  CHECK(res.records[0].contains("result"));
  CHECK(res.records[1].contains("error"));
}

TEST_CASE("plot emission: cycle-check and power-curve columns") {
  ExperimentConfig cfg = load_experiment_config(base_config());
  ExperimentResult res = run(cfg);
  std::string csv = emit_plot_data(res, "cycle-check");
  CHECK(csv.rfind("ell,empirical_mean,predicted_mean", 0) == 0);
  // one row per cycle length 3..4
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK_THROWS(emit_plot_data(res, "power-curve"));
  CHECK_THROWS(emit_plot_data(res, "unknown-kind"));

  json p{{"operation", "cycle-test"},
         {"model", {{"q", 2}, {"a", 5}, {"b", 1}}},
         {"n", {150}},
         {"d", {2.0, 3.0}},
         {"samples", 50},
         {"kn", 3},
         {"seed", 2}};
  ExperimentResult pres = run(load_experiment_config(p));
  CHECK(pres.failed_cells == 0);
  std::string pcsv = emit_plot_data(pres, "power-curve");
  CHECK(pcsv.rfind("d,power,ci_lo,ci_hi", 0) == 0);
  CHECK(std::count(pcsv.begin(), pcsv.end(), '\n') == 3);
}

TEST_CASE("persist writes a readable result file") {
  ExperimentConfig cfg = load_experiment_config(base_config());
  cfg.out_dir = "./test_experiment_out";
  ExperimentResult res = run(cfg);
  std::string path = persist(cfg, res);
  std::ifstream in(path);
  REQUIRE(in.good());
  json doc;
  in >> doc;
  CHECK(doc.contains("records"));
  CHECK(doc.contains("metadata"));
  CHECK(doc["records"].dump() == res.records.dump());
}
