#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "scsparc/errors.hpp"
#include "scsparc/sim.hpp"

using namespace scsparc;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.channel_kind = "awgn";
  cfg.channel_param = 0.05;
  cfg.L = 32;
  cfg.M = 8;
  cfg.gamma = 16;
  cfg.omega = 1;
  cfg.rho = 0.05;
  cfg.rate.mode = "ratio";
  cfg.rate.value = 0.25;
  cfg.trials = 3;
  cfg.master_seed = 11;
  cfg.se_n_mc = 5000;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config json round trip and validation") {
  ExperimentConfig cfg = ExperimentConfig::from_json(R"({
    "channel": {"kind": "bec", "param": 0.2},
    "code": {"L": 64, "M": 16, "gamma": 16, "omega": 1, "rho": 0.03,
             "rate": {"mode": "ratio", "value": 0.6}},
    "trials": 7, "master_seed": 99,
    "sweep": {"axis": "n", "values": [100, 200]}
  })");
  CHECK(cfg.channel_kind == "bec");
  CHECK(cfg.L == 64);
  CHECK(cfg.trials == 7);
  CHECK(cfg.sweep_axis == "n");
  ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());

  CHECK_THROWS_AS(ExperimentConfig::from_json("{nope"), ParamError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"trials": 0})"), ParamError);
  CHECK_THROWS_AS(
      ExperimentConfig::from_json(R"({"sweep": {"axis": "n", "values": []}})"), ParamError);
  CHECK_THROWS_AS(
      ExperimentConfig::from_json(R"({"sweep": {"axis": "n", "values": [3, 2]}})"), ParamError);
}

TEST_CASE("experiment runs and aggregates") {
  ExperimentConfig cfg = small_config();
  ExperimentReport rep = run_experiment(cfg);
  REQUIRE(rep.points.size() == 1);
  const auto& point = rep.points[0];
  CHECK(point.trials.size() == 3);
  CHECK(point.p_hat >= 0.0);
  CHECK(point.wilson_lo <= point.p_hat);
  CHECK(point.wilson_hi >= point.p_hat);
  CHECK(point.rate_eff == doctest::Approx(point.params.R_nats * 0.5));  // 8w/gamma = 1/2
  for (const auto& tr : point.trials) CHECK(tr.iters >= 1);

  auto devs = compare_se(rep);
  REQUIRE(devs.size() == 1);
  for (const auto& row : devs[0]) {
    CHECK(row.dev_mean >= 0.0);
    CHECK(row.dev_max >= row.dev_mean);
  }
}

TEST_CASE("outputs are byte-identical across runs and worker counts") {
  namespace fs = std::filesystem;
  ExperimentConfig cfg = small_config();
  fs::path dir1 = fs::temp_directory_path() / "scsparc_test_out1";
  fs::path dir2 = fs::temp_directory_path() / "scsparc_test_out2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);

  setenv("SC_SPARC_THREADS", "1", 1);
  write_outputs(run_experiment(cfg), dir1.string());
  setenv("SC_SPARC_THREADS", "3", 1);
  write_outputs(run_experiment(cfg), dir2.string());
  unsetenv("SC_SPARC_THREADS");

  for (const char* name : {"results.csv", "summary.json", "se_trajectory.csv"}) {
    CHECK(slurp(dir1 / name) == slurp(dir2 / name));
    CHECK(!slurp(dir1 / name).empty());
  }
  // provenance fields present in the summary
  std::string summary = slurp(dir1 / "summary.json");
  CHECK(summary.find(kVersion) != std::string::npos);
  CHECK(summary.find("\"config\"") != std::string::npos);
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("sweep over n holds the rate ratio fixed") {
  ExperimentConfig cfg = small_config();
  cfg.sweep_axis = "n";
  cfg.trials = 1;
  Channel ch = Channel::from_config(cfg.channel_kind, cfg.channel_param);
  // two sweep points with doubled block length
  SweepPointResult a = resolve_sweep_point(cfg, ch, 320, true);
  SweepPointResult b = resolve_sweep_point(cfg, ch, 640, true);
  CHECK(b.params.n == 2 * a.params.n);
  CHECK(b.params.L == 2 * a.params.L);
  CHECK(a.params.R_nats == doctest::Approx(b.params.R_nats).epsilon(1e-3));
}

TEST_CASE("single decode emits per-iteration records") {
  ExperimentConfig cfg = small_config();
  DecodeResult res = run_single_decode(cfg);
  const TrialRecord& tr = res.point.trials.front();
  CHECK(!tr.history.empty());
  for (size_t i = 0; i < tr.history.size(); ++i) {
    CHECK(tr.history[i].t == static_cast<int>(i));
    CHECK(tr.history[i].mse_empirical >= 0.0);
  }
}

TEST_CASE("csv writers") {
  BaseMatrix w = build_base_matrix(4, 1, 0.25);
  std::string csv = base_matrix_csv(w);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  std::string hdr = base_matrix_header_json(w);
  CHECK(hdr.find("row_sums") != std::string::npos);

  ExperimentConfig cfg = small_config();
  cfg.trials = 2;
  ExperimentReport rep = run_experiment(cfg);
  std::string results = results_csv(rep);
  CHECK(std::count(results.begin(), results.end(), '\n') == 3);  // header + 2 trials
  std::string se = se_trajectory_csv(rep.points[0].se);
  CHECK(se.rfind("t,c,psi,tau,r,sigma,phi\n", 0) == 0);
}
