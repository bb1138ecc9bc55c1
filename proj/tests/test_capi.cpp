// Exercises the shared-library C interface end to end.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "scsparc/scsparc.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  scsparc_string_free(s);
  return out;
}

const char* kSmallConfig = R"({
  "channel": {"kind": "awgn", "param": 0.05},
  "code": {"L": 32, "M": 8, "gamma": 16, "omega": 1, "rho": 0.05,
           "rate": {"mode": "ratio", "value": 0.25}},
  "trials": 2, "master_seed": 5, "se": {"n_mc": 5000}
})";

}  // namespace

TEST_CASE("version string") {
  CHECK(std::strlen(scsparc_version()) > 0);
}

TEST_CASE("channel lifecycle and scalar calculus") {
  scsparc_channel* ch = nullptr;
  REQUIRE(scsparc_channel_create("awgn", 1.0, &ch) == SCSPARC_OK);
  double cap = 0.0;
  CHECK(scsparc_channel_capacity(ch, &cap) == SCSPARC_OK);
  CHECK(cap == doctest::Approx(0.5 * std::log(2.0)).epsilon(2e-3));
  double f = 0.0;
  CHECK(scsparc_channel_f_out(ch, 0.5, &f) == SCSPARC_OK);
  CHECK(f == doctest::Approx(1.0 / 1.5));
  double g = 0.0;
  CHECK(scsparc_channel_g_out(ch, 0.2, 1.0, 0.5, &g) == SCSPARC_OK);
  CHECK(g == doctest::Approx(0.8 / 1.5));
  double psi0 = 0.0, psi1 = 0.0;
  CHECK(scsparc_channel_psi_out(ch, 0.0, &psi0) == SCSPARC_OK);
  CHECK(scsparc_channel_psi_out(ch, 1.0, &psi1) == SCSPARC_OK);
  CHECK(psi0 - psi1 == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-4));
  double ent = 0.0;
  CHECK(scsparc_channel_capacity_entropy(ch, &ent) == SCSPARC_ERR_PARAM);
  scsparc_channel_free(ch);

  scsparc_channel* bec = nullptr;
  REQUIRE(scsparc_channel_create("bec", 0.2, &bec) == SCSPARC_OK);
  CHECK(scsparc_channel_capacity_entropy(bec, &ent) == SCSPARC_OK);
  CHECK(ent == doctest::Approx(0.8 * std::log(2.0)).epsilon(1e-9));
  double y = 0.0;
  CHECK(scsparc_channel_sample(bec, 1.5, 42, &y) == SCSPARC_OK);
  CHECK((y == 0.0 || y == 1.0));
  scsparc_channel_free(bec);
}

TEST_CASE("error reporting carries a message and a parameter status") {
  scsparc_channel* ch = nullptr;
  CHECK(scsparc_channel_create("awgn", -1.0, &ch) == SCSPARC_ERR_PARAM);
  CHECK(std::strlen(scsparc_last_error()) > 0);
  CHECK(scsparc_channel_create("nope", 1.0, &ch) == SCSPARC_ERR_PARAM);
}

TEST_CASE("base matrix export") {
  char* csv = nullptr;
  char* header = nullptr;
  REQUIRE(scsparc_base_matrix_csv(12, 2, 0.1, &csv, &header) == SCSPARC_OK);
  std::string c = take(csv), h = take(header);
  CHECK(std::count(c.begin(), c.end(), '\n') == 12);
  auto j = nlohmann::json::parse(h);
  CHECK(j["gamma"] == 12);
  CHECK(j["row_sums"].size() == 12);
  CHECK(j["row_sums"][0].get<double>() == doctest::Approx(12.0).epsilon(1e-12));

  CHECK(scsparc_base_matrix_csv(4, 2, 0.0, &csv, &header) == SCSPARC_ERR_PARAM);
}

TEST_CASE("state evolution and wave report through the C surface") {
  char* csv = nullptr;
  char* summary = nullptr;
  REQUIRE(scsparc_se_run(kSmallConfig, &csv, &summary) == SCSPARC_OK);
  std::string c = take(csv), s = take(summary);
  CHECK(c.rfind("t,c,psi,tau,r,sigma,phi\n", 0) == 0);
  auto j = nlohmann::json::parse(s);
  CHECK(j["iters"].get<int>() >= 1);

  char* report = nullptr;
  REQUIRE(scsparc_wave_report(kSmallConfig, &report) == SCSPARC_OK);
  auto w = nlohmann::json::parse(take(report));
  CHECK(w.contains("regime"));
  CHECK(w.contains("g"));
  CHECK(w["capacity_nats"].get<double>() > 0.0);
}

TEST_CASE("decode and simulate through the C surface") {
  char* records = nullptr;
  REQUIRE(scsparc_decode(kSmallConfig, &records) == SCSPARC_OK);
  auto j = nlohmann::json::parse(take(records));
  CHECK(j["records"].is_array());
  CHECK(!j["records"].empty());
  CHECK(j["records"][0].contains("mse_empirical"));
  CHECK(j["records"][0].contains("mse_se"));
  CHECK(j["records"][0].contains("ser_running"));

  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "scsparc_capi_out";
  fs::remove_all(dir);
  char* summary = nullptr;
  REQUIRE(scsparc_simulate(kSmallConfig, dir.string().c_str(), &summary) == SCSPARC_OK);
  auto s = nlohmann::json::parse(take(summary));
  CHECK(s["points"].size() == 1);
  CHECK(fs::exists(dir / "results.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "se_trajectory.csv"));
  fs::remove_all(dir);

  CHECK(scsparc_decode("{bad json", &records) == SCSPARC_ERR_PARAM);
}

TEST_CASE("glm through the C surface") {
  const char* cfg = R"({
    "channel": {"kind": "awgn", "param": 0.01},
    "N": 2000, "alpha": 1.0, "gamma": 4, "omega": 0, "rho": 0.0,
    "prior": {"kind": "gaussian", "p1": 0.0, "p2": 1.0},
    "trials": 2, "master_seed": 9
  })";
  char* summary = nullptr;
  REQUIRE(scsparc_glm_run(cfg, &summary) == SCSPARC_OK);
  auto j = nlohmann::json::parse(take(summary));
  CHECK(j["se_fixed_point"].get<double>() > 0.0);
  CHECK(j["mse_mean_final"].get<double>() > 0.0);
}
