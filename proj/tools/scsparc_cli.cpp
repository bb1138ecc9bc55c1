// Command line front end.  All functionality is reached through the shared
// library's C interface (scsparc.h); this file only assembles configuration
// JSON from flags and prints results.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "scsparc/scsparc.h"

namespace {

using nlohmann::json;

int status_to_exit(scsparc_status st) {
  if (st == SCSPARC_OK) return 0;
  if (st == SCSPARC_ERR_PARAM) return 2;
  return 3;
}

int fail(scsparc_status st) {
  std::cerr << "error: " << scsparc_last_error() << "\n";
  return status_to_exit(st);
}

std::string take(char* s) {
  std::string out = s ? s : "";
  scsparc_string_free(s);
  return out;
}

struct CommonFlags {
  std::string config_path;
  std::string channel_kind = "awgn";
  double channel_param = 1.0;
  long L = 1024, M = 64;
  int gamma = 32, omega = 3;
  double rho = -1.0;
  std::string rate_mode = "ratio";
  double rate_value = 0.75;
  long trials = 50;
  unsigned long long seed = 1;
  int iters = -1;
  bool channel_set = false, rate_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file (flags override)");
  cmd->add_option("--channel", f.channel_kind, "awgn|bec|bsc");
  cmd->add_option("--param", f.channel_param, "channel parameter");
  cmd->add_option("--L", f.L, "sections");
  cmd->add_option("--M", f.M, "section size (power of two)");
  cmd->add_option("--gamma", f.gamma, "blocks per side");
  cmd->add_option("--omega", f.omega, "coupling half-width");
  cmd->add_option("--rho", f.rho, "background variance share (negative: auto)");
  cmd->add_option("--rate-mode", f.rate_mode, "ratio|nats|bits");
  cmd->add_option("--rate", f.rate_value, "rate value under rate-mode");
  cmd->add_option("--trials", f.trials, "Monte Carlo trials");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--iters", f.iters, "decoder iterations (negative: auto)");
}

// Build the config JSON: file first, then flag overrides the parser saw.
std::string build_config(const CLI::App* cmd, const CommonFlags& f) {
  json j;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) {
      std::cerr << "error: cannot read config " << f.config_path << "\n";
      std::exit(2);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    j = json::parse(ss.str(), nullptr, false);
    if (j.is_discarded()) {
      std::cerr << "error: invalid JSON in " << f.config_path << "\n";
      std::exit(2);
    }
  }
  auto seen = [&](const std::string& name) { return cmd->count(name) > 0; };
  if (seen("--channel")) j["channel"]["kind"] = f.channel_kind;
  if (seen("--param")) j["channel"]["param"] = f.channel_param;
  if (seen("--L")) j["code"]["L"] = f.L;
  if (seen("--M")) j["code"]["M"] = f.M;
  if (seen("--gamma")) j["code"]["gamma"] = f.gamma;
  if (seen("--omega")) j["code"]["omega"] = f.omega;
  if (seen("--rho")) j["code"]["rho"] = f.rho;
  if (seen("--rate-mode")) j["code"]["rate"]["mode"] = f.rate_mode;
  if (seen("--rate")) j["code"]["rate"]["value"] = f.rate_value;
  if (seen("--trials")) j["trials"] = f.trials;
  if (seen("--seed")) j["master_seed"] = f.seed;
  if (seen("--iters")) j["decoder"]["max_iters"] = f.iters;
  return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatially coupled sparse regression code laboratory"};
  app.require_subcommand(1);

  // capacity
  auto* cap_cmd = app.add_subcommand("capacity", "Channel capacity in nats and bits");
  std::string cap_kind = "awgn";
  double cap_param = 1.0;
  cap_cmd->add_option("--channel", cap_kind, "awgn|bec|bsc")->required();
  cap_cmd->add_option("--param", cap_param, "channel parameter")->required();

  // design
  auto* design_cmd = app.add_subcommand("design", "Emit the base matrix as CSV + JSON header");
  int d_gamma = 32, d_omega = 3;
  double d_rho = 0.0;
  std::string d_csv_path, d_json_path;
  design_cmd->add_option("--gamma", d_gamma)->required();
  design_cmd->add_option("--omega", d_omega)->required();
  design_cmd->add_option("--rho", d_rho);
  design_cmd->add_option("--out-csv", d_csv_path, "write CSV here (default stdout)");
  design_cmd->add_option("--out-json", d_json_path, "write JSON header here (default stdout)");

  // se / wave / decode / simulate
  CommonFlags se_f, wave_f, dec_f, sim_f;
  auto* se_cmd = app.add_subcommand("se", "State evolution trajectory CSV");
  add_common(se_cmd, se_f);
  auto* wave_cmd = app.add_subcommand("wave", "Decoding-wave analysis report (JSON)");
  add_common(wave_cmd, wave_f);
  auto* dec_cmd = app.add_subcommand("decode", "Single decode with per-iteration records");
  add_common(dec_cmd, dec_f);
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo experiment with file outputs");
  add_common(sim_cmd, sim_f);
  std::string sim_out = "out";
  sim_cmd->add_option("--out", sim_out, "output directory");

  // glm
  auto* glm_cmd = app.add_subcommand("glm", "Generalized linear model run");
  std::string glm_config_path;
  std::string glm_prior = "bg";
  double glm_p1 = 0.1, glm_p2 = 1.0, glm_alpha = 1.0, glm_rho = 0.0, glm_param = 0.01;
  std::string glm_channel = "awgn";
  long glm_N = 20000, glm_trials = 20;
  int glm_gamma = 4, glm_omega = 0;
  unsigned long long glm_seed = 1;
  glm_cmd->add_option("--config", glm_config_path, "JSON config file (flags override)");
  glm_cmd->add_option("--prior", glm_prior, "gaussian|bernoulli|bg");
  glm_cmd->add_option("--p1", glm_p1, "prior parameter 1 (mean or p)");
  glm_cmd->add_option("--p2", glm_p2, "prior parameter 2 (variance)");
  glm_cmd->add_option("--alpha", glm_alpha, "sampling ratio n/N");
  glm_cmd->add_option("--N", glm_N, "signal dimension");
  glm_cmd->add_option("--gamma", glm_gamma);
  glm_cmd->add_option("--omega", glm_omega);
  glm_cmd->add_option("--rho", glm_rho);
  glm_cmd->add_option("--channel", glm_channel, "awgn|bec|bsc");
  glm_cmd->add_option("--param", glm_param, "channel parameter");
  glm_cmd->add_option("--trials", glm_trials);
  glm_cmd->add_option("--seed", glm_seed);

  CLI11_PARSE(app, argc, argv);

  if (cap_cmd->parsed()) {
    scsparc_channel* ch = nullptr;
    scsparc_status st = scsparc_channel_create(cap_kind.c_str(), cap_param, &ch);
    if (st != SCSPARC_OK) return fail(st);
    double nats = 0.0;
    st = scsparc_channel_capacity(ch, &nats);
    if (st != SCSPARC_OK) {
      scsparc_channel_free(ch);
      return fail(st);
    }
    json out;
    out["channel"] = cap_kind;
    out["param"] = cap_param;
    out["capacity_nats"] = nats;
    out["capacity_bits"] = nats / std::log(2.0);
    double ent = 0.0;
    if (scsparc_channel_capacity_entropy(ch, &ent) == SCSPARC_OK) {
      out["capacity_entropy_nats"] = ent;
    }
    scsparc_channel_free(ch);
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (design_cmd->parsed()) {
    char* csv = nullptr;
    char* header = nullptr;
    scsparc_status st = scsparc_base_matrix_csv(d_gamma, d_omega, d_rho, &csv, &header);
    if (st != SCSPARC_OK) return fail(st);
    std::string csv_text = take(csv), header_text = take(header);
    if (d_csv_path.empty()) {
      std::cout << csv_text;
    } else {
      std::ofstream(d_csv_path, std::ios::binary) << csv_text;
    }
    if (d_json_path.empty()) {
      std::cout << header_text << "\n";
    } else {
      std::ofstream(d_json_path, std::ios::binary) << header_text;
    }
    return 0;
  }

  if (se_cmd->parsed()) {
    std::string cfg = build_config(se_cmd, se_f);
    char* csv = nullptr;
    char* summary = nullptr;
    scsparc_status st = scsparc_se_run(cfg.c_str(), &csv, &summary);
    if (st != SCSPARC_OK) return fail(st);
    std::cout << take(csv);
    std::cerr << take(summary) << "\n";
    return 0;
  }

  if (wave_cmd->parsed()) {
    std::string cfg = build_config(wave_cmd, wave_f);
    char* report = nullptr;
    scsparc_status st = scsparc_wave_report(cfg.c_str(), &report);
    if (st != SCSPARC_OK) return fail(st);
    std::cout << take(report) << "\n";
    return 0;
  }

  if (dec_cmd->parsed()) {
    std::string cfg = build_config(dec_cmd, dec_f);
    char* records = nullptr;
    scsparc_status st = scsparc_decode(cfg.c_str(), &records);
    if (st != SCSPARC_OK) return fail(st);
    std::cout << take(records) << "\n";
    return 0;
  }

  if (sim_cmd->parsed()) {
    std::string cfg = build_config(sim_cmd, sim_f);
    char* summary = nullptr;
    scsparc_status st = scsparc_simulate(cfg.c_str(), sim_out.c_str(), &summary);
    if (st != SCSPARC_OK) return fail(st);
    std::cout << take(summary) << "\n";
    return 0;
  }

  if (glm_cmd->parsed()) {
    json j;
    if (!glm_config_path.empty()) {
      std::ifstream in(glm_config_path);
      if (!in) {
        std::cerr << "error: cannot read config " << glm_config_path << "\n";
        return 2;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      j = json::parse(ss.str(), nullptr, false);
      if (j.is_discarded()) {
        std::cerr << "error: invalid JSON in " << glm_config_path << "\n";
        return 2;
      }
    }
    auto seen = [&](const std::string& name) { return glm_cmd->count(name) > 0; };
    if (seen("--prior")) j["prior"]["kind"] = glm_prior;
    if (seen("--p1")) j["prior"]["p1"] = glm_p1;
    if (seen("--p2")) j["prior"]["p2"] = glm_p2;
    if (seen("--alpha")) j["alpha"] = glm_alpha;
    if (seen("--N")) j["N"] = glm_N;
    if (seen("--gamma")) j["gamma"] = glm_gamma;
    if (seen("--omega")) j["omega"] = glm_omega;
    if (seen("--rho")) j["rho"] = glm_rho;
    if (seen("--channel")) j["channel"]["kind"] = glm_channel;
    if (seen("--param")) j["channel"]["param"] = glm_param;
    if (seen("--trials")) j["trials"] = glm_trials;
    if (seen("--seed")) j["master_seed"] = glm_seed;
    char* summary = nullptr;
    scsparc_status st = scsparc_glm_run(j.dump().c_str(), &summary);
    if (st != SCSPARC_OK) return fail(st);
    std::cout << take(summary) << "\n";
    return 0;
  }

  return 0;
}
