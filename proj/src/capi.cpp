#include "scsparc/scsparc.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#include "json.hpp"
#include "scsparc/channel.hpp"
#include "scsparc/errors.hpp"
#include "scsparc/sim.hpp"

using namespace scsparc;

struct scsparc_channel {
  Channel ch;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

scsparc_status to_status(const Error& e) {
  switch (e.code()) {
    case ErrorCode::param: return SCSPARC_ERR_PARAM;
    case ErrorCode::experiment: return SCSPARC_ERR_EXPERIMENT;
    case ErrorCode::numeric: return SCSPARC_ERR_NUMERIC;
    case ErrorCode::resource: return SCSPARC_ERR_RESOURCE;
    case ErrorCode::diverged: return SCSPARC_ERR_DIVERGED;
  }
  return SCSPARC_ERR_EXPERIMENT;
}

template <typename Fn>
scsparc_status guarded(Fn&& fn) {
  try {
    fn();
    return SCSPARC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SCSPARC_ERR_EXPERIMENT;
  }
}

}  // namespace

extern "C" {

const char* scsparc_version(void) { return kVersion; }

const char* scsparc_last_error(void) { return g_last_error.c_str(); }

void scsparc_string_free(char* s) { std::free(s); }

scsparc_status scsparc_channel_create(const char* kind, double param, scsparc_channel** out) {
  if (!kind || !out) {
    g_last_error = "channel_create: null argument";
    return SCSPARC_ERR_PARAM;
  }
  return guarded([&]() { *out = new scsparc_channel{Channel::from_config(kind, param)}; });
}

void scsparc_channel_free(scsparc_channel* ch) { delete ch; }

scsparc_status scsparc_channel_capacity(const scsparc_channel* ch, double* nats) {
  if (!ch || !nats) return SCSPARC_ERR_PARAM;
  return guarded([&]() { *nats = ch->ch.capacity(); });
}

scsparc_status scsparc_channel_capacity_entropy(const scsparc_channel* ch, double* nats) {
  if (!ch || !nats) return SCSPARC_ERR_PARAM;
  return guarded([&]() { *nats = ch->ch.capacity_entropy(); });
}

scsparc_status scsparc_channel_f_out(const scsparc_channel* ch, double sigma, double* value) {
  if (!ch || !value) return SCSPARC_ERR_PARAM;
  return guarded([&]() { *value = ch->ch.f_out(sigma); });
}

scsparc_status scsparc_channel_psi_out(const scsparc_channel* ch, double sigma, double* value) {
  if (!ch || !value) return SCSPARC_ERR_PARAM;
  return guarded([&]() { *value = ch->ch.psi_out(sigma); });
}

scsparc_status scsparc_channel_g_out(const scsparc_channel* ch, double p, double y, double sigma,
                                     double* value) {
  if (!ch || !value) return SCSPARC_ERR_PARAM;
  return guarded([&]() { *value = ch->ch.g_out(p, y, sigma); });
}

scsparc_status scsparc_channel_sample(const scsparc_channel* ch, double u,
                                      unsigned long long seed, double* y) {
  if (!ch || !y) return SCSPARC_ERR_PARAM;
  return guarded([&]() {
    Rng rng(RngStream{seed, 0});
    *y = ch->ch.sample_output(u, rng);
  });
}

scsparc_status scsparc_base_matrix_csv(int gamma, int omega, double rho, char** csv,
                                       char** header_json) {
  if (!csv || !header_json) return SCSPARC_ERR_PARAM;
  return guarded([&]() {
    BaseMatrix w = build_base_matrix(gamma, omega, rho);
    *csv = dup_string(base_matrix_csv(w));
    *header_json = dup_string(base_matrix_header_json(w));
  });
}

scsparc_status scsparc_se_run(const char* config_json, char** csv, char** summary_json_out) {
  if (!config_json || !csv || !summary_json_out) return SCSPARC_ERR_PARAM;
  return guarded([&]() {
    ExperimentConfig cfg = ExperimentConfig::from_json(config_json);
    Channel channel = Channel::from_config(cfg.channel_kind, cfg.channel_param);
    SweepPointResult point = resolve_sweep_point(cfg, channel, 0.0, false);
    SeedSet seeds = seed_sections(point.params.gamma, point.params.omega);
    BaseMatrix w = build_base_matrix(point.params.gamma, point.params.omega, point.params.rho);
    int t_budget = point.wave.iters_budget >= 1 ? point.wave.iters_budget
                                                : (point.params.gamma + 1) / 2;
    int t_se = cfg.se_t_max > 0 ? cfg.se_t_max : std::min(t_budget + 4, 256);
    SeTrajectory se = run_se(point.params, w, channel, seeds, t_se, cfg.se_stop_tol,
                             RngStream{cfg.master_seed, 0}.derive("se", 0), cfg.se_n_mc);
    *csv = dup_string(se_trajectory_csv(se));
    nlohmann::json j;
    j["version"] = kVersion;
    j["iters"] = se.iters;
    j["mean_psi_final"] = se.mean_psi(se.iters);
    j["config"] = nlohmann::json::parse(cfg.to_json());
    *summary_json_out = dup_string(j.dump(2));
  });
}

scsparc_status scsparc_wave_report(const char* config_json, char** report_json) {
  if (!config_json || !report_json) return SCSPARC_ERR_PARAM;
  return guarded([&]() {
    ExperimentConfig cfg = ExperimentConfig::from_json(config_json);
    Channel channel = Channel::from_config(cfg.channel_kind, cfg.channel_param);
    SweepPointResult point = resolve_sweep_point(cfg, channel, 0.0, false);
    const WaveReport& w = point.wave;
    nlohmann::json j;
    j["version"] = kVersion;
    j["capacity_nats"] = w.capacity;
    j["capacity_bits"] = w.capacity / std::log(2.0);
    j["rate_nats"] = w.rate;
    j["rate_eff_nats"] = w.rate_eff;
    j["delta"] = w.delta;
    j["delta_slack"] = w.delta_slack;
    j["h_delta"] = w.h;
    j["rho_max"] = w.rho_max;
    j["rho"] = point.params.rho;
    j["g"] = w.g;
    j["iters_budget"] = w.iters_budget;
    j["f_m_delta"] = w.f_m_delta;
    j["k_const"] = w.k_const;
    j["frontier_threshold"] = w.frontier_threshold;
    j["regime"] = regime_name(w.regime);
    j["warnings"] = w.warnings;
    *report_json = dup_string(j.dump(2));
  });
}

scsparc_status scsparc_decode(const char* config_json, char** records_json) {
  if (!config_json || !records_json) return SCSPARC_ERR_PARAM;
  return guarded([&]() {
    ExperimentConfig cfg = ExperimentConfig::from_json(config_json);
    DecodeResult res = run_single_decode(cfg);
    nlohmann::json j = nlohmann::json::array();
    const TrialRecord& tr = res.point.trials.front();
    for (const auto& h : tr.history) {
      j.push_back({{"t", h.t},
                   {"mse_empirical", h.mse_empirical},
                   {"mse_se", h.mse_se},
                   {"ser_running", h.ser_running}});
    }
    nlohmann::json out;
    out["version"] = kVersion;
    out["diverged"] = tr.diverged;
    out["iters"] = tr.iters;
    out["ser_overall"] = tr.ser_overall;
    out["ser_unseeded"] = tr.ser_unseeded;
    out["records"] = j;
    *records_json = dup_string(out.dump(2));
  });
}

scsparc_status scsparc_simulate(const char* config_json, const char* output_dir,
                                char** summary_json_out) {
  if (!config_json || !summary_json_out) return SCSPARC_ERR_PARAM;
  return guarded([&]() {
    ExperimentConfig cfg = ExperimentConfig::from_json(config_json);
    ExperimentReport report = run_experiment(cfg);
    if (output_dir && output_dir[0] != '\0') write_outputs(report, output_dir);
    *summary_json_out = dup_string(summary_json(report));
  });
}

scsparc_status scsparc_glm_run(const char* config_json, char** summary_json_out) {
  if (!config_json || !summary_json_out) return SCSPARC_ERR_PARAM;
  return guarded([&]() {
    GlmConfig cfg = GlmConfig::from_json(config_json);
    GlmReport report = run_glm_experiment(cfg);
    *summary_json_out = dup_string(glm_summary_json(report));
  });
}

}  // extern "C"
