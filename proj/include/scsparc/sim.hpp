#ifndef SCSPARC_SIM_HPP
#define SCSPARC_SIM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scsparc/channel.hpp"
#include "scsparc/codec.hpp"
#include "scsparc/glm.hpp"
#include "scsparc/state_evolution.hpp"

namespace scsparc {

inline constexpr const char* kVersion = "scsparc 0.1.0";

// Worker cap: SC_SPARC_THREADS if set, hardware concurrency otherwise.
int worker_limit();

struct RateSpec {
  std::string mode = "ratio";  // ratio (of capacity) | nats | bits
  double value = 0.75;
};

struct ExperimentConfig {
  std::string channel_kind = "awgn";
  double channel_param = 1.0;

  long L = 1024;
  long M = 64;
  int gamma = 32;
  int omega = 3;
  double rho = -1.0;  // negative: pick h(gap)/8 from the wave analysis
  RateSpec rate;

  long trials = 50;
  uint64_t master_seed = 1;

  std::string sweep_axis;  // empty | n | ratio | M | omega
  std::vector<double> sweep_values;

  int decoder_max_iters = -1;
  double decoder_stop_mass = 1e-6;
  bool decoder_online = false;

  long se_n_mc = 100000;
  double se_stop_tol = 1e-7;
  int se_t_max = -1;

  double error_threshold = 0.01;  // over unseeded sections
  double max_memory_gb = 4.0;
  double delta_slack = -1.0;
  double k_const = 1.0;

  static ExperimentConfig from_json(const std::string& text);
  std::string to_json() const;
};

struct TrialRecord {
  long trial = 0;
  uint64_t stream_id = 0;
  bool diverged = false;
  int iters = 0;
  double ser_overall = 0.0;
  double ser_unseeded = 0.0;
  bool error_event = false;
  double mse_final = 0.0;
  double max_dev_vs_se = 0.0;
  std::vector<IterationRecord> history;
  double wall_seconds = 0.0;  // excluded from deterministic outputs
};

struct SweepPointResult {
  double axis_value = 0.0;
  SparcParams params;
  double rate_eff = 0.0;
  WaveReport wave;
  SeTrajectory se;
  std::vector<TrialRecord> trials;
  long error_events = 0;
  long diverged = 0;
  double p_hat = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<SweepPointResult> points;
};

struct DeviationRow {
  int t = 0;
  double se_mse = 0.0;
  double emp_mean = 0.0;
  double dev_mean = 0.0;  // mean over trials of |emp - se| at t
  double dev_max = 0.0;
};

// Resolve one sweep point (axis_value ignored for the empty axis).
SweepPointResult resolve_sweep_point(const ExperimentConfig& cfg, const Channel& channel,
                                     double axis_value, bool has_axis);

ExperimentReport run_experiment(const ExperimentConfig& cfg);
void write_outputs(const ExperimentReport& report, const std::string& out_dir);

std::vector<std::vector<DeviationRow>> compare_se(const ExperimentReport& report);

// One decode with per-iteration records (the decode CLI path).
struct DecodeResult {
  SweepPointResult point;  // params/wave/se, single trial in trials[0]
};
DecodeResult run_single_decode(const ExperimentConfig& cfg);

std::string se_trajectory_csv(const SeTrajectory& se);
std::string results_csv(const ExperimentReport& report);
std::string summary_json(const ExperimentReport& report);
std::string base_matrix_csv(const BaseMatrix& w);
std::string base_matrix_header_json(const BaseMatrix& w);

// GLM experiment: SE plus tracking trials under the shared channel/coupling
// configuration.
struct GlmConfig {
  std::string channel_kind = "awgn";
  double channel_param = 0.01;
  long N = 20000;
  double alpha = 1.0;
  int gamma = 4;
  int omega = 0;
  double rho = 0.0;
  std::string prior_kind = "bg";
  double prior_p1 = 0.1;
  double prior_p2 = 1.0;
  long trials = 20;
  uint64_t master_seed = 1;
  int t_max = 200;
  double stop_tol = 1e-10;
  double max_memory_gb = 4.0;

  static GlmConfig from_json(const std::string& text);
  std::string to_json() const;
};

struct GlmReport {
  GlmConfig config;
  GlmParams params;
  GlmSeTrajectory se;
  double se_fixed_point = 0.0;  // mean psi at the last iteration
  std::vector<GlmDecoderRun> trials;
  double mse_mean_final = 0.0;
  double max_tracking_dev = 0.0;  // max_t |mean emp - se|
};

GlmReport run_glm_experiment(const GlmConfig& cfg);
std::string glm_summary_json(const GlmReport& report);

}  // namespace scsparc

#endif
