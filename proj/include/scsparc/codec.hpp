#ifndef SCSPARC_CODEC_HPP
#define SCSPARC_CODEC_HPP

#include <optional>
#include <span>
#include <vector>

#include "scsparc/channel.hpp"
#include "scsparc/code_design.hpp"
#include "scsparc/design_matrix.hpp"
#include "scsparc/rng.hpp"

namespace scsparc {

// One index per section, values in [1, M].
struct Message {
  std::vector<long> indices;
};

Message random_message(const SparcParams& params, RngStream stream);

// One-hot signal vector beta of length N.
std::vector<double> encode(const Message& msg, const SparcParams& params);

// x = A beta pushed through the channel, one output per channel use.
std::vector<double> transmit(const DesignMatrix& a, std::span<const double> beta,
                             const Channel& channel, RngStream stream);

// Sectionwise posterior-mean denoiser: softmax of r / tau within the section,
// evaluated in log domain.
void g_in_section(std::span<const double> r, double tau, std::span<double> out);

Message hard_decision(std::span<const double> beta, const SparcParams& params);

struct SectionErrorRate {
  double overall = 0.0;
  double unseeded = 0.0;
  long wrong_sections = 0;
};

SectionErrorRate section_error_rate(const Message& decoded, const Message& truth,
                                    const SeedSet& seeds, const SparcParams& params);

struct IterationRecord {
  int t = 0;
  double mse_empirical = 0.0;  // ||beta^t - beta||^2 / L (truth known)
  double mse_se = 0.0;         // (1/gamma) sum_c psi_c^{t+1}
  double ser_running = 0.0;    // unseeded hard-decision error rate at t
};

struct DecoderSchedule {
  // Per iteration t: row-block noise levels sigma[t] (length gamma) and
  // section channel variances tau[t] (length gamma).  Normally the state
  // evolution trajectory; ignored in online mode.
  std::vector<std::vector<double>> sigma;
  std::vector<std::vector<double>> tau;
  std::vector<double> mse_se;  // (1/gamma) sum_c psi_c^{t+1}, optional
};

struct DecodeOptions {
  int max_iters = -1;       // default: schedule length
  double stop_mass = 1e-6;  // stop when mean top-entry mass > 1 - stop_mass
  bool online_params = false;  // estimate sigma/tau from the running iterates
  bool store_iterates = false;
};

struct DecoderRun {
  std::vector<double> beta;  // final sectionwise posterior
  Message decoded;
  int iters = 0;
  std::vector<IterationRecord> history;
  // populated when store_iterates is set
  std::vector<std::vector<double>> p_iters, s_iters, r_iters, beta_iters;
};

// GAMP over the spatially coupled design.  Seeded column blocks are pinned to
// the true signal throughout; beta_true supplies those blocks (and, when
// given in full, enables per-iteration error metrics).
DecoderRun gamp_decode(const DesignMatrix& a, std::span<const double> y,
                       const SparcParams& params, const BaseMatrix& w, const SeedSet& seeds,
                       const Channel& channel, std::span<const double> beta_true,
                       const DecoderSchedule& schedule, const DecodeOptions& opts = {});

}  // namespace scsparc

#endif
