#ifndef SCSPARC_STATE_EVOLUTION_HPP
#define SCSPARC_STATE_EVOLUTION_HPP

#include <span>
#include <string>
#include <vector>

#include "scsparc/channel.hpp"
#include "scsparc/code_design.hpp"
#include "scsparc/numerics.hpp"
#include "scsparc/rng.hpp"

namespace scsparc {

// Expected posterior mass on the transmitted entry of one section observed
// through Gaussian noise of variance tau.  Monte Carlo with log-sum-exp;
// reproducible for a fixed stream.
McEstimate eps_tau(double tau, long M, long n_mc, RngStream stream);

// Deterministic companion estimate: conditions on the true-entry noise and
// replaces the competing exponential sum by its mean with a second-order
// correction.  Diagnostic cross-check only.
double eps_tau_semianalytic(double tau, long M);

struct SeStep {
  std::vector<double> sigma;  // row-block prior variances
  std::vector<double> phi;    // 1 / f_out(sigma)
  std::vector<double> tau;    // section channel variances
  std::vector<double> psi_next;
};

SeStep se_step(std::span<const double> psi, const BaseMatrix& w, const SparcParams& params,
               const Channel& channel, const SeedSet& seeds, RngStream step_stream,
               long n_mc = 100000);

struct SeTrajectory {
  int gamma = 0;
  int iters = 0;                          // steps taken
  std::vector<std::vector<double>> psi;   // psi[t], t = 0..iters
  std::vector<std::vector<double>> sigma; // sigma[t], t = 0..iters-1
  std::vector<std::vector<double>> phi;
  std::vector<std::vector<double>> tau;

  double mean_psi(int t) const;  // (1/gamma) sum_c psi_c^t
};

SeTrajectory run_se(const SparcParams& params, const BaseMatrix& w, const Channel& channel,
                    const SeedSet& seeds, int t_max, double stop_tol, RngStream stream,
                    long n_mc = 100000);

// Cumulative integral of f_out from 0 to h (h may exceed 1; f_out is
// continued by its value at 1, matching its non-increasing shape).
double f_out_integral(const Channel& channel, double h);

// Level h with integral_0^h f_out = (3/2) delta.
double h_delta(double delta, const Channel& channel);

// Largest decoding-wave speed k <= 2*omega+1 compatible with the capacity
// gap; 0 means no speed is certified at these parameters.
int wave_speed_g(int omega, double rho, double delta, const Channel& channel);

int max_iters(int gamma, int g);

// M^{-k delta} / (delta sqrt(ln M)), the decoded-block error level.
double f_m_delta(long M, double delta, double k_const);

enum class Regime { single_shot, wave, undecodable };

struct WaveReport {
  double capacity = 0.0;  // nats
  double rate = 0.0;
  double rate_eff = 0.0;
  double delta = 0.0;  // capacity gap
  double delta_slack = 0.0;
  double h = 0.0;
  double rho_max = 0.0;  // h / 2
  int g = 0;
  int iters_budget = 0;  // ceil(gamma / 2g) in the wave regime, 1 single-shot
  double f_m_delta = 0.0;
  double k_const = 1.0;
  double frontier_threshold = 0.0;  // min(f_m_delta, 1/2)
  Regime regime = Regime::undecodable;
  std::vector<std::string> warnings;
};

std::string regime_name(Regime r);

struct RegimeOptions {
  double delta_slack_override = -1.0;  // delta in (0, min(gap/2R, 1/2)); midpoint default
  double k_const = 1.0;
};

WaveReport regime_classify(const SparcParams& params, const Channel& channel,
                           const RegimeOptions& opts = {});

// Per-iteration count of contiguously decoded blocks from the left edge.
std::vector<int> decoded_frontier(const SeTrajectory& se, double threshold);

}  // namespace scsparc

#endif
