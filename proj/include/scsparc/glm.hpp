#ifndef SCSPARC_GLM_HPP
#define SCSPARC_GLM_HPP

#include <span>
#include <string>
#include <vector>

#include "scsparc/channel.hpp"
#include "scsparc/code_design.hpp"
#include "scsparc/design_matrix.hpp"
#include "scsparc/rng.hpp"

namespace scsparc {

// Separable scalar priors with closed-form posterior means under Gaussian
// noise.  Bernoulli takes values {0, 1}; the Bernoulli-Gaussian slab is
// centered at zero.
struct PriorSpec {
  enum class Kind { gaussian, bernoulli, bernoulli_gaussian };
  Kind kind = Kind::gaussian;
  double a = 0.0;  // gaussian: mean; bernoulli: p; bg: p
  double b = 1.0;  // gaussian: variance; bg: slab variance

  static PriorSpec gaussian(double mean, double var);
  static PriorSpec bernoulli(double p);
  static PriorSpec bernoulli_gaussian(double p, double var);
  static PriorSpec from_config(const std::string& kind, double p1, double p2);

  double mean() const;
  double variance() const;
  double second_moment() const;
  double sample(Rng& rng) const;
  std::string describe() const;
};

// Posterior mean E[beta | beta + sqrt(tau) Z = r].
double g_in_glm(double r, double tau, const PriorSpec& prior);

// Scalar minimum mean-square error at noise variance tau.
double psi_update_glm(double tau, const PriorSpec& prior);

// Coupled geometry for the generalized linear model: N signal coordinates in
// gamma blocks, n = alpha * N observations.  Design entries in block (r, c)
// have variance W_rc / (N E[beta^2]), which gives the channel input unit
// power.
struct GlmParams {
  long N = 0;
  long n = 0;
  int gamma = 0;
  int omega = 0;
  double rho = 0.0;
  double alpha = 0.0;
  PriorSpec prior;

  static GlmParams make(long N, double alpha, int gamma, int omega, double rho, PriorSpec prior);
  double variance_divisor() const { return static_cast<double>(N) * prior.second_moment(); }
};

struct GlmSeTrajectory {
  int gamma = 0;
  int iters = 0;
  std::vector<std::vector<double>> psi;  // raw per-coordinate MSE, psi[t]
  std::vector<std::vector<double>> sigma;  // normalized p-error variances
  std::vector<std::vector<double>> tau;

  double mean_psi(int t) const;
};

GlmSeTrajectory run_se_glm(const GlmParams& params, const BaseMatrix& w, const Channel& channel,
                           const SeedSet& seeds, int t_max, double stop_tol);

// Fixed point of the scalar recursion for a Gaussian prior over AWGN
// (the linear-model minimum mean-square error).
double glm_gaussian_fixed_point(double prior_var, double alpha, double noise_var);

struct GlmIterationRecord {
  int t = 0;
  double mse_empirical = 0.0;  // ||beta^t - beta||^2 / N
  double mse_se = 0.0;
};

struct GlmDecoderRun {
  std::vector<double> beta;
  int iters = 0;
  std::vector<GlmIterationRecord> history;
};

GlmDecoderRun gamp_decode_glm(const DesignMatrix& a, std::span<const double> y,
                              const GlmParams& params, const BaseMatrix& w, const SeedSet& seeds,
                              const Channel& channel, std::span<const double> beta_true,
                              const GlmSeTrajectory& se, int max_iters = -1);

}  // namespace scsparc

#endif
