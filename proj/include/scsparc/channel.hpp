#ifndef SCSPARC_CHANNEL_HPP
#define SCSPARC_CHANNEL_HPP

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "scsparc/rng.hpp"

namespace scsparc {

enum class ChannelKind { awgn, bec, bsc, generic };

struct OutputAlphabet {
  std::vector<double> symbols;  // empty iff continuous
  bool continuous = false;
};

// User-defined memoryless channel.  pout evaluates the output law P(y|z)
// (density for continuous outputs, pmf for discrete ones), sample draws one
// output.  For continuous outputs, noise_scale sizes the quadrature window in
// y around the channel input.
struct GenericChannelSpec {
  std::function<double(double y, double z)> pout;
  std::function<double(double u, Rng& rng)> sample;
  OutputAlphabet alphabet;
  double noise_scale = 1.0;
  std::function<double(double p, double y, double sigma)> gout_closed_form;  // optional
};

// Memoryless channel with the scalar calculus used by GAMP and state
// evolution: the posterior-mean estimator g_out, its input derivative, the
// Fisher-type information f_out, the potential Psi_out, and capacity.
//
// Conventions: sigma is the variance of the Gaussian prior on the channel
// input in the estimation problem z ~ N(p, sigma), y ~ P(.|z).  Information
// quantities are in nats.
class Channel {
 public:
  static Channel awgn(double noise_variance);
  static Channel bec(double erasure_prob);
  static Channel bsc(double flip_prob);
  static Channel generic(GenericChannelSpec spec);
  // Channel config as used in experiment files: kind awgn|bec|bsc.
  static Channel from_config(const std::string& kind, double param);

  ChannelKind kind() const { return kind_; }
  double param() const { return param_; }
  const OutputAlphabet& alphabet() const { return alphabet_; }
  std::string describe() const;

  double sample_output(double u, Rng& rng) const;
  void sample_output(std::span<const double> u, std::span<double> y, Rng& rng) const;

  // Output law P(y|z); density in y for continuous channels, pmf otherwise.
  double pout(double y, double z) const;

  // (E[z | y, z ~ N(p, sigma)] - p) / sigma
  double g_out(double p, double y, double sigma) const;
  double d_gout_dp(double p, double y, double sigma) const;

  // -E d/dp g_out under the state-evolution coupling of (P, Z0, Y); sigma in
  // [0, 1], endpoints evaluated as one-sided limits.
  double f_out(double sigma) const;
  // Potential with f_out = -2 Psi_out'.
  double psi_out(double sigma) const;

  // Shannon capacity in nats, as half the integral of f_out over [0, 1].
  double capacity() const;
  // H(Y) - H(Y|Z) cross-check; discrete outputs only.
  double capacity_entropy() const;

  // Force the quadrature path even where a closed form exists (cross-checks).
  double f_out_quadrature(double sigma) const;
  double g_out_quadrature(double p, double y, double sigma) const;

 private:
  Channel() = default;

  double g_out_closed(double p, double y, double sigma) const;
  double f_out_impl(double sigma) const;

  struct Cache {
    std::mutex mu;
    std::map<double, double> fout;
    double capacity = -1.0;
    bool has_capacity = false;
  };

  ChannelKind kind_ = ChannelKind::awgn;
  double param_ = 0.0;
  OutputAlphabet alphabet_;
  std::shared_ptr<GenericChannelSpec> generic_;
  int gh_order_ = 61;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

}  // namespace scsparc

#endif
