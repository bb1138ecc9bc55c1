#include "scsparc/state_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "scsparc/errors.hpp"

namespace scsparc {

namespace {

// Sum of addends in value order.  Mirrored rows/columns of a symmetric
// profile then produce bit-identical sums, which keeps the trajectory
// exactly symmetric.
double sorted_sum(std::vector<double>& addends) {
  std::sort(addends.begin(), addends.end());
  double acc = 0.0;
  for (double v : addends) acc += v;
  return acc;
}

}  // namespace

McEstimate eps_tau(double tau, long M, long n_mc, RngStream stream) {
  if (!(tau > 0.0)) throw ParamError("eps_tau: tau must be positive");
  if (M < 2) throw ParamError("eps_tau: M must be at least 2");
  if (n_mc < 100) throw ParamError("eps_tau: need at least 100 samples");

  Rng rng(stream);
  const double rt = std::sqrt(tau);
  const double it = 1.0 / tau;
  std::vector<double> u(M);
  double sum = 0.0, sumsq = 0.0;
  for (long k = 0; k < n_mc; ++k) {
    rng.fill_normal(std::span<double>(u));
    // Posterior mass on the true entry: exponent u_1/sqrt(tau) + 1/tau for
    // the truth against u_j/sqrt(tau) for the others, log-sum-exp.
    double e1 = u[0] / rt + it;
    double mx = e1;
    for (long j = 1; j < M; ++j) mx = std::max(mx, u[j] / rt);
    double den = std::exp(e1 - mx);
    for (long j = 1; j < M; ++j) den += std::exp(u[j] / rt - mx);
    double v = std::exp(e1 - mx) / den;
    sum += v;
    sumsq += v * v;
  }
  McEstimate est;
  est.n_samples = n_mc;
  est.mean = sum / static_cast<double>(n_mc);
  double var = std::max(0.0, sumsq / n_mc - est.mean * est.mean);
  est.std_error = std::sqrt(var / static_cast<double>(n_mc));
  return est;
}

double eps_tau_semianalytic(double tau, long M) {
  if (!(tau > 0.0)) throw ParamError("eps_tau_semianalytic: tau must be positive");
  // Competing sum S = sum_{j>=2} exp(U_j / sqrt(tau)) replaced by its mean
  // with a variance correction: E f(S) ~ f(S_bar) + f''(S_bar) Var(S) / 2.
  double mean_term = std::exp(0.5 / tau);
  double s_bar = (M - 1) * mean_term;
  double var_s = (M - 1) * (std::exp(2.0 / tau) - std::exp(1.0 / tau));
  const QuadratureRule& rule = gauss_hermite(129);
  double rt = std::sqrt(tau);
  double acc = 0.0;
  for (int i = 0; i < rule.order; ++i) {
    double a = std::exp(rule.nodes[i] / rt + 1.0 / tau);
    double den = a + s_bar;
    double f = a / den;
    double f2 = 2.0 * a / (den * den * den);  // d^2/dS^2 of a/(a+S)
    acc += rule.weights[i] * (f + 0.5 * f2 * var_s);
  }
  return std::min(1.0, acc);
}

SeStep se_step(std::span<const double> psi, const BaseMatrix& w, const SparcParams& params,
               const Channel& channel, const SeedSet& seeds, RngStream step_stream,
               long n_mc) {
  const int gamma = w.gamma;
  if (static_cast<int>(psi.size()) != gamma) throw ParamError("se_step: psi must have gamma entries");
  for (double v : psi) {
    if (!(v >= 0.0 && v <= 1.0)) throw ParamError("se_step: psi entries must lie in [0,1]");
  }

  SeStep out;
  out.sigma.resize(gamma);
  out.phi.resize(gamma);
  out.tau.resize(gamma);
  out.psi_next.assign(gamma, 0.0);

  std::vector<double> addends(gamma);
  for (int r = 0; r < gamma; ++r) {
    for (int c = 0; c < gamma; ++c) addends[c] = w(r, c) * psi[c];
    out.sigma[r] = sorted_sum(addends) / gamma;
  }
  std::vector<double> fout(gamma);
  for (int r = 0; r < gamma; ++r) {
    fout[r] = channel.f_out(std::min(out.sigma[r], 1.0));
    if (!(fout[r] > 0.0)) {
      throw DivergedError("se_step: f_out vanished at row block " + std::to_string(r + 1) +
                          " (uninformative channel)");
    }
    out.phi[r] = 1.0 / fout[r];
  }
  double rate_factor = params.R_nats / std::log(static_cast<double>(params.M));
  for (int c = 0; c < gamma; ++c) {
    for (int r = 0; r < gamma; ++r) addends[r] = w(r, c) * fout[r];
    out.tau[c] = rate_factor * gamma / sorted_sum(addends);
  }

  // One Monte Carlo evaluation per distinct tau; mirrored blocks share a
  // value bit-exactly and therefore a stream.
  std::map<double, McEstimate> eps_by_tau;
  {
    std::vector<double> uniq;
    for (int c = 0; c < gamma; ++c) {
      if (!seeds.contains(c)) uniq.push_back(out.tau[c]);
    }
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (size_t i = 0; i < uniq.size(); ++i) {
      eps_by_tau[uniq[i]] = eps_tau(uniq[i], params.M, n_mc, step_stream.derive(i));
    }
  }
  for (int c = 0; c < gamma; ++c) {
    if (seeds.contains(c)) {
      out.psi_next[c] = 0.0;
    } else {
      out.psi_next[c] = std::clamp(1.0 - eps_by_tau[out.tau[c]].mean, 0.0, 1.0);
    }
  }
  return out;
}

double SeTrajectory::mean_psi(int t) const {
  double acc = 0.0;
  for (double v : psi[t]) acc += v;
  return acc / static_cast<double>(gamma);
}

SeTrajectory run_se(const SparcParams& params, const BaseMatrix& w, const Channel& channel,
                    const SeedSet& seeds, int t_max, double stop_tol, RngStream stream,
                    long n_mc) {
  if (t_max < 1) throw ParamError("run_se: t_max must be at least 1");
  SeTrajectory se;
  se.gamma = w.gamma;
  std::vector<double> psi(w.gamma, 0.0);
  for (int c = 0; c < w.gamma; ++c) psi[c] = seeds.contains(c) ? 0.0 : 1.0;
  se.psi.push_back(psi);
  for (int t = 0; t < t_max; ++t) {
    SeStep step = se_step(psi, w, params, channel, seeds, stream.derive("se_step", t), n_mc);
    se.sigma.push_back(std::move(step.sigma));
    se.phi.push_back(std::move(step.phi));
    se.tau.push_back(std::move(step.tau));
    psi = step.psi_next;
    se.psi.push_back(psi);
    se.iters = t + 1;
    if (*std::max_element(psi.begin(), psi.end()) <= stop_tol) break;
  }
  return se;
}

double f_out_integral(const Channel& channel, double h) {
  if (h <= 0.0) return 0.0;
  // sigma = u^2 removes the 1/sqrt(sigma) endpoint behavior of
  // hard-decision channels; below u0 the substituted integrand is flat.
  const double u0 = 1e-4;
  double hi = std::sqrt(std::min(h, 1.0));
  double c0 = u0 * channel.f_out(u0 * u0);
  double val = 2.0 * c0 * std::min(hi, u0);
  if (hi > u0) {
    val += integrate_1d([&](double u) { return 2.0 * u * channel.f_out(u * u); }, u0, hi, 5e-10);
  }
  if (h > 1.0) val += (h - 1.0) * channel.f_out(1.0);
  return val;
}

double h_delta(double delta, const Channel& channel) {
  double c = channel.capacity();
  if (!(delta > 0.0) || !(1.5 * delta < 2.0 * c)) {
    throw ParamError("h_delta: need 0 < 1.5*delta < 2*capacity");
  }
  double target = 1.5 * delta;
  return find_root_increasing([&](double h) { return f_out_integral(channel, h) - target; },
                              0.0, 1.0, 1e-10);
}

int wave_speed_g(int omega, double rho, double delta, const Channel& channel) {
  if (omega < 1) throw ParamError("wave_speed_g: omega must be at least 1");
  if (!(rho > 0.0)) throw ParamError("wave_speed_g: rho must be positive");
  double target = 1.5 * delta;
  double f1 = channel.f_out(1.0);
  int best = 0;
  for (int k = 1; k <= 2 * omega + 1; ++k) {
    double upper = 2.0 * rho + k * (1.0 - rho) / (2.0 * omega + 1.0);
    double lhs = f_out_integral(channel, upper) - k / (2.0 * omega + 1.0) * (1.0 - rho) * f1;
    if (lhs < target) best = k;
  }
  return best;
}

int max_iters(int gamma, int g) {
  if (g < 1) {
    throw ParamError("max_iters: wave speed must be at least 1 (undecodable otherwise)");
  }
  return (gamma + 2 * g - 1) / (2 * g);
}

double f_m_delta(long M, double delta, double k_const) {
  if (M < 2) throw ParamError("f_m_delta: M must be at least 2");
  if (!(delta > 0.0 && delta < 0.5)) throw ParamError("f_m_delta: delta must lie in (0, 1/2)");
  if (!(k_const > 0.0)) throw ParamError("f_m_delta: k must be positive");
  double lm = std::log(static_cast<double>(M));
  return std::exp(-k_const * delta * lm) / (delta * std::sqrt(lm));
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::single_shot: return "single-shot";
    case Regime::wave: return "wave";
    default: return "undecodable";
  }
}

WaveReport regime_classify(const SparcParams& params, const Channel& channel,
                           const RegimeOptions& opts) {
  WaveReport rep;
  rep.capacity = channel.capacity();
  rep.rate = params.R_nats;
  rep.rate_eff = effective_rate(params.R_nats, params.omega, params.gamma);
  rep.delta = rep.capacity - rep.rate;
  rep.k_const = opts.k_const;
  if (rep.delta <= 0.0) {
    rep.regime = Regime::undecodable;
    rep.warnings.push_back("rate at or above capacity");
    return rep;
  }
  double dmax = std::min(rep.delta / (2.0 * params.R_nats), 0.5);
  rep.delta_slack = opts.delta_slack_override > 0.0 ? opts.delta_slack_override : 0.5 * dmax;
  if (!(rep.delta_slack > 0.0 && rep.delta_slack < dmax)) {
    rep.warnings.push_back("delta slack outside (0, min(gap/2R, 1/2))");
  }
  rep.h = h_delta(rep.delta, channel);
  rep.rho_max = 0.5 * rep.h;
  if (params.rho == 0.0) {
    rep.warnings.push_back("rho = 0: decoding-wave guarantees assume rho > 0");
  } else if (params.rho >= rep.rho_max) {
    rep.warnings.push_back("rho >= h(delta)/2: outside the certified coupling range");
  }
  rep.f_m_delta = f_m_delta(params.M, rep.delta_slack, opts.k_const);
  rep.frontier_threshold = std::min(rep.f_m_delta, 0.5);

  double f1 = channel.f_out(1.0);
  if (params.R_nats < (1.0 - params.rho) / (2.0 + rep.delta_slack) * f1) {
    rep.regime = Regime::single_shot;
    rep.g = 2 * params.omega + 1;
    rep.iters_budget = 1;
    return rep;
  }
  rep.g = params.omega >= 1 && params.rho > 0.0
              ? wave_speed_g(params.omega, params.rho, rep.delta, channel)
              : 0;
  if (rep.g >= 1) {
    rep.regime = Regime::wave;
    rep.iters_budget = max_iters(params.gamma, rep.g);
  } else {
    rep.regime = Regime::undecodable;
    rep.warnings.push_back("no certified wave speed at these parameters");
  }
  return rep;
}

std::vector<int> decoded_frontier(const SeTrajectory& se, double threshold) {
  std::vector<int> frontier;
  frontier.reserve(se.psi.size());
  for (const auto& psi : se.psi) {
    int k = 0;
    while (k < se.gamma && psi[k] <= threshold) ++k;
    frontier.push_back(k);
  }
  return frontier;
}

}  // namespace scsparc
