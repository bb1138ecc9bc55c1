#include "scsparc/glm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scsparc/errors.hpp"
#include "scsparc/numerics.hpp"

namespace scsparc {

namespace {

inline double log_normal_pdf(double x, double var) {
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * x * x / var;
}

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

PriorSpec PriorSpec::gaussian(double mean, double var) {
  if (!(var > 0.0)) throw ParamError("prior gaussian: variance must be positive");
  return PriorSpec{Kind::gaussian, mean, var};
}

PriorSpec PriorSpec::bernoulli(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParamError("prior bernoulli: p must lie in (0,1)");
  return PriorSpec{Kind::bernoulli, p, 0.0};
}

PriorSpec PriorSpec::bernoulli_gaussian(double p, double var) {
  if (!(p > 0.0 && p < 1.0)) throw ParamError("prior bg: p must lie in (0,1)");
  if (!(var > 0.0)) throw ParamError("prior bg: slab variance must be positive");
  return PriorSpec{Kind::bernoulli_gaussian, p, var};
}

PriorSpec PriorSpec::from_config(const std::string& kind, double p1, double p2) {
  if (kind == "gaussian") return gaussian(p1, p2);
  if (kind == "bernoulli") return bernoulli(p1);
  if (kind == "bg" || kind == "bernoulli_gaussian") return bernoulli_gaussian(p1, p2);
  throw ParamError("unknown prior '" + kind + "' (expected gaussian|bernoulli|bg)");
}

double PriorSpec::mean() const {
  switch (kind) {
    case Kind::gaussian: return a;
    case Kind::bernoulli: return a;
    default: return 0.0;
  }
}

double PriorSpec::second_moment() const {
  switch (kind) {
    case Kind::gaussian: return a * a + b;
    case Kind::bernoulli: return a;       // values {0, 1}
    default: return a * b;                // p * slab variance
  }
}

double PriorSpec::variance() const {
  double m = mean();
  return second_moment() - m * m;
}

double PriorSpec::sample(Rng& rng) const {
  switch (kind) {
    case Kind::gaussian: return a + std::sqrt(b) * rng.normal();
    case Kind::bernoulli: return rng.uniform() < a ? 1.0 : 0.0;
    default: return rng.uniform() < a ? std::sqrt(b) * rng.normal() : 0.0;
  }
}

std::string PriorSpec::describe() const {
  switch (kind) {
    case Kind::gaussian: return "gaussian(" + std::to_string(a) + "," + std::to_string(b) + ")";
    case Kind::bernoulli: return "bernoulli(" + std::to_string(a) + ")";
    default: return "bg(" + std::to_string(a) + "," + std::to_string(b) + ")";
  }
}

double g_in_glm(double r, double tau, const PriorSpec& prior) {
  if (!(tau > 0.0)) throw ParamError("g_in_glm: tau must be positive");
  switch (prior.kind) {
    case PriorSpec::Kind::gaussian:
      return (r * prior.b + prior.a * tau) / (prior.b + tau);
    case PriorSpec::Kind::bernoulli: {
      double p = prior.a;
      double t = std::log((1.0 - p) / p) + (1.0 - 2.0 * r) / (2.0 * tau);
      return sigmoid(-t);
    }
    default: {
      double p = prior.a, v = prior.b;
      double t = std::log((1.0 - p) / p) + log_normal_pdf(r, tau) - log_normal_pdf(r, v + tau);
      return sigmoid(-t) * r * v / (v + tau);
    }
  }
}

double psi_update_glm(double tau, const PriorSpec& prior) {
  if (!(tau > 0.0)) throw ParamError("psi_update_glm: tau must be positive");
  if (prior.kind == PriorSpec::Kind::gaussian) {
    return prior.b * tau / (prior.b + tau);
  }
  if (tau < 1e-12) return 0.0;
  // mmse = E beta^2 - integral of num(r)^2 / den(r) over the marginal of
  // r = beta + sqrt(tau) Z, with num = E[beta P(r | beta)].
  double p = prior.a;
  double sd = std::sqrt(tau);
  std::vector<double> cuts;  // segment boundaries around the mixture peaks
  std::function<double(double)> num, den;
  if (prior.kind == PriorSpec::Kind::bernoulli) {
    num = [&](double r) { return p * std::exp(log_normal_pdf(r - 1.0, tau)); };
    den = [&](double r) {
      return (1.0 - p) * std::exp(log_normal_pdf(r, tau)) + num(r);
    };
    cuts = {-12.0 * sd, 12.0 * sd, 1.0 - 12.0 * sd, 1.0 + 12.0 * sd};
  } else {
    double v = prior.b;
    double vt = v + tau;
    double wide = 12.0 * std::sqrt(vt);
    num = [&, vt](double r) { return p * std::exp(log_normal_pdf(r, vt)) * r * prior.b / vt; };
    den = [&, vt](double r) {
      return (1.0 - p) * std::exp(log_normal_pdf(r, tau)) +
             p * std::exp(log_normal_pdf(r, vt));
    };
    cuts = {-wide, -12.0 * sd, 12.0 * sd, wide};
  }
  std::sort(cuts.begin(), cuts.end());
  auto integrand = [&](double r) {
    double d = den(r);
    if (d <= 0.0) return 0.0;
    double nu = num(r);
    return nu * nu / d;
  };
  double second = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) {
      second += integrate_1d(integrand, cuts[i], cuts[i + 1], 1e-12);
    }
  }
  return std::max(0.0, prior.second_moment() - second);
}

GlmParams GlmParams::make(long N, double alpha, int gamma, int omega, double rho,
                          PriorSpec prior) {
  if (N < 1) throw ParamError("GlmParams: N must be positive");
  if (!(alpha > 0.0)) throw ParamError("GlmParams: alpha must be positive");
  if (gamma < 1 || N % gamma != 0) throw ParamError("GlmParams: gamma must divide N");
  if (gamma <= 8 * omega) throw ParamError("GlmParams: need gamma > 8*omega");
  if (!(rho >= 0.0 && rho < 1.0)) throw ParamError("GlmParams: rho must lie in [0,1)");
  GlmParams p;
  p.N = N;
  p.gamma = gamma;
  p.omega = omega;
  p.rho = rho;
  p.prior = prior;
  long n_raw = static_cast<long>(std::lround(alpha * static_cast<double>(N)));
  p.n = ((n_raw + gamma - 1) / gamma) * gamma;
  p.alpha = static_cast<double>(p.n) / static_cast<double>(N);
  return p;
}

double GlmSeTrajectory::mean_psi(int t) const {
  double acc = 0.0;
  for (double v : psi[t]) acc += v;
  return acc / static_cast<double>(gamma);
}

GlmSeTrajectory run_se_glm(const GlmParams& params, const BaseMatrix& w, const Channel& channel,
                           const SeedSet& seeds, int t_max, double stop_tol) {
  if (t_max < 1) throw ParamError("run_se_glm: t_max must be at least 1");
  const int gamma = w.gamma;
  const double m2 = params.prior.second_moment();
  GlmSeTrajectory se;
  se.gamma = gamma;
  std::vector<double> psi(gamma, 0.0);
  for (int c = 0; c < gamma; ++c) psi[c] = seeds.contains(c) ? 0.0 : m2;
  se.psi.push_back(psi);
  for (int t = 0; t < t_max; ++t) {
    std::vector<double> sigma(gamma), fout(gamma), tau(gamma), next(gamma, 0.0);
    for (int r = 0; r < gamma; ++r) {
      double acc = 0.0;
      for (int c = 0; c < gamma; ++c) acc += w(r, c) * psi[c];
      sigma[r] = std::min(acc / (gamma * m2), 1.0);
      fout[r] = channel.f_out(sigma[r]);
      if (!(fout[r] > 0.0)) {
        throw DivergedError("run_se_glm: f_out vanished at row block " + std::to_string(r + 1));
      }
    }
    for (int c = 0; c < gamma; ++c) {
      double acc = 0.0;
      for (int r = 0; r < gamma; ++r) acc += w(r, c) * fout[r];
      tau[c] = (m2 / params.alpha) * gamma / acc;
      next[c] = seeds.contains(c) ? 0.0 : psi_update_glm(tau[c], params.prior);
    }
    se.sigma.push_back(std::move(sigma));
    se.tau.push_back(std::move(tau));
    double delta = 0.0;
    for (int c = 0; c < gamma; ++c) delta = std::max(delta, std::abs(next[c] - psi[c]));
    psi = std::move(next);
    se.psi.push_back(psi);
    se.iters = t + 1;
    if (delta <= stop_tol) break;
  }
  return se;
}

double glm_gaussian_fixed_point(double prior_var, double alpha, double noise_var) {
  // psi = v tau/(v+tau) with tau = (psi + v sigma_w^2)/alpha reduces to a
  // quadratic in psi; take the positive root.
  double v = prior_var;
  double b = v * (alpha - 1.0 + noise_var);
  double c = -v * v * noise_var;
  return 0.5 * (-b + std::sqrt(b * b - 4.0 * c));
}

GlmDecoderRun gamp_decode_glm(const DesignMatrix& a, std::span<const double> y,
                              const GlmParams& params, const BaseMatrix& w, const SeedSet& seeds,
                              const Channel& channel, std::span<const double> beta_true,
                              const GlmSeTrajectory& se, int max_iters) {
  const long n = params.n, N = params.N;
  const int gamma = params.gamma;
  const long rpb = n / gamma, cpb = N / gamma;
  if (static_cast<long>(y.size()) != n) throw ParamError("gamp_decode_glm: y length mismatch");
  if (static_cast<long>(beta_true.size()) != N) {
    throw ParamError("gamp_decode_glm: beta_true length mismatch");
  }

  std::vector<int> unseeded;
  for (int c = 0; c < gamma; ++c) {
    if (!seeds.contains(c)) unseeded.push_back(c);
  }
  int T = static_cast<int>(se.sigma.size());
  if (max_iters >= 0) T = std::min(T, max_iters);

  std::vector<double> beta(N, 0.0);
  std::vector<double> u_seed(n, 0.0);
  for (int c = 0; c < gamma; ++c) {
    if (!seeds.contains(c)) continue;
    for (long j = c * cpb; j < (c + 1) * cpb; ++j) {
      beta[j] = beta_true[j];
      if (beta_true[j] != 0.0) a.add_column(j, beta_true[j], u_seed);
    }
  }

  std::vector<double> s(n, 0.0), p(n, 0.0), r(N, 0.0), u(n, 0.0);
  std::vector<double> beta_prev(N, 0.0);
  GlmDecoderRun run;
  // Iterate-motion history: once the update size turns back up the finite-N
  // fixed point has been reached and further iterations only accumulate
  // instability, so stop there.
  double move_prev2 = std::numeric_limits<double>::infinity();
  double move_prev = std::numeric_limits<double>::infinity();
  for (int t = 0; t < T; ++t) {
    const auto& sigma_t = se.sigma[t];
    const auto& tau_t = se.tau[t];
    a.matvec(beta, u, unseeded);
    for (long i = 0; i < n; ++i) p[i] = u_seed[i] + u[i] - sigma_t[i / rpb] * s[i];
    for (long i = 0; i < n; ++i) {
      double sg = std::max(sigma_t[i / rpb], 1e-12);
      s[i] = channel.g_out(p[i], y[i], sg);
      if (!std::isfinite(s[i])) {
        throw DivergedError("gamp_decode_glm: non-finite s at iteration " + std::to_string(t));
      }
    }
    a.matvec_t(s, r, unseeded);
    beta_prev = beta;
    for (int c : unseeded) {
      double tc = std::max(tau_t[c], 1e-300);
      for (long j = c * cpb; j < (c + 1) * cpb; ++j) {
        beta[j] = g_in_glm(beta[j] + tc * r[j], tc, params.prior);
        if (!std::isfinite(beta[j])) {
          throw DivergedError("gamp_decode_glm: non-finite beta at iteration " +
                              std::to_string(t));
        }
      }
    }
    GlmIterationRecord rec;
    rec.t = t;
    double err = 0.0, move = 0.0;
    for (long j = 0; j < N; ++j) {
      double d = beta[j] - beta_true[j];
      err += d * d;
      double m = beta[j] - beta_prev[j];
      move += m * m;
    }
    rec.mse_empirical = err / static_cast<double>(N);
    rec.mse_se = t + 1 < static_cast<int>(se.psi.size()) ? se.mean_psi(t + 1) : 0.0;
    run.history.push_back(rec);
    run.iters = t + 1;

    move /= static_cast<double>(N);
    if (move < 1e-14 * params.prior.second_moment()) break;
    if (t >= 8 && move > move_prev && move_prev > move_prev2) break;
    move_prev2 = move_prev;
    move_prev = move;
  }
  run.beta = std::move(beta);
  return run;
}

}  // namespace scsparc
