#include "scsparc/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "scsparc/errors.hpp"

namespace scsparc {

Message random_message(const SparcParams& params, RngStream stream) {
  Rng rng(stream);
  Message msg;
  msg.indices.resize(params.L);
  for (long l = 0; l < params.L; ++l) {
    msg.indices[l] = 1 + static_cast<long>(rng.next_u64() % static_cast<uint64_t>(params.M));
  }
  return msg;
}

std::vector<double> encode(const Message& msg, const SparcParams& params) {
  if (static_cast<long>(msg.indices.size()) != params.L) {
    throw ParamError("encode: message must have exactly L sections");
  }
  std::vector<double> beta(params.N, 0.0);
  for (long l = 0; l < params.L; ++l) {
    long idx = msg.indices[l];
    if (idx < 1 || idx > params.M) {
      throw ParamError("encode: section " + std::to_string(l + 1) + " index out of [1, M]");
    }
    beta[l * params.M + (idx - 1)] = 1.0;
  }
  return beta;
}

std::vector<double> transmit(const DesignMatrix& a, std::span<const double> beta,
                             const Channel& channel, RngStream stream) {
  std::vector<double> x(a.rows(), 0.0);
  a.matvec(beta, x);  // one-hot input: only L columns touched
  std::vector<double> y(a.rows());
  Rng rng(stream.derive("noise"));
  channel.sample_output(x, y, rng);
  return y;
}

void g_in_section(std::span<const double> r, double tau, std::span<double> out) {
  if (!(tau > 0.0)) throw ParamError("g_in: tau must be positive");
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : r) mx = std::max(mx, v / tau);
  double sum = 0.0;
  for (size_t i = 0; i < r.size(); ++i) {
    out[i] = std::exp(r[i] / tau - mx);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
}

Message hard_decision(std::span<const double> beta, const SparcParams& params) {
  Message msg;
  msg.indices.resize(params.L);
  for (long l = 0; l < params.L; ++l) {
    const double* sec = beta.data() + l * params.M;
    long best = 0;
    for (long j = 1; j < params.M; ++j) {
      if (sec[j] > sec[best]) best = j;  // ties keep the lowest index
    }
    msg.indices[l] = best + 1;
  }
  return msg;
}

SectionErrorRate section_error_rate(const Message& decoded, const Message& truth,
                                    const SeedSet& seeds, const SparcParams& params) {
  if (decoded.indices.size() != truth.indices.size()) {
    throw ParamError("section_error_rate: length mismatch");
  }
  long spb = params.sections_per_block();
  long wrong = 0, wrong_unseeded = 0, unseeded_total = 0;
  for (long l = 0; l < params.L; ++l) {
    bool bad = decoded.indices[l] != truth.indices[l];
    wrong += bad;
    int block = static_cast<int>(l / spb);
    if (!seeds.contains(block)) {
      ++unseeded_total;
      wrong_unseeded += bad;
    }
  }
  SectionErrorRate ser;
  ser.wrong_sections = wrong;
  ser.overall = static_cast<double>(wrong) / static_cast<double>(params.L);
  ser.unseeded = unseeded_total > 0
                     ? static_cast<double>(wrong_unseeded) / static_cast<double>(unseeded_total)
                     : 0.0;
  return ser;
}

namespace {

// Mean posterior mass on the running hard decision, and the error-variance
// proxy 1 - ||pi||^2 per block (used by the online schedule).
double top_mass_mean(std::span<const double> beta, const SparcParams& params,
                     const std::vector<int>& unseeded) {
  long spb = params.sections_per_block();
  double acc = 0.0;
  long count = 0;
  for (int c : unseeded) {
    for (long l = c * spb; l < (c + 1) * spb; ++l) {
      const double* sec = beta.data() + l * params.M;
      acc += *std::max_element(sec, sec + params.M);
      ++count;
    }
  }
  return count > 0 ? acc / static_cast<double>(count) : 1.0;
}

}  // namespace

DecoderRun gamp_decode(const DesignMatrix& a, std::span<const double> y,
                       const SparcParams& params, const BaseMatrix& w, const SeedSet& seeds,
                       const Channel& channel, std::span<const double> beta_true,
                       const DecoderSchedule& schedule, const DecodeOptions& opts) {
  const long n = params.n, N = params.N, M = params.M;
  const int gamma = params.gamma;
  const long rpb = params.rows_per_block();
  const long spb = params.sections_per_block();
  if (static_cast<long>(y.size()) != n) throw ParamError("gamp_decode: y must have length n");
  if (static_cast<long>(beta_true.size()) != N) {
    throw ParamError("gamp_decode: beta_true must have length N (seeded blocks are pinned)");
  }

  std::vector<int> unseeded;
  for (int c = 0; c < gamma; ++c) {
    if (!seeds.contains(c)) unseeded.push_back(c);
  }

  int T = opts.max_iters >= 0 ? opts.max_iters : static_cast<int>(schedule.sigma.size());
  if (!opts.online_params) {
    T = std::min<int>(T, static_cast<int>(schedule.sigma.size()));
  }

  // Initialization: seeded blocks carry the truth, the rest start at zero.
  std::vector<double> beta(N, 0.0);
  long cpb = params.cols_per_block();
  for (int c = 0; c < gamma; ++c) {
    if (!seeds.contains(c)) continue;
    std::copy(beta_true.begin() + c * cpb, beta_true.begin() + (c + 1) * cpb,
              beta.begin() + c * cpb);
  }

  // The seeded blocks never change, so their contribution to A beta is a
  // fixed vector built from the hot columns.
  std::vector<double> u_seed(n, 0.0);
  for (int c = 0; c < gamma; ++c) {
    if (!seeds.contains(c)) continue;
    for (long j = c * cpb; j < (c + 1) * cpb; ++j) {
      if (beta_true[j] != 0.0) a.add_column(j, beta_true[j], u_seed);
    }
  }

  std::vector<double> s(n, 0.0), p(n, 0.0), r(N, 0.0), u(n, 0.0);
  std::vector<double> sigma_t(gamma, 0.0), tau_t(gamma, 0.0);
  std::vector<double> psi_hat(gamma, 0.0);  // online mode error proxy
  for (int c : unseeded) psi_hat[c] = 1.0;

  DecoderRun run;
  Message truth_msg = hard_decision(beta_true, params);

  for (int t = 0; t < T; ++t) {
    if (opts.online_params) {
      for (int rb = 0; rb < gamma; ++rb) {
        double acc = 0.0;
        for (int c = 0; c < gamma; ++c) acc += w(rb, c) * psi_hat[c];
        sigma_t[rb] = acc / gamma;
      }
      double rate_factor = params.R_nats / std::log(static_cast<double>(M));
      for (int c = 0; c < gamma; ++c) {
        double acc = 0.0;
        for (int rb = 0; rb < gamma; ++rb) acc += w(rb, c) * channel.f_out(sigma_t[rb]);
        tau_t[c] = rate_factor * gamma / acc;
      }
    } else {
      sigma_t = schedule.sigma[t];
      tau_t = schedule.tau[t];
    }

    // p^t = A beta^{t-1} - sigma^t s^{t-1}
    a.matvec(beta, u, unseeded);
    for (long i = 0; i < n; ++i) {
      p[i] = u_seed[i] + u[i] - sigma_t[i / rpb] * s[i];
    }

    // s^t = g_out(p^t, y, sigma^t)
    for (long i = 0; i < n; ++i) {
      double sg = std::max(sigma_t[i / rpb], 1e-12);
      s[i] = channel.g_out(p[i], y[i], sg);
      if (!std::isfinite(s[i])) {
        throw DivergedError("gamp_decode: non-finite s at iteration " + std::to_string(t) +
                            ", row block " + std::to_string(i / rpb + 1));
      }
    }

    // r^t = beta^{t-1} + tau^t A^T s^t on unseeded blocks, then the
    // sectionwise denoiser.
    a.matvec_t(s, r, unseeded);
    for (int c : unseeded) {
      double tc = std::max(tau_t[c], 1e-300);
      for (long j = c * cpb; j < (c + 1) * cpb; ++j) r[j] = beta[j] + tc * r[j];
      for (long l = c * spb; l < (c + 1) * spb; ++l) {
        std::span<const double> rin(r.data() + l * M, M);
        std::span<double> bout(beta.data() + l * M, M);
        g_in_section(rin, tc, bout);
      }
    }
    for (long j = 0; j < N; ++j) {
      if (!std::isfinite(beta[j])) {
        throw DivergedError("gamp_decode: non-finite beta at iteration " + std::to_string(t) +
                            ", block " + std::to_string(j / cpb + 1));
      }
    }

    if (opts.online_params) {
      for (int c : unseeded) {
        double acc = 0.0;
        for (long l = c * spb; l < (c + 1) * spb; ++l) {
          const double* sec = beta.data() + l * M;
          double m2 = 0.0;
          for (long j = 0; j < M; ++j) m2 += sec[j] * sec[j];
          acc += 1.0 - m2;
        }
        psi_hat[c] = std::clamp(acc / spb, 0.0, 1.0);
      }
    }

    IterationRecord rec;
    rec.t = t;
    double err = 0.0;
    for (long j = 0; j < N; ++j) {
      double d = beta[j] - beta_true[j];
      err += d * d;
    }
    rec.mse_empirical = err / static_cast<double>(params.L);
    rec.mse_se = (!opts.online_params && t < static_cast<int>(schedule.mse_se.size()))
                     ? schedule.mse_se[t]
                     : 0.0;
    Message current = hard_decision(beta, params);
    rec.ser_running = section_error_rate(current, truth_msg, seeds, params).unseeded;
    run.history.push_back(rec);

    if (opts.store_iterates) {
      run.p_iters.push_back(p);
      run.s_iters.push_back(s);
      run.r_iters.push_back(r);
      run.beta_iters.push_back(beta);
    }
    run.iters = t + 1;

    if (top_mass_mean(beta, params, unseeded) >= 1.0 - opts.stop_mass) break;
  }

  run.beta = std::move(beta);
  run.decoded = hard_decision(run.beta, params);
  return run;
}

}  // namespace scsparc
