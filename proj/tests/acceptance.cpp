// Acceptance suite.  Each criterion prints one PASS/FAIL line; the process
// exits non-zero if any selected criterion fails.  Run with no arguments for
// the full suite or with a single number to run one criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "scsparc/channel.hpp"
#include "scsparc/codec.hpp"
#include "scsparc/numerics.hpp"
#include "scsparc/sim.hpp"
#include "scsparc/state_evolution.hpp"

using namespace scsparc;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int criterion, bool ok, double seconds, double budget, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%.1fs of %.0fs budget)\n", ok ? "PASS" : "FAIL",
              criterion, detail.c_str(), seconds, budget);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

Channel generic_awgn(double noise_var) {
  GenericChannelSpec spec;
  double inv = 1.0 / (2.0 * noise_var);
  double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * noise_var);
  spec.pout = [inv, norm](double y, double z) {
    double d = y - z;
    return norm * std::exp(-d * d * inv);
  };
  double sd = std::sqrt(noise_var);
  spec.sample = [sd](double u, Rng& rng) { return u + sd * rng.normal(); };
  spec.alphabet.continuous = true;
  spec.noise_scale = sd;
  return Channel::generic(std::move(spec));
}

double h2_nats(double e) { return -e * std::log(e) - (1.0 - e) * std::log(1.0 - e); }

ExperimentConfig desk_preset() {
  ExperimentConfig cfg;
  cfg.channel_kind = "awgn";
  cfg.channel_param = 1.0;
  cfg.L = 1024;
  cfg.M = 64;
  cfg.gamma = 32;
  cfg.omega = 3;
  cfg.rho = -1.0;  // h(gap)/8 from the wave analysis
  cfg.rate.mode = "ratio";
  cfg.rate.value = 0.75;
  cfg.master_seed = 2024;
  return cfg;
}

// 1. Generic-quadrature channel calculus reproduces the closed form.
void criterion_1() {
  Timer timer;
  Channel gen = generic_awgn(1.0);
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    double s = i / 100.0;
    worst = std::max(worst, std::abs(gen.f_out(s) - 1.0 / (s + 1.0)));
  }
  double secs = timer.seconds();
  bool ok = worst < 1e-6 && secs < 5.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "generic-path f_out vs 1/(sigma+1) on 101 points, max err %.2e", worst);
  report(1, ok, secs, 5, buf);
}

// 2. Potential identity f_out = -2 d(psi_out)/d(sigma).
void criterion_2() {
  Timer timer;
  const double h = 1e-4;
  double worst = 0.0;
  for (const Channel& ch : {Channel::awgn(1.0), Channel::bec(0.2), Channel::bsc(0.11)}) {
    for (int i = 1; i <= 9; ++i) {
      double s = i / 10.0;
      double deriv = (ch.psi_out(s + h) - ch.psi_out(s - h)) / (2.0 * h);
      double rel = std::abs(ch.f_out(s) + 2.0 * deriv) / std::abs(ch.f_out(s));
      worst = std::max(worst, rel);
    }
  }
  double secs = timer.seconds();
  bool ok = worst < 1e-3 && secs < 30.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "f_out + 2 psi_out' on three channels, max rel err %.2e", worst);
  report(2, ok, secs, 30, buf);
}

// 3. Capacity from the half-integral of f_out.
void criterion_3() {
  Timer timer;
  struct Case {
    Channel ch;
    double want;
    const char* name;
  };
  std::vector<Case> cases;
  cases.push_back({Channel::awgn(1.0), 0.5 * std::log(2.0), "awgn(1)"});
  cases.push_back({Channel::bec(0.2), 0.8 * std::log(2.0), "bec(0.2)"});
  cases.push_back({Channel::bsc(0.11), std::log(2.0) - h2_nats(0.11), "bsc(0.11)"});
  double worst = 0.0;
  for (const auto& c : cases) worst = std::max(worst, std::abs(c.ch.capacity() - c.want));
  double secs = timer.seconds();
  bool ok = worst < 1e-3 && secs < 30.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "capacity of awgn/bec/bsc, max err %.2e nats", worst);
  report(3, ok, secs, 30, buf);
}

// 4. Shape of f_out: non-negative and non-increasing.
void criterion_4() {
  Timer timer;
  bool ok = true;
  double worst_neg = 0.0, worst_mono = 0.0;
  for (const Channel& ch : {Channel::awgn(1.0), Channel::bec(0.2), Channel::bsc(0.11)}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 100; ++i) {
      double v = ch.f_out(i / 100.0);
      worst_neg = std::min(worst_neg, v);
      if (v > prev) worst_mono = std::max(worst_mono, v - prev);
      prev = v;
    }
  }
  ok = worst_neg >= -1e-9 && worst_mono <= 1e-7;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "f_out shape on 101 points: min value %.2e, worst increase %.2e", worst_neg,
                worst_mono);
  report(4, ok, timer.seconds(), 120, buf);
}

// 5. First state evolution step against the seeded closed form.
void criterion_5() {
  Timer timer;
  const int gamma = 32, omega = 2;
  const double rho = 0.05;
  SparcParams p = SparcParams::make(1024, 32, gamma, omega, rho, 0.3);
  BaseMatrix w = build_base_matrix(gamma, omega, rho);
  SeedSet seeds = seed_sections(gamma, omega);
  std::vector<double> psi0(gamma);
  for (int c = 0; c < gamma; ++c) psi0[c] = seeds.contains(c) ? 0.0 : 1.0;
  SeStep step = se_step(psi0, w, p, Channel::awgn(1.0), seeds, RngStream{1, 0}, 1000);

  auto closed = [&](int r1) {  // left-half row index, 1-based
    if (r1 <= 3 * omega) {
      return rho * (gamma - 8.0 * omega) / (gamma - omega - std::min(r1, omega + 1));
    }
    double kbar = std::min(r1 - 3 * omega, 2 * omega + 1);
    return kbar * (1.0 - rho) / (2.0 * omega + 1.0) +
           (gamma - 8.0 * omega - kbar) * rho / (gamma - 2.0 * omega - 1.0);
  };
  double worst = 0.0;
  for (int r1 = 1; r1 <= gamma; ++r1) {
    int m = r1 <= (gamma + 1) / 2 ? r1 : gamma - r1 + 1;
    worst = std::max(worst, std::abs(step.sigma[r1 - 1] - closed(m)));
  }
  bool ok = worst <= 1e-12;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "sigma^0 vs closed form, max err %.2e", worst);
  report(5, ok, timer.seconds(), 60, buf);
}

// 6. Desk preset decoding wave: symmetry, speed, meeting time.
void criterion_6() {
  Timer timer;
  ExperimentConfig cfg = desk_preset();
  Channel channel = Channel::from_config(cfg.channel_kind, cfg.channel_param);
  SweepPointResult point = resolve_sweep_point(cfg, channel, 0.0, false);
  const SparcParams& p = point.params;
  const WaveReport& wave = point.wave;
  bool ok = wave.regime == Regime::wave && wave.g >= 1;

  SeedSet seeds = seed_sections(p.gamma, p.omega);
  BaseMatrix w = build_base_matrix(p.gamma, p.omega, p.rho);
  int T = wave.iters_budget;
  SeTrajectory se =
      run_se(p, w, channel, seeds, T, 1e-9, RngStream{cfg.master_seed, 0}.derive("se", 0),
             cfg.se_n_mc);

  double asym = 0.0;
  for (int t = 0; t <= se.iters; ++t) {
    for (int c = 0; c < p.gamma / 2; ++c) {
      asym = std::max(asym, std::abs(se.psi[t][c] - se.psi[t][p.gamma - 1 - c]));
    }
  }
  ok = ok && asym <= 1e-12;

  auto frontier = decoded_frontier(se, wave.frontier_threshold);
  int half = (p.gamma + 1) / 2;
  bool advance_ok = true;
  for (int t = 1; t < static_cast<int>(frontier.size()); ++t) {
    int want = std::min(4 * p.omega + t * wave.g, half);
    if (frontier[t] < want) advance_ok = false;
  }
  bool met = frontier.back() >= half && se.iters <= T;
  ok = ok && advance_ok && met;
  double secs = timer.seconds();
  ok = ok && secs < 120.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "wave regime g=%d T=%d: asym %.1e, frontier advance %s, met at iter %d", wave.g,
                T, asym, advance_ok ? "ok" : "stalled", se.iters);
  report(6, ok, secs, 120, buf);
}

// 7. Posterior-mass expectation vs denoiser mean squared error.
void criterion_7() {
  Timer timer;
  bool ok = true;
  double worst_ratio = 0.0;
  for (long M : {2L, 16L, 64L}) {
    for (double tau : {0.05, 0.2, 1.0}) {
      auto eps = eps_tau(tau, M, 200000, RngStream{71, static_cast<uint64_t>(M)});
      Rng rng(RngStream{72, static_cast<uint64_t>(M * 7 + int(tau * 100))});
      std::vector<double> r(M), pi(M);
      const long n = 200000;
      double sum = 0.0, sumsq = 0.0;
      for (long k = 0; k < n; ++k) {
        for (long j = 0; j < M; ++j) r[j] = (j == 0 ? 1.0 : 0.0) + std::sqrt(tau) * rng.normal();
        g_in_section(r, tau, pi);
        double err = 0.0;
        for (long j = 0; j < M; ++j) {
          double d = (j == 0 ? 1.0 : 0.0) - pi[j];
          err += d * d;
        }
        sum += err;
        sumsq += err * err;
      }
      double mean = sum / n;
      double se_m = std::sqrt(std::max(0.0, sumsq / n - mean * mean) / n);
      double band = 4.0 * std::sqrt(se_m * se_m + eps.std_error * eps.std_error);
      double diff = std::abs((1.0 - eps.mean) - mean);
      worst_ratio = std::max(worst_ratio, diff / band);
      if (diff >= band) ok = false;
    }
  }
  double secs = timer.seconds();
  ok = ok && secs < 120.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "1 - eps(tau) vs sectionwise mmse over 9 settings, worst dev %.2f of band",
                worst_ratio);
  report(7, ok, secs, 120, buf);
}

// 8. Decoder tracks state evolution at the desk preset.
void criterion_8() {
  Timer timer;
  ExperimentConfig cfg = desk_preset();
  cfg.trials = 20;
  ExperimentReport rep = run_experiment(cfg);
  auto devs = compare_se(rep);
  double worst = 0.0;
  for (const auto& row : devs[0]) {
    worst = std::max(worst, std::abs(row.emp_mean - row.se_mse));
  }
  double secs = timer.seconds();
  bool ok = worst <= 0.05 && secs < 600.0 && rep.points[0].diverged == 0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "desk preset, %zu trials: max_t |mean mse - se| = %.4f", devs[0].size(), worst);
  report(8, ok, secs, 600, buf);
}

// 9. Error probability falls with block length at fixed rate ratio.
void criterion_9() {
  Timer timer;
  ExperimentConfig cfg;
  cfg.channel_kind = "awgn";
  cfg.channel_param = 1.0;
  cfg.L = 256;
  cfg.M = 32;
  cfg.gamma = 32;
  cfg.omega = 3;
  cfg.rho = -1.0;
  cfg.rate.mode = "ratio";
  cfg.rate.value = 0.8;
  cfg.trials = 200;
  cfg.master_seed = 4096;
  cfg.sweep_axis = "n";
  double lnM = std::log(32.0);
  double c = Channel::awgn(1.0).capacity();
  long n0 = static_cast<long>(std::lround(256.0 * lnM / (0.8 * c) / 32.0)) * 32;
  cfg.sweep_values = {static_cast<double>(n0), static_cast<double>(2 * n0),
                      static_cast<double>(3 * n0)};
  ExperimentReport rep = run_experiment(cfg);
  bool ok = rep.points.size() == 3;
  std::string detail = "P(err) over n:";
  for (const auto& point : rep.points) {
    char b[48];
    std::snprintf(b, sizeof(b), " %.3f(%ld/%ld)", point.p_hat, point.error_events,
                  static_cast<long>(point.trials.size()));
    detail += b;
  }
  for (size_t i = 1; i < rep.points.size(); ++i) {
    if (!(rep.points[i].p_hat < rep.points[i - 1].p_hat)) ok = false;
  }
  double secs = timer.seconds();
  ok = ok && secs < 900.0;
  report(9, ok, secs, 900, detail);
}

// 10. Generalized linear model: tracking and the Gaussian fixed point.
void criterion_10() {
  Timer timer;
  GlmConfig bg;
  bg.channel_kind = "awgn";
  bg.channel_param = 0.005;
  bg.N = 20000;
  bg.alpha = 0.35;
  bg.gamma = 10;
  bg.omega = 1;
  bg.rho = 0.01;
  bg.prior_kind = "bg";
  bg.prior_p1 = 0.1;
  bg.prior_p2 = 1.0;
  bg.trials = 20;
  bg.master_seed = 555;
  bg.t_max = 60;
  GlmReport bg_rep = run_glm_experiment(bg);

  GlmConfig ga;
  ga.channel_kind = "awgn";
  ga.channel_param = 0.01;
  ga.N = 20000;
  ga.alpha = 1.0;
  ga.gamma = 4;
  ga.omega = 0;
  ga.rho = 0.0;
  ga.prior_kind = "gaussian";
  ga.prior_p1 = 0.0;
  ga.prior_p2 = 1.0;
  ga.trials = 20;
  ga.master_seed = 556;
  ga.t_max = 200;
  GlmReport ga_rep = run_glm_experiment(ga);
  double want = glm_gaussian_fixed_point(1.0, ga_rep.params.alpha, 0.01);
  double fp_err = std::abs(ga_rep.mse_mean_final - want);

  double secs = timer.seconds();
  bool ok = bg_rep.max_tracking_dev <= 0.05 && fp_err <= 1e-3 && secs < 300.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "bg tracking dev %.4f (<=0.05), gaussian fixed point err %.2e (<=1e-3)",
                bg_rep.max_tracking_dev, fp_err);
  report(10, ok, secs, 300, buf);
}

// 11. Byte-identical outputs across runs and worker counts.
void criterion_11() {
  Timer timer;
  namespace fs = std::filesystem;
  ExperimentConfig cfg;
  cfg.channel_kind = "awgn";
  cfg.channel_param = 1.0;
  cfg.L = 256;
  cfg.M = 32;
  cfg.gamma = 32;
  cfg.omega = 3;
  cfg.rho = -1.0;
  cfg.rate.mode = "ratio";
  cfg.rate.value = 0.75;
  cfg.trials = 6;
  cfg.master_seed = 31415;
  cfg.se_n_mc = 20000;

  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  fs::path base = fs::temp_directory_path() / "scsparc_acceptance11";
  fs::remove_all(base);
  std::vector<std::string> snapshots;
  int run_id = 0;
  for (const char* threads : {"1", "4", "1"}) {
    setenv("SC_SPARC_THREADS", threads, 1);
    fs::path dir = base / ("run" + std::to_string(run_id++));
    write_outputs(run_experiment(cfg), dir.string());
    std::string all;
    for (const char* name : {"results.csv", "summary.json", "se_trajectory.csv"}) {
      all += slurp(dir / name);
    }
    snapshots.push_back(all);
  }
  unsetenv("SC_SPARC_THREADS");
  bool ok = snapshots[0] == snapshots[1] && snapshots[0] == snapshots[2] &&
            !snapshots[0].empty();
  fs::remove_all(base);
  double secs = timer.seconds();
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "results/summary/se files byte-identical over reruns and 1 vs 4 workers: %s",
                ok ? "yes" : "no");
  report(11, ok, secs, 300, buf);
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  void (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                          criterion_5, criterion_6, criterion_7, criterion_8,
                          criterion_9, criterion_10, criterion_11};
  if (only >= 1 && only <= 11) {
    criteria[only - 1]();
  } else {
    for (auto* fn : criteria) fn();
  }
  return g_failures == 0 ? 0 : 1;
}
