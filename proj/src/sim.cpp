#include "scsparc/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "scsparc/errors.hpp"

namespace scsparc {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double wilson_lo(double p, long n, double z) {
  if (n == 0) return 0.0;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = p + z2 / (2.0 * n);
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return std::max(0.0, (center - half) / denom);
}

double wilson_hi(double p, long n, double z) {
  if (n == 0) return 1.0;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = p + z2 / (2.0 * n);
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return std::min(1.0, (center + half) / denom);
}

constexpr double kZ95 = 1.959963984540054;

long round_to_multiple(double x, long m, long floor_value) {
  long v = static_cast<long>(std::lround(x / m)) * m;
  return std::max(v, floor_value);
}

}  // namespace

int worker_limit() {
  if (const char* env = std::getenv("SC_SPARC_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ParamError(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("channel")) {
      cfg.channel_kind = j["channel"].value("kind", cfg.channel_kind);
      cfg.channel_param = j["channel"].value("param", cfg.channel_param);
    }
    if (j.contains("code")) {
      const auto& c = j["code"];
      cfg.L = c.value("L", cfg.L);
      cfg.M = c.value("M", cfg.M);
      cfg.gamma = c.value("gamma", cfg.gamma);
      cfg.omega = c.value("omega", cfg.omega);
      cfg.rho = c.value("rho", cfg.rho);
      if (c.contains("rate")) {
        cfg.rate.mode = c["rate"].value("mode", cfg.rate.mode);
        cfg.rate.value = c["rate"].value("value", cfg.rate.value);
      }
    }
    cfg.trials = j.value("trials", cfg.trials);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    if (j.contains("sweep")) {
      cfg.sweep_axis = j["sweep"].value("axis", std::string());
      cfg.sweep_values = j["sweep"].value("values", std::vector<double>());
    }
    if (j.contains("decoder")) {
      const auto& d = j["decoder"];
      cfg.decoder_max_iters = d.value("max_iters", cfg.decoder_max_iters);
      cfg.decoder_stop_mass = d.value("stop_mass", cfg.decoder_stop_mass);
      cfg.decoder_online = d.value("online", cfg.decoder_online);
    }
    if (j.contains("se")) {
      const auto& s = j["se"];
      cfg.se_n_mc = s.value("n_mc", cfg.se_n_mc);
      cfg.se_stop_tol = s.value("stop_tol", cfg.se_stop_tol);
      cfg.se_t_max = s.value("t_max", cfg.se_t_max);
    }
    cfg.error_threshold = j.value("error_threshold", cfg.error_threshold);
    cfg.max_memory_gb = j.value("max_memory_gb", cfg.max_memory_gb);
    cfg.delta_slack = j.value("delta_slack", cfg.delta_slack);
    cfg.k_const = j.value("k_const", cfg.k_const);
  } catch (const json::exception& e) {
    throw ParamError(std::string("config: ") + e.what());
  }
  if (cfg.trials < 1) throw ParamError("config: trials must be at least 1");
  if (j.contains("sweep")) {
    if (cfg.sweep_values.empty()) throw ParamError("config: sweep.values must be non-empty");
    for (size_t i = 1; i < cfg.sweep_values.size(); ++i) {
      if (!(cfg.sweep_values[i] > cfg.sweep_values[i - 1])) {
        throw ParamError("config: sweep values must be strictly increasing");
      }
    }
  }
  return cfg;
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["channel"] = {{"kind", channel_kind}, {"param", channel_param}};
  j["code"] = {{"L", L},       {"M", M},     {"gamma", gamma},
               {"omega", omega}, {"rho", rho},
               {"rate", {{"mode", rate.mode}, {"value", rate.value}}}};
  j["trials"] = trials;
  j["master_seed"] = master_seed;
  if (!sweep_axis.empty()) j["sweep"] = {{"axis", sweep_axis}, {"values", sweep_values}};
  j["decoder"] = {{"max_iters", decoder_max_iters},
                  {"stop_mass", decoder_stop_mass},
                  {"online", decoder_online}};
  j["se"] = {{"n_mc", se_n_mc}, {"stop_tol", se_stop_tol}, {"t_max", se_t_max}};
  j["error_threshold"] = error_threshold;
  j["max_memory_gb"] = max_memory_gb;
  j["delta_slack"] = delta_slack;
  j["k_const"] = k_const;
  return j.dump(2);
}

namespace {

json wave_to_json(const WaveReport& w) {
  json j;
  j["capacity_nats"] = w.capacity;
  j["rate_nats"] = w.rate;
  j["rate_eff_nats"] = w.rate_eff;
  j["delta"] = w.delta;
  j["delta_slack"] = w.delta_slack;
  j["h_delta"] = w.h;
  j["rho_max"] = w.rho_max;
  j["g"] = w.g;
  j["iters_budget"] = w.iters_budget;
  j["f_m_delta"] = w.f_m_delta;
  j["k_const"] = w.k_const;
  j["frontier_threshold"] = w.frontier_threshold;
  j["regime"] = regime_name(w.regime);
  j["warnings"] = w.warnings;
  return j;
}

json params_to_json(const SparcParams& p, double rate_eff) {
  json j;
  j["L"] = p.L;
  j["M"] = p.M;
  j["gamma"] = p.gamma;
  j["omega"] = p.omega;
  j["rho"] = p.rho;
  j["n"] = p.n;
  j["N"] = p.N;
  j["alpha"] = p.alpha;
  j["R_nats"] = p.R_nats;
  j["R_bits"] = p.R_nats / std::log(2.0);
  j["R_eff_nats"] = rate_eff;
  return j;
}

TrialRecord run_trial(const ExperimentConfig& cfg, const Channel& channel,
                      const SweepPointResult& point, const BaseMatrix& w, const SeedSet& seeds,
                      const std::vector<int>& unseeded, long point_idx, long trial_id) {
  auto t0 = std::chrono::steady_clock::now();
  RngStream stream = RngStream{cfg.master_seed, 0}
                         .derive("point", static_cast<uint64_t>(point_idx))
                         .derive("trial", static_cast<uint64_t>(trial_id));
  TrialRecord rec;
  rec.trial = trial_id;
  rec.stream_id = stream.stream_id;

  const SparcParams& params = point.params;
  Message msg = random_message(params, stream.derive("msg"));
  std::vector<double> beta = encode(msg, params);

  DesignMatrix::Options opts;
  opts.variance_divisor = static_cast<double>(params.L);
  opts.resident_cols = unseeded;
  opts.max_memory_gb = cfg.max_memory_gb;
  DesignMatrix a(params.n, params.N, w, stream.derive("matrix"), opts);

  std::vector<double> y = transmit(a, beta, channel, stream.derive("channel"));

  DecoderSchedule schedule;
  schedule.sigma = point.se.sigma;
  schedule.tau = point.se.tau;
  for (int t = 0; t < point.se.iters; ++t) schedule.mse_se.push_back(point.se.mean_psi(t + 1));

  DecodeOptions dopts;
  dopts.max_iters = cfg.decoder_max_iters;
  dopts.stop_mass = cfg.decoder_stop_mass;
  dopts.online_params = cfg.decoder_online;

  try {
    DecoderRun run = gamp_decode(a, y, params, w, seeds, channel, beta, schedule, dopts);
    SectionErrorRate ser = section_error_rate(run.decoded, msg, seeds, params);
    rec.iters = run.iters;
    rec.ser_overall = ser.overall;
    rec.ser_unseeded = ser.unseeded;
    rec.error_event = ser.unseeded > cfg.error_threshold;
    rec.history = run.history;
    if (!run.history.empty()) {
      rec.mse_final = run.history.back().mse_empirical;
      for (const auto& h : run.history) {
        rec.max_dev_vs_se = std::max(rec.max_dev_vs_se, std::abs(h.mse_empirical - h.mse_se));
      }
    }
  } catch (const DivergedError&) {
    rec.diverged = true;
    rec.error_event = true;
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace

SweepPointResult resolve_sweep_point(const ExperimentConfig& cfg, const Channel& channel,
                                     double axis_value, bool has_axis) {
  double cap = channel.capacity();
  long L = cfg.L, M = cfg.M;
  int gamma = cfg.gamma, omega = cfg.omega;

  auto target_rate = [&](double ratio_or_rate) {
    if (cfg.rate.mode == "ratio") return ratio_or_rate * cap;
    if (cfg.rate.mode == "nats") return ratio_or_rate;
    if (cfg.rate.mode == "bits") return ratio_or_rate * std::log(2.0);
    throw ParamError("config: rate.mode must be ratio|nats|bits");
  };
  double R_target = target_rate(cfg.rate.value);

  long n_req = 0;
  const std::string& axis = cfg.sweep_axis;
  if (has_axis) {
    if (axis == "n") {
      n_req = ((static_cast<long>(std::llround(axis_value)) + gamma - 1) / gamma) * gamma;
      if (cfg.rate.mode == "ratio") {
        // Hold R/C fixed: the section count scales with the block length.
        double lnM = std::log(static_cast<double>(M));
        L = round_to_multiple(R_target * n_req / lnM, gamma, gamma);
      }
    } else if (axis == "ratio") {
      R_target = axis_value * cap;
    } else if (axis == "M") {
      M = static_cast<long>(std::llround(axis_value));
    } else if (axis == "omega") {
      omega = static_cast<int>(std::llround(axis_value));
    } else {
      throw ParamError("config: sweep.axis must be one of n|ratio|M|omega");
    }
  }
  if (n_req > 0) {
    // Pin n exactly by restating the rate for the resolved section count.
    R_target = L * std::log(static_cast<double>(M)) / static_cast<double>(n_req);
  }

  double rho = cfg.rho;
  if (rho < 0.0) {
    double gap = cap - R_target;
    rho = gap > 0.0 ? h_delta(gap, channel) / 8.0 : 0.0;
  }

  SweepPointResult point;
  point.axis_value = axis_value;
  point.params = SparcParams::make(L, M, gamma, omega, rho, R_target);
  point.rate_eff = effective_rate(point.params.R_nats, omega, gamma);
  RegimeOptions ropts;
  ropts.delta_slack_override = cfg.delta_slack;
  ropts.k_const = cfg.k_const;
  point.wave = regime_classify(point.params, channel, ropts);
  return point;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  Channel channel = Channel::from_config(cfg.channel_kind, cfg.channel_param);
  ExperimentReport report;
  report.config = cfg;

  bool has_axis = !cfg.sweep_axis.empty();
  std::vector<double> values = has_axis ? cfg.sweep_values : std::vector<double>{0.0};
  if (has_axis && values.empty()) throw ParamError("run_experiment: empty sweep list");

  for (size_t pi = 0; pi < values.size(); ++pi) {
    SweepPointResult point = resolve_sweep_point(cfg, channel, values[pi], has_axis);

    int t_budget = point.wave.iters_budget >= 1 ? point.wave.iters_budget
                                                : (point.params.gamma + 1) / 2;
    int t_se = cfg.se_t_max > 0 ? cfg.se_t_max : std::min(t_budget + 4, 256);
    SeedSet seeds = seed_sections(point.params.gamma, point.params.omega);
    BaseMatrix w = build_base_matrix(point.params.gamma, point.params.omega, point.params.rho);
    point.se = run_se(point.params, w, channel, seeds, t_se, cfg.se_stop_tol,
                      RngStream{cfg.master_seed, 0}.derive("se", pi), cfg.se_n_mc);

    std::vector<int> unseeded;
    for (int c = 0; c < point.params.gamma; ++c) {
      if (!seeds.contains(c)) unseeded.push_back(c);
    }

    point.trials.resize(cfg.trials);
    size_t bytes = DesignMatrix::resident_bytes(point.params.n, point.params.N,
                                                point.params.gamma, unseeded.size());
    long mem_workers = std::max<long>(
        1, static_cast<long>(cfg.max_memory_gb * 1024.0 * 1024.0 * 1024.0 / (bytes + 1)));
    int workers = static_cast<int>(std::min<long>({worker_limit(), cfg.trials, mem_workers}));

    if (workers <= 1) {
      for (long ti = 0; ti < cfg.trials; ++ti) {
        point.trials[ti] = run_trial(cfg, channel, point, w, seeds, unseeded, pi, ti);
      }
    } else {
      std::atomic<long> next{0};
      auto worker = [&]() {
        for (;;) {
          long ti = next.fetch_add(1);
          if (ti >= cfg.trials) break;
          point.trials[ti] = run_trial(cfg, channel, point, w, seeds, unseeded, pi, ti);
        }
      };
      std::vector<std::thread> pool;
      for (int k = 0; k < workers; ++k) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    for (const auto& tr : point.trials) {
      point.diverged += tr.diverged;
      point.error_events += tr.error_event;
    }
    if (2 * point.diverged > cfg.trials) {
      throw ExperimentError("run_experiment: more than half of the trials diverged");
    }
    point.p_hat = static_cast<double>(point.error_events) / static_cast<double>(cfg.trials);
    point.wilson_lo = wilson_lo(point.p_hat, cfg.trials, kZ95);
    point.wilson_hi = wilson_hi(point.p_hat, cfg.trials, kZ95);
    report.points.push_back(std::move(point));
  }
  return report;
}

std::vector<std::vector<DeviationRow>> compare_se(const ExperimentReport& report) {
  std::vector<std::vector<DeviationRow>> out;
  for (const auto& point : report.points) {
    std::vector<DeviationRow> rows;
    for (int t = 0; t < point.se.iters; ++t) {
      DeviationRow row;
      row.t = t;
      row.se_mse = point.se.mean_psi(t + 1);
      double acc = 0.0, dev_acc = 0.0;
      long count = 0;
      for (const auto& tr : point.trials) {
        if (tr.diverged || tr.history.empty()) continue;
        size_t k = std::min<size_t>(t, tr.history.size() - 1);
        double emp = tr.history[k].mse_empirical;  // early-stopped runs hold
        acc += emp;
        double dev = std::abs(emp - row.se_mse);
        dev_acc += dev;
        row.dev_max = std::max(row.dev_max, dev);
        ++count;
      }
      if (count == 0) continue;
      row.emp_mean = acc / count;
      row.dev_mean = dev_acc / count;
      rows.push_back(row);
    }
    out.push_back(std::move(rows));
  }
  return out;
}

DecodeResult run_single_decode(const ExperimentConfig& cfg) {
  ExperimentConfig one = cfg;
  one.trials = 1;
  one.sweep_axis.clear();
  one.sweep_values.clear();
  ExperimentReport rep = run_experiment(one);
  DecodeResult res;
  res.point = std::move(rep.points.front());
  return res;
}

std::string se_trajectory_csv(const SeTrajectory& se) {
  std::string out = "t,c,psi,tau,r,sigma,phi\n";
  for (int t = 0; t < se.iters; ++t) {
    for (int c = 0; c < se.gamma; ++c) {
      out += std::to_string(t) + "," + std::to_string(c + 1) + "," + fmt(se.psi[t + 1][c]) + "," +
             fmt(se.tau[t][c]) + "," + std::to_string(c + 1) + "," + fmt(se.sigma[t][c]) + "," +
             fmt(se.phi[t][c]) + "\n";
    }
  }
  return out;
}

std::string results_csv(const ExperimentReport& report) {
  std::string out =
      "point,axis,axis_value,trial,stream_id,diverged,iters,ser_overall,ser_unseeded,"
      "error_event,mse_final,max_dev_vs_se\n";
  const std::string axis = report.config.sweep_axis.empty() ? "none" : report.config.sweep_axis;
  for (size_t pi = 0; pi < report.points.size(); ++pi) {
    const auto& point = report.points[pi];
    for (const auto& tr : point.trials) {
      out += std::to_string(pi) + "," + axis + "," + fmt(point.axis_value) + "," +
             std::to_string(tr.trial) + "," + std::to_string(tr.stream_id) + "," +
             std::to_string(tr.diverged ? 1 : 0) + "," + std::to_string(tr.iters) + "," +
             fmt(tr.ser_overall) + "," + fmt(tr.ser_unseeded) + "," +
             std::to_string(tr.error_event ? 1 : 0) + "," + fmt(tr.mse_final) + "," +
             fmt(tr.max_dev_vs_se) + "\n";
    }
  }
  return out;
}

std::string summary_json(const ExperimentReport& report) {
  json j;
  j["version"] = kVersion;
  j["config"] = json::parse(report.config.to_json());
  auto devs = compare_se(report);
  json points = json::array();
  for (size_t pi = 0; pi < report.points.size(); ++pi) {
    const auto& point = report.points[pi];
    json pj;
    pj["axis_value"] = point.axis_value;
    pj["params"] = params_to_json(point.params, point.rate_eff);
    pj["wave"] = wave_to_json(point.wave);
    pj["trials"] = point.trials.size();
    pj["diverged"] = point.diverged;
    pj["error_events"] = point.error_events;
    pj["error_threshold"] = report.config.error_threshold;
    pj["p_hat"] = point.p_hat;
    pj["wilson_lo"] = point.wilson_lo;
    pj["wilson_hi"] = point.wilson_hi;
    pj["se_iters"] = point.se.iters;
    json table = json::array();
    for (const auto& row : devs[pi]) {
      table.push_back({{"t", row.t},
                       {"se_mse", row.se_mse},
                       {"emp_mean", row.emp_mean},
                       {"dev_mean", row.dev_mean},
                       {"dev_max", row.dev_max}});
    }
    pj["se_tracking"] = table;
    points.push_back(pj);
  }
  j["points"] = points;
  return j.dump(2);
}

std::string base_matrix_csv(const BaseMatrix& w) {
  std::string out;
  for (int r = 0; r < w.gamma; ++r) {
    for (int c = 0; c < w.gamma; ++c) {
      out += fmt(w(r, c));
      out += (c + 1 == w.gamma) ? '\n' : ',';
    }
  }
  return out;
}

std::string base_matrix_header_json(const BaseMatrix& w) {
  json j;
  j["gamma"] = w.gamma;
  j["omega"] = w.omega;
  j["rho"] = w.rho;
  std::vector<double> row_sums(w.gamma, 0.0);
  for (int r = 0; r < w.gamma; ++r) {
    for (int c = 0; c < w.gamma; ++c) row_sums[r] += w(r, c);
  }
  j["row_sums"] = row_sums;
  return j.dump(2);
}

void write_outputs(const ExperimentReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
    if (!f) throw ExperimentError("write_outputs: cannot open " + name);
    f << text;
  };
  write("results.csv", results_csv(report));
  write("summary.json", summary_json(report));
  std::string se_all;
  for (size_t pi = 0; pi < report.points.size(); ++pi) {
    std::string one = se_trajectory_csv(report.points[pi].se);
    if (pi == 0) {
      se_all += "point," + one.substr(0, one.find('\n') + 1);
    }
    size_t start = one.find('\n') + 1;
    std::string body = one.substr(start);
    size_t pos = 0;
    while (pos < body.size()) {
      size_t end = body.find('\n', pos);
      se_all += std::to_string(pi) + "," + body.substr(pos, end - pos) + "\n";
      pos = end + 1;
    }
  }
  write("se_trajectory.csv", se_all);
  // Wall-clock timings are observational and intentionally kept out of the
  // deterministic outputs above.
  std::string timings = "point,trial,wall_seconds\n";
  for (size_t pi = 0; pi < report.points.size(); ++pi) {
    for (const auto& tr : report.points[pi].trials) {
      timings += std::to_string(pi) + "," + std::to_string(tr.trial) + "," +
                 fmt(tr.wall_seconds) + "\n";
    }
  }
  write("timings.csv", timings);
}

GlmConfig GlmConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ParamError(std::string("glm config: invalid JSON: ") + e.what());
  }
  GlmConfig cfg;
  if (j.contains("channel")) {
    cfg.channel_kind = j["channel"].value("kind", cfg.channel_kind);
    cfg.channel_param = j["channel"].value("param", cfg.channel_param);
  }
  cfg.N = j.value("N", cfg.N);
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.omega = j.value("omega", cfg.omega);
  cfg.rho = j.value("rho", cfg.rho);
  if (j.contains("prior")) {
    cfg.prior_kind = j["prior"].value("kind", cfg.prior_kind);
    cfg.prior_p1 = j["prior"].value("p1", cfg.prior_p1);
    cfg.prior_p2 = j["prior"].value("p2", cfg.prior_p2);
  }
  cfg.trials = j.value("trials", cfg.trials);
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.t_max = j.value("t_max", cfg.t_max);
  cfg.stop_tol = j.value("stop_tol", cfg.stop_tol);
  cfg.max_memory_gb = j.value("max_memory_gb", cfg.max_memory_gb);
  return cfg;
}

std::string GlmConfig::to_json() const {
  json j;
  j["channel"] = {{"kind", channel_kind}, {"param", channel_param}};
  j["N"] = N;
  j["alpha"] = alpha;
  j["gamma"] = gamma;
  j["omega"] = omega;
  j["rho"] = rho;
  j["prior"] = {{"kind", prior_kind}, {"p1", prior_p1}, {"p2", prior_p2}};
  j["trials"] = trials;
  j["master_seed"] = master_seed;
  j["t_max"] = t_max;
  j["stop_tol"] = stop_tol;
  j["max_memory_gb"] = max_memory_gb;
  return j.dump(2);
}

GlmReport run_glm_experiment(const GlmConfig& cfg) {
  Channel channel = Channel::from_config(cfg.channel_kind, cfg.channel_param);
  PriorSpec prior = PriorSpec::from_config(cfg.prior_kind, cfg.prior_p1, cfg.prior_p2);
  GlmReport rep;
  rep.config = cfg;
  rep.params = GlmParams::make(cfg.N, cfg.alpha, cfg.gamma, cfg.omega, cfg.rho, prior);
  SeedSet seeds = seed_sections(cfg.gamma, cfg.omega);
  BaseMatrix w = build_base_matrix(cfg.gamma, cfg.omega, cfg.rho);
  rep.se = run_se_glm(rep.params, w, channel, seeds, cfg.t_max, cfg.stop_tol);
  rep.se_fixed_point = rep.se.mean_psi(rep.se.iters);

  std::vector<int> unseeded;
  for (int c = 0; c < cfg.gamma; ++c) {
    if (!seeds.contains(c)) unseeded.push_back(c);
  }
  double final_acc = 0.0;
  for (long ti = 0; ti < cfg.trials; ++ti) {
    RngStream stream = RngStream{cfg.master_seed, 0}.derive("glm_trial", ti);
    std::vector<double> beta(rep.params.N);
    {
      Rng rng(stream.derive("signal"));
      for (auto& v : beta) v = prior.sample(rng);
    }
    DesignMatrix::Options opts;
    opts.variance_divisor = rep.params.variance_divisor();
    opts.resident_cols = unseeded;
    opts.max_memory_gb = cfg.max_memory_gb;
    DesignMatrix a(rep.params.n, rep.params.N, w, stream.derive("matrix"), opts);
    std::vector<double> x(rep.params.n, 0.0);
    a.matvec(beta, x);
    std::vector<double> y(rep.params.n);
    {
      Rng rng(stream.derive("channel"));
      channel.sample_output(x, y, rng);
    }
    GlmDecoderRun run = gamp_decode_glm(a, y, rep.params, w, seeds, channel, beta, rep.se);
    if (!run.history.empty()) final_acc += run.history.back().mse_empirical;
    rep.trials.push_back(std::move(run));
  }
  rep.mse_mean_final = cfg.trials > 0 ? final_acc / cfg.trials : 0.0;

  int t_len = rep.se.iters;
  for (int t = 0; t < t_len; ++t) {
    double acc = 0.0;
    long count = 0;
    for (const auto& tr : rep.trials) {
      if (tr.history.empty()) continue;
      size_t k = std::min<size_t>(t, tr.history.size() - 1);
      acc += tr.history[k].mse_empirical;
      ++count;
    }
    if (count == 0) break;
    double dev = std::abs(acc / count - rep.se.mean_psi(t + 1));
    rep.max_tracking_dev = std::max(rep.max_tracking_dev, dev);
  }
  return rep;
}

std::string glm_summary_json(const GlmReport& rep) {
  json j;
  j["version"] = kVersion;
  j["config"] = json::parse(rep.config.to_json());
  j["n"] = rep.params.n;
  j["alpha"] = rep.params.alpha;
  j["prior"] = rep.params.prior.describe();
  j["se_iters"] = rep.se.iters;
  j["se_fixed_point"] = rep.se_fixed_point;
  j["mse_mean_final"] = rep.mse_mean_final;
  j["max_tracking_dev"] = rep.max_tracking_dev;
  json traj = json::array();
  for (int t = 0; t < rep.se.iters; ++t) {
    traj.push_back({{"t", t}, {"se_mse", rep.se.mean_psi(t + 1)}});
  }
  j["se_trajectory"] = traj;
  return j.dump(2);
}

}  // namespace scsparc
