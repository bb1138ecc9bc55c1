#include "scsparc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "scsparc/errors.hpp"
#include "scsparc/numerics.hpp"

namespace scsparc {

namespace {

constexpr double kSigmaClamp = 1e-9;  // one-sided limits at sigma = 0, 1
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

inline double sgn(double u) { return u >= 0.0 ? 1.0 : -1.0; }

inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

// exp(x^2) * erfc(x), stable for all x where the result is representable.
double erfcx(double x) {
  if (x >= 25.0) {
    // Asymptotic series 1/(x sqrt(pi)) (1 - 1/(2x^2) + 3/(4x^4) - ...).
    double ix2 = 1.0 / (x * x);
    double s = 1.0 + ix2 * (-0.5 + ix2 * (0.75 + ix2 * -1.875));
    return s * std::numbers::inv_sqrtpi / x;
  }
  if (x >= 0.0) return std::exp(x * x) * std::erfc(x);
  if (x < -26.5) return std::numeric_limits<double>::infinity();
  return 2.0 * std::exp(x * x) - erfcx(-x);
}

// Inverse Mills ratio phi(a) / Phi(a).
double mills(double a) {
  double e = erfcx(-a / kSqrt2);
  if (std::isinf(e)) return 0.0;
  return std::sqrt(2.0 / std::numbers::pi) / e;
}

double log_norm_cdf(double a) {
  if (a > -1.0) return std::log(norm_cdf(a));
  return std::log(0.5 * erfcx(-a / kSqrt2)) - 0.5 * a * a;
}

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// E[G(kappa * xi)] for xi ~ N(0,1).  Integrated in t = xi over a window that
// covers both the Gaussian envelope and the support of G, with composite
// Gauss-Legendre panels sized so each panel sees a couple of features of
// G(kappa t).  Accurate from kappa ~ 0 up to kappa ~ 1e5 at a fixed cost.
double gaussian_scaled_expect(const std::function<double(double)>& G, double kappa) {
  if (kappa < 1e-8) return G(0.0);
  double T = std::min(10.0, 44.0 / kappa);
  const QuadratureRule& gl = gauss_legendre(15);
  const int panels = 48;
  double h = 2.0 * T / panels;
  double acc = 0.0;
  for (int k = 0; k < panels; ++k) {
    double mid = -T + (k + 0.5) * h;
    for (int i = 0; i < gl.order; ++i) {
      double t = mid + 0.5 * h * gl.nodes[i];
      acc += 0.5 * h * gl.weights[i] * norm_pdf(t) * G(kappa * t);
    }
  }
  return acc;
}

}  // namespace

Channel Channel::awgn(double noise_variance) {
  if (!(noise_variance > 0.0)) throw ParamError("awgn: noise variance must be positive");
  Channel ch;
  ch.kind_ = ChannelKind::awgn;
  ch.param_ = noise_variance;
  ch.alphabet_.continuous = true;
  return ch;
}

Channel Channel::bec(double erasure_prob) {
  if (!(erasure_prob > 0.0 && erasure_prob < 1.0)) {
    throw ParamError("bec: erasure probability must lie in (0,1)");
  }
  Channel ch;
  ch.kind_ = ChannelKind::bec;
  ch.param_ = erasure_prob;
  ch.alphabet_.symbols = {-1.0, 0.0, 1.0};
  return ch;
}

Channel Channel::bsc(double flip_prob) {
  if (!(flip_prob > 0.0 && flip_prob < 1.0)) {
    throw ParamError("bsc: flip probability must lie in (0,1)");
  }
  Channel ch;
  ch.kind_ = ChannelKind::bsc;
  ch.param_ = flip_prob;
  ch.alphabet_.symbols = {-1.0, 1.0};
  return ch;
}

Channel Channel::generic(GenericChannelSpec spec) {
  if (!spec.pout || !spec.sample) throw ParamError("generic channel: pout and sample required");
  if (spec.alphabet.continuous == !spec.alphabet.symbols.empty()) {
    throw ParamError("generic channel: exactly one of discrete/continuous must be set");
  }
  Channel ch;
  ch.kind_ = ChannelKind::generic;
  ch.alphabet_ = spec.alphabet;
  ch.generic_ = std::make_shared<GenericChannelSpec>(std::move(spec));
  return ch;
}

Channel Channel::from_config(const std::string& kind, double param) {
  if (kind == "awgn") return awgn(param);
  if (kind == "bec") return bec(param);
  if (kind == "bsc") return bsc(param);
  throw ParamError("unknown channel kind '" + kind + "' (expected awgn|bec|bsc)");
}

std::string Channel::describe() const {
  switch (kind_) {
    case ChannelKind::awgn: return "awgn(" + std::to_string(param_) + ")";
    case ChannelKind::bec: return "bec(" + std::to_string(param_) + ")";
    case ChannelKind::bsc: return "bsc(" + std::to_string(param_) + ")";
    default: return "generic";
  }
}

double Channel::sample_output(double u, Rng& rng) const {
  if (!std::isfinite(u)) throw ParamError("sample_output: input must be finite");
  switch (kind_) {
    case ChannelKind::awgn: return u + std::sqrt(param_) * rng.normal();
    case ChannelKind::bec: return rng.uniform() < param_ ? 0.0 : sgn(u);
    case ChannelKind::bsc: return rng.uniform() < param_ ? -sgn(u) : sgn(u);
    default: return generic_->sample(u, rng);
  }
}

void Channel::sample_output(std::span<const double> u, std::span<double> y, Rng& rng) const {
  for (size_t i = 0; i < u.size(); ++i) y[i] = sample_output(u[i], rng);
}

double Channel::pout(double y, double z) const {
  switch (kind_) {
    case ChannelKind::awgn: {
      double d = y - z;
      return kInvSqrt2Pi / std::sqrt(param_) * std::exp(-0.5 * d * d / param_);
    }
    case ChannelKind::bec:
      if (y == 0.0) return param_;
      return (y == sgn(z)) ? 1.0 - param_ : 0.0;
    case ChannelKind::bsc:
      return (y == sgn(z)) ? 1.0 - param_ : param_;
    default:
      return generic_->pout(y, z);
  }
}

double Channel::g_out_closed(double p, double y, double sigma) const {
  double rs = std::sqrt(sigma);
  double a = p / rs;
  switch (kind_) {
    case ChannelKind::awgn:
      return (y - p) / (sigma + param_);
    case ChannelKind::bec:
      if (y == 0.0) return 0.0;  // erased: posterior equals prior
      return y > 0.0 ? mills(a) / rs : -mills(-a) / rs;
    case ChannelKind::bsc: {
      double eps = param_;
      double zp = (1.0 - eps) * norm_cdf(a) + eps * norm_cdf(-a);
      double zm = 1.0 - zp;
      if (y > 0.0) return (1.0 - 2.0 * eps) * norm_pdf(a) / (rs * zp);
      return -(1.0 - 2.0 * eps) * norm_pdf(a) / (rs * zm);
    }
    default:
      break;
  }
  if (generic_->gout_closed_form) return generic_->gout_closed_form(p, y, sigma);
  return g_out_quadrature(p, y, sigma);
}

double Channel::g_out(double p, double y, double sigma) const {
  if (!(sigma > 0.0)) throw ParamError("g_out: sigma must be positive");
  return g_out_closed(p, y, sigma);
}

double Channel::g_out_quadrature(double p, double y, double sigma) const {
  if (!(sigma > 0.0)) throw ParamError("g_out: sigma must be positive");
  const QuadratureRule& rule = gauss_hermite(gh_order_);
  double rs = std::sqrt(sigma);
  // Posterior mean over z ~ N(p, sigma) reweighted by P(y|z), in log domain.
  double lmax = -std::numeric_limits<double>::infinity();
  std::vector<double> lw(rule.order);
  for (int i = 0; i < rule.order; ++i) {
    double z = p + rs * rule.nodes[i];
    double pv = pout(y, z);
    lw[i] = pv > 0.0 ? std::log(rule.weights[i]) + std::log(pv)
                     : -std::numeric_limits<double>::infinity();
    lmax = std::max(lmax, lw[i]);
  }
  if (!std::isfinite(lmax)) {
    throw NumericError("g_out: posterior normalizer underflow at y=" + std::to_string(y));
  }
  double num = 0.0, den = 0.0;
  for (int i = 0; i < rule.order; ++i) {
    double w = std::exp(lw[i] - lmax);
    num += w * (p + rs * rule.nodes[i]);
    den += w;
  }
  return (num / den - p) / sigma;
}

double Channel::d_gout_dp(double p, double y, double sigma) const {
  if (!(sigma > 0.0)) throw ParamError("d_gout_dp: sigma must be positive");
  double rs = std::sqrt(sigma);
  double a = p / rs;
  switch (kind_) {
    case ChannelKind::awgn:
      return -1.0 / (sigma + param_);
    case ChannelKind::bec: {
      if (y == 0.0) return 0.0;
      double aa = y > 0.0 ? a : -a;
      double lam = mills(aa);
      return -lam * (aa + lam) / sigma;
    }
    case ChannelKind::bsc: {
      double eps = param_;
      double c = 1.0 - 2.0 * eps;
      double zp = (1.0 - eps) * norm_cdf(a) + eps * norm_cdf(-a);
      double zm = 1.0 - zp;
      double f = norm_pdf(a);
      if (y > 0.0) return -c * f * (a * zp + c * f) / (sigma * zp * zp);
      return c * f * (a * zm - c * f) / (sigma * zm * zm);
    }
    default:
      break;
  }
  // Richardson-extrapolated central difference.
  double h = 1e-5 * std::max(1.0, std::abs(p));
  double d1 = g_out_closed(p + h, y, sigma) - g_out_closed(p - h, y, sigma);
  double d2 = g_out_closed(p + 2.0 * h, y, sigma) - g_out_closed(p - 2.0 * h, y, sigma);
  return (8.0 * d1 - d2) / (12.0 * h);
}

double Channel::f_out_impl(double sigma) const {
  double s = std::clamp(sigma, kSigmaClamp, 1.0 - kSigmaClamp);
  double kappa = std::sqrt((1.0 - s) / s);
  switch (kind_) {
    case ChannelKind::awgn:
      return 1.0 / (sigma + param_);
    case ChannelKind::bec: {
      // Summing -m_y dg/dp over y = +-1 collapses to a single even integrand.
      double eps = param_;
      auto G = [&](double a) { return (1.0 - eps) * norm_pdf(a) * (mills(a) + mills(-a)); };
      return gaussian_scaled_expect(G, kappa) / s;
    }
    case ChannelKind::bsc: {
      double c = 1.0 - 2.0 * param_;
      double eps = param_;
      auto G = [&](double a) {
        double zp = (1.0 - eps) * norm_cdf(a) + eps * norm_cdf(-a);
        double f = norm_pdf(a);
        return c * c * f * f / (zp * (1.0 - zp));
      };
      return gaussian_scaled_expect(G, kappa) / s;
    }
    default:
      return f_out_quadrature(sigma);
  }
}

double Channel::f_out_quadrature(double sigma) const {
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw ParamError("f_out: sigma must lie in [0,1]");
  double s = std::clamp(sigma, kSigmaClamp, 1.0 - kSigmaClamp);
  double rs = std::sqrt(s);
  double kappa = std::sqrt((1.0 - s) / s);
  if (!alphabet_.continuous) {
    // Discrete outputs: exact sum over the alphabet, P marginalized by
    // quadrature.  m_y(P) is the z-marginal of P(y | P + sqrt(s) z).
    const QuadratureRule& rule = gauss_hermite(gh_order_);
    auto G = [&](double a) {
      double P = rs * a;
      double acc = 0.0;
      for (double y : alphabet_.symbols) {
        double m = 0.0;
        for (int i = 0; i < rule.order; ++i) m += rule.weights[i] * pout(y, P + rs * rule.nodes[i]);
        if (m > 0.0) acc += m * d_gout_dp(P, y, s);
      }
      return -s * acc;
    };
    return gaussian_scaled_expect(G, kappa) / s;
  }
  // Continuous outputs: integrate y by Gauss-Hermite around P with the
  // channel noise scale, importance-corrected by the true marginal m(y|P).
  // Smooth output laws make the integrand flat in P, so a plain Hermite rule
  // handles the outer expectation.
  const QuadratureRule& zrule = gauss_hermite(gh_order_);
  double ns = kind_ == ChannelKind::awgn ? std::sqrt(param_) : generic_->noise_scale;
  double vy = s + ns * ns;
  const QuadratureRule& yrule = gauss_hermite(41);
  const QuadratureRule& xrule = gauss_hermite(25);
  double rp = std::sqrt(1.0 - s);
  double acc_out = 0.0;
  for (int k = 0; k < xrule.order; ++k) {
    double P = rp * xrule.nodes[k];
    double acc = 0.0;
    for (int j = 0; j < yrule.order; ++j) {
      double y = P + std::sqrt(vy) * yrule.nodes[j];
      double m = 0.0;
      for (int i = 0; i < zrule.order; ++i) {
        m += zrule.weights[i] * pout(y, P + rs * zrule.nodes[i]);
      }
      double ref = kInvSqrt2Pi / std::sqrt(vy) * std::exp(-0.5 * (y - P) * (y - P) / vy);
      acc += yrule.weights[j] * (m / ref) * d_gout_dp(P, y, s);
    }
    acc_out += xrule.weights[k] * acc;
  }
  return -acc_out;
}

double Channel::f_out(double sigma) const {
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw ParamError("f_out: sigma must lie in [0,1]");
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto it = cache_->fout.find(sigma);
  if (it != cache_->fout.end()) return it->second;
  double v = f_out_impl(sigma);
  cache_->fout.emplace(sigma, v);
  return v;
}

double Channel::psi_out(double sigma) const {
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw ParamError("psi_out: sigma must lie in [0,1]");
  double s = std::clamp(sigma, kSigmaClamp, 1.0 - kSigmaClamp);
  double rs = std::sqrt(s);
  double kappa = std::sqrt((1.0 - s) / s);
  switch (kind_) {
    case ChannelKind::awgn: {
      double v = sigma + param_;
      return -0.5 * std::log(2.0 * std::numbers::pi * v) - 0.5;
    }
    case ChannelKind::bec: {
      double eps = param_;
      auto G = [&](double a) {
        double lp = std::log1p(-eps);
        double t1 = norm_cdf(a) * (lp + log_norm_cdf(a));
        double t2 = norm_cdf(-a) * (lp + log_norm_cdf(-a));
        return (1.0 - eps) * (t1 + t2) + xlogx(eps);
      };
      return gaussian_scaled_expect(G, kappa);
    }
    case ChannelKind::bsc: {
      double eps = param_;
      auto G = [&](double a) {
        double zp = (1.0 - eps) * norm_cdf(a) + eps * norm_cdf(-a);
        return xlogx(zp) + xlogx(1.0 - zp);
      };
      return gaussian_scaled_expect(G, kappa);
    }
    default:
      break;
  }
  if (!alphabet_.continuous) {
    const QuadratureRule& rule = gauss_hermite(gh_order_);
    auto G = [&](double a) {
      double P = rs * a;
      double acc = 0.0;
      for (double y : alphabet_.symbols) {
        double m = 0.0;
        for (int i = 0; i < rule.order; ++i) m += rule.weights[i] * pout(y, P + rs * rule.nodes[i]);
        acc += xlogx(m);
      }
      return acc;
    };
    return gaussian_scaled_expect(G, kappa);
  }
  // Continuous generic: E over (xi, z*, output noise) of log m(Y|P).
  const QuadratureRule& zrule = gauss_hermite(gh_order_);
  double ns = generic_->noise_scale;
  const QuadratureRule& yrule = gauss_hermite(41);
  const QuadratureRule& srule = gauss_hermite(41);
  const QuadratureRule& xrule = gauss_hermite(25);
  double rp = std::sqrt(1.0 - s);
  double acc_out = 0.0;
  for (int kk = 0; kk < xrule.order; ++kk) {
    double P = rp * xrule.nodes[kk];
    double acc = 0.0;
    for (int k = 0; k < srule.order; ++k) {
      double z0 = P + rs * srule.nodes[k];
      for (int j = 0; j < yrule.order; ++j) {
        double y = z0 + ns * yrule.nodes[j];
        double m = 0.0;
        for (int i = 0; i < zrule.order; ++i) {
          m += zrule.weights[i] * pout(y, P + rs * zrule.nodes[i]);
        }
        double py = pout(y, z0);
        double ref = kInvSqrt2Pi / ns * std::exp(-0.5 * (y - z0) * (y - z0) / (ns * ns));
        if (m > 0.0 && ref > 0.0) {
          acc += srule.weights[k] * yrule.weights[j] * (py / ref) * std::log(m);
        }
      }
    }
    acc_out += xrule.weights[kk] * acc;
  }
  return acc_out;
}

double Channel::capacity() const {
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    if (cache_->has_capacity) return cache_->capacity;
  }
  // Half-integral of f_out over [0,1].  Substituting sigma = u^2 removes the
  // inverse-square-root endpoint behavior of hard-decision channels; below u0
  // the integrand u*f_out(u^2) is flat and handled analytically.
  const double u0 = 1e-4;
  double head = u0 * f_out(u0 * u0) * u0;
  double tail = integrate_1d([&](double u) { return u * f_out(u * u); }, u0, 1.0, 5e-7);
  double c = head + tail;
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->capacity = c;
  cache_->has_capacity = true;
  return c;
}

double Channel::capacity_entropy() const {
  if (alphabet_.continuous) {
    throw ParamError("capacity_entropy: defined for discrete-output channels only");
  }
  if (kind_ == ChannelKind::bec || kind_ == ChannelKind::bsc) {
    // Exact output marginals under the standard Gaussian input: sign(z) is a
    // fair coin, so the conditional entropy is that of the erasure/flip coin.
    double eps = param_;
    double hyz = -xlogx(eps) - xlogx(1.0 - eps);
    double hy;
    if (kind_ == ChannelKind::bec) {
      hy = -2.0 * xlogx(0.5 * (1.0 - eps)) - xlogx(eps);
    } else {
      hy = -2.0 * xlogx(0.5);
    }
    return hy - hyz;
  }
  const QuadratureRule& rule = gauss_hermite(129);
  double hy = 0.0;
  for (double y : alphabet_.symbols) {
    double q = 0.0;
    for (int i = 0; i < rule.order; ++i) q += rule.weights[i] * pout(y, rule.nodes[i]);
    hy -= xlogx(q);
  }
  double hyz = 0.0;
  for (int i = 0; i < rule.order; ++i) {
    double h = 0.0;
    for (double y : alphabet_.symbols) h -= xlogx(pout(y, rule.nodes[i]));
    hyz += rule.weights[i] * h;
  }
  return hy - hyz;
}

}  // namespace scsparc
