#include "scsparc/numerics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "scsparc/errors.hpp"

namespace scsparc {

namespace {

QuadratureRule build_gauss_legendre(int order) {
  // Golub-Welsch for the Legendre recurrence: off-diagonal k / sqrt(4k^2-1).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = eig.eigenvalues()(i);
    double v0 = eig.eigenvectors()(0, i);
    rule.weights[i] = 2.0 * v0 * v0;
  }
  for (int i = 0, j = order - 1; i < j; ++i, --j) {
    double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

QuadratureRule build_gauss_hermite(int order) {
  // Golub-Welsch on the Jacobi matrix of the (probabilists') Hermite
  // recurrence: zero diagonal, off-diagonal sqrt(k).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    double b = std::sqrt(static_cast<double>(k));
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);

  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = eig.eigenvalues()(i);
    double v0 = eig.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;  // rows of an orthogonal matrix: weights sum to 1
  }
  // Eigenvalues come out sorted; symmetrize node pairs so the rule is exactly
  // odd-symmetric about zero.
  for (int i = 0, j = order - 1; i < j; ++i, --j) {
    double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0) {
    throw NumericError("integrate_1d: refinement limit reached, partial result " +
                       std::to_string(left + right));
  }
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

const QuadratureRule& gauss_hermite(int order) {
  if (order < 1 || order > 512) {
    throw ParamError("gauss_hermite: order must be in [1, 512], got " + std::to_string(order));
  }
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_gauss_hermite(order)).first;
  return it->second;
}

const QuadratureRule& gauss_legendre(int order) {
  if (order < 1 || order > 512) {
    throw ParamError("gauss_legendre: order must be in [1, 512], got " + std::to_string(order));
  }
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_gauss_legendre(order)).first;
  return it->second;
}

McEstimate mc_expect(const std::function<double(std::span<const double>)>& f, int dim,
                     long n_samples, RngStream stream) {
  if (dim < 1) throw ParamError("mc_expect: dim must be positive");
  if (n_samples < 100) throw ParamError("mc_expect: need at least 100 samples");
  Rng rng(stream);
  std::vector<double> x(dim);
  double sum = 0.0, sumsq = 0.0;
  for (long i = 0; i < n_samples; ++i) {
    rng.fill_normal(std::span<double>(x));
    double v = f(std::span<const double>(x));
    if (!std::isfinite(v)) {
      throw NumericError("mc_expect: non-finite value at sample " + std::to_string(i));
    }
    sum += v;
    sumsq += v * v;
  }
  McEstimate est;
  est.n_samples = n_samples;
  est.mean = sum / static_cast<double>(n_samples);
  double var = std::max(0.0, sumsq / n_samples - est.mean * est.mean);
  est.std_error = std::sqrt(var / static_cast<double>(n_samples));
  return est;
}

double find_root_increasing(const std::function<double(double)>& f, double lo, double hi,
                            double tol) {
  if (!(tol > 0.0)) throw ParamError("find_root_increasing: tol must be positive");
  if (!(lo <= hi)) throw ParamError("find_root_increasing: empty bracket");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo > 0.0 || fhi < 0.0) {
    throw ParamError("find_root_increasing: f(lo) <= 0 <= f(hi) violated");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;

  for (int iter = 0; iter < 200; ++iter) {
    if (hi - lo <= tol) break;
    // Secant proposal, accepted only if it lands strictly inside the bracket;
    // otherwise fall back to the midpoint.  f may be noisy, so never trust
    // the proposal to replace bracket maintenance.
    double mid = 0.5 * (lo + hi);
    double x = mid;
    if (fhi != flo) {
      double sec = lo - flo * (hi - lo) / (fhi - flo);
      double margin = 0.01 * (hi - lo);
      if (sec > lo + margin && sec < hi - margin) x = sec;
    }
    double fx = f(x);
    if (std::abs(fx) <= tol) return x;
    if (fx < 0.0) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
  }
  return 0.5 * (lo + hi);
}

double integrate_1d(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(tol > 0.0)) throw ParamError("integrate_1d: tol must be positive");
  if (lo == hi) return 0.0;
  double fa = f(lo);
  double fb = f(hi);
  double m = 0.5 * (lo + hi);
  double fm = f(m);
  double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, lo, hi, fa, fm, fb, whole, tol, 60);
}

}  // namespace scsparc
