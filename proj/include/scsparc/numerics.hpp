#ifndef SCSPARC_NUMERICS_HPP
#define SCSPARC_NUMERICS_HPP

#include <functional>
#include <span>
#include <vector>

#include "scsparc/rng.hpp"

namespace scsparc {

// Nodes/weights for expectations against the standard Gaussian measure:
// E[g(Z)] ~= sum_i weights[i] * g(nodes[i]) with Z ~ N(0,1).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;

  double expect(const std::function<double(double)>& g) const {
    double acc = 0.0;
    for (int i = 0; i < order; ++i) acc += weights[i] * g(nodes[i]);
    return acc;
  }
};

// order in [1, 512]; rules are cached internally.
const QuadratureRule& gauss_hermite(int order);

// Gauss-Legendre nodes/weights on [-1, 1] (weights sum to 2); cached.
const QuadratureRule& gauss_legendre(int order);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
};

// Sample mean of f over i.i.d. standard normal vectors of length dim.
// Bit-reproducible for a fixed stream.
McEstimate mc_expect(const std::function<double(std::span<const double>)>& f, int dim,
                     long n_samples, RngStream stream);

// Root of a non-decreasing f with f(lo) <= 0 <= f(hi).  Bisection with secant
// acceleration; terminates at |f| <= tol or bracket width <= tol.
double find_root_increasing(const std::function<double(double)>& f, double lo, double hi,
                            double tol);

// Adaptive Simpson quadrature to absolute tolerance tol.
double integrate_1d(const std::function<double(double)>& f, double lo, double hi, double tol);

}  // namespace scsparc

#endif
