#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "scsparc/code_design.hpp"
#include "scsparc/codec.hpp"
#include "scsparc/design_matrix.hpp"
#include "scsparc/errors.hpp"

using namespace scsparc;

TEST_CASE("base matrix hand-computed entries") {
  BaseMatrix w0 = build_base_matrix(12, 2, 0.0);
  CHECK(w0.band_count[0] == 3);
  CHECK(w0(0, 0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(w0(0, 4) == 0.0);

  BaseMatrix w1 = build_base_matrix(12, 2, 0.1);
  CHECK(w1(0, 0) == doctest::Approx(0.9 * 12.0 / 3.0).epsilon(1e-15));
  CHECK(w1(0, 4) == doctest::Approx(0.1 * 12.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("base matrix rows average to one") {
  for (auto [gamma, omega, rho] :
       std::vector<std::tuple<int, int, double>>{{12, 2, 0.0}, {12, 2, 0.1}, {32, 3, 0.017},
                                                 {9, 4, 0.3}, {7, 0, 0.2}}) {
    BaseMatrix w = build_base_matrix(gamma, omega, rho);
    for (int r = 0; r < gamma; ++r) {
      double sum = 0.0;
      for (int c = 0; c < gamma; ++c) {
        sum += w(r, c);
        CHECK(w(r, c) >= 0.0);
      }
      CHECK(std::abs(sum / gamma - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("base matrix band structure") {
  BaseMatrix w = build_base_matrix(16, 2, 0.05);
  for (int r = 0; r < 16; ++r) {
    double in_band = -1.0, off_band = -1.0;
    for (int c = 0; c < 16; ++c) {
      if (std::abs(r - c) <= 2) {
        if (in_band < 0.0) in_band = w(r, c);
        CHECK(w(r, c) == in_band);
      } else {
        if (off_band < 0.0) off_band = w(r, c);
        CHECK(w(r, c) == off_band);
      }
    }
  }
  CHECK_THROWS_AS(build_base_matrix(4, 2, 0.0), ParamError);
  CHECK_THROWS_AS(build_base_matrix(8, 1, 1.0), ParamError);
}

TEST_CASE("seed sections") {
  SeedSet s = seed_sections(32, 2);
  auto idx = s.indices();
  CHECK(idx.size() == 16);
  for (int c = 0; c < 8; ++c) CHECK(s.contains(c));
  for (int c = 8; c < 24; ++c) CHECK(!s.contains(c));
  for (int c = 24; c < 32; ++c) CHECK(s.contains(c));

  SeedSet s2 = seed_sections(12, 1);
  CHECK(s2.indices() == std::vector<int>{0, 1, 2, 3, 8, 9, 10, 11});

  CHECK(seed_sections(5, 0).indices().empty());
  CHECK_THROWS_AS(seed_sections(16, 2), ParamError);
}

TEST_CASE("effective rate") {
  CHECK(effective_rate(1.5, 6, 96) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(effective_rate(0.9, 0, 10) == 0.9);
  double prev = 0.0;
  for (int gamma : {32, 64, 128, 1024, 65536}) {
    double r = effective_rate(1.0, 3, gamma);
    CHECK(r > prev);
    prev = r;
  }
  CHECK(std::abs(effective_rate(1.0, 3, 65536) - 1.0) < 1e-3);
}

TEST_CASE("sparc params derivation") {
  SparcParams p = SparcParams::make(1024, 64, 32, 3, 0.02, 0.26);
  CHECK(p.N == 65536);
  CHECK(p.n % 32 == 0);
  CHECK(p.R_nats == doctest::Approx(1024 * std::log(64.0) / p.n).epsilon(1e-15));
  CHECK(p.alpha == doctest::Approx(static_cast<double>(p.n) / p.N).epsilon(1e-15));

  CHECK_THROWS_AS(SparcParams::make(1000, 64, 32, 3, 0.0, 0.26), ParamError);  // gamma | L
  CHECK_THROWS_AS(SparcParams::make(1024, 60, 32, 3, 0.0, 0.26), ParamError);  // power of two
  CHECK_THROWS_AS(SparcParams::make(1024, 64, 24, 3, 0.0, 0.26), ParamError);  // gamma > 8w
  CHECK_THROWS_AS(SparcParams::make(1024, 64, 32, 3, 1.0, 0.26), ParamError);
}

TEST_CASE("design matrix block statistics") {
  BaseMatrix w = build_base_matrix(4, 1, 0.1);
  long n = 4 * 64, N = 4 * 256;
  DesignMatrix::Options opts;
  opts.variance_divisor = 16.0;  // L = 16 in this toy geometry
  DesignMatrix a(n, N, w, RngStream{5, 0}, opts);

  // empirical variance of a block against W_rc / L, 5 sigma of the chi
  // fluctuation for m entries
  std::vector<double> v(N, 0.0), u(n, 0.0);
  for (int rb = 0; rb < 4; ++rb) {
    for (int cb = 0; cb < 4; ++cb) {
      double want = w(rb, cb) / 16.0;
      double acc = 0.0;
      long m = 0;
      std::vector<double> probe(N, 0.0);
      for (long j = cb * 256; j < (cb + 1) * 256; ++j) {
        std::fill(probe.begin(), probe.end(), 0.0);
        probe[j] = 1.0;
        a.matvec(probe, u);
        for (long i = rb * 64; i < (rb + 1) * 64; ++i) {
          acc += u[i] * u[i];
          ++m;
        }
      }
      double got = acc / m;
      if (want == 0.0) {
        CHECK(got == 0.0);  // zero-variance block is exactly zero
      } else {
        double tol = 5.0 * want * std::sqrt(2.0 / m);
        CHECK(std::abs(got - want) < tol);
      }
    }
  }
}

TEST_CASE("design matrix deterministic across instances and residency") {
  BaseMatrix w = build_base_matrix(4, 1, 0.2);
  long n = 64, N = 128;
  DesignMatrix::Options opts;
  opts.variance_divisor = 8.0;
  DesignMatrix a(n, N, w, RngStream{9, 7}, opts);
  DesignMatrix b(n, N, w, RngStream{9, 7}, opts);
  DesignMatrix::Options partial = opts;
  partial.resident_cols = {1, 2};
  DesignMatrix c(n, N, w, RngStream{9, 7}, partial);

  std::vector<double> v(N), ua(n), ub(n), uc(n);
  Rng rng(RngStream{1, 2});
  for (auto& x : v) x = rng.normal();
  a.matvec(v, ua);
  b.matvec(v, ub);
  c.matvec(v, uc);  // regenerates the non-resident blocks
  for (long i = 0; i < n; ++i) {
    CHECK(ua[i] == ub[i]);
    CHECK(ua[i] == uc[i]);
  }
}

TEST_CASE("matvec basics and the adjoint identity") {
  BaseMatrix w = build_base_matrix(3, 1, 0.15);
  long n = 3 * 32, N = 3 * 48;
  DesignMatrix::Options opts;
  opts.variance_divisor = 12.0;
  DesignMatrix a(n, N, w, RngStream{13, 0}, opts);

  std::vector<double> zero(N, 0.0), u(n, 1.0);
  a.matvec(zero, u);
  for (double x : u) CHECK(x == 0.0);

  std::vector<double> x(N), y(n), ax(n), aty(N);
  Rng rng(RngStream{4, 4});
  for (auto& v : x) v = rng.normal();
  for (auto& v : y) v = rng.normal();
  a.matvec(x, ax);
  a.matvec_t(y, aty);
  double lhs = std::inner_product(ax.begin(), ax.end(), y.begin(), 0.0);
  double rhs = std::inner_product(x.begin(), x.end(), aty.begin(), 0.0);
  double nx = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
  double ny = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
  CHECK(std::abs(lhs - rhs) <= 1e-9 * nx * ny);

  std::vector<double> wrong(N + 1, 0.0);
  CHECK_THROWS_AS(a.matvec(wrong, u), ParamError);
}

TEST_CASE("codeword power concentrates at one") {
  // Row normalization forces unit transmit power for one-hot sections.
  SparcParams p = SparcParams::make(64, 16, 8, 0, 0.0, 0.8);
  BaseMatrix w = build_base_matrix(p.gamma, p.omega, p.rho);
  double acc = 0.0;
  long count = 0;
  for (int rep = 0; rep < 100; ++rep) {
    RngStream s = RngStream{123, 0}.derive("power", rep);
    DesignMatrix::Options opts;
    opts.variance_divisor = static_cast<double>(p.L);
    DesignMatrix a(p.n, p.N, w, s.derive("mat"), opts);
    Message msg = random_message(p, s.derive("msg"));
    std::vector<double> beta = encode(msg, p);
    std::vector<double> x(p.n);
    a.matvec(beta, x);
    for (double v : x) acc += v * v;
    count += p.n;
  }
  double mean_power = acc / count;
  // five sigma of the chi-square fluctuation at this sample size
  CHECK(std::abs(mean_power - 1.0) < 5.0 * std::sqrt(2.0 / count) * 3.0);
}

TEST_CASE("memory cap produces a resource error") {
  BaseMatrix w = build_base_matrix(4, 1, 0.0);
  DesignMatrix::Options opts;
  opts.variance_divisor = 4.0;
  opts.max_memory_gb = 1e-6;
  CHECK_THROWS_AS(DesignMatrix(4096, 8192, w, RngStream{1, 0}, opts), ResourceError);
}
