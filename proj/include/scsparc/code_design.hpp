#ifndef SCSPARC_CODE_DESIGN_HPP
#define SCSPARC_CODE_DESIGN_HPP

#include <cstdint>
#include <vector>

namespace scsparc {

// Code geometry.  n is rounded up to the next multiple of gamma and the rate
// recomputed, so the realized rate can sit slightly below the requested one.
struct SparcParams {
  long L = 0;       // sections
  long M = 0;       // section size, power of two
  int gamma = 0;    // blocks per side
  int omega = 0;    // coupling half-width
  double rho = 0.0; // background variance share
  double R_nats = 0.0;  // realized rate, nats per channel use

  long N = 0;       // M * L
  long n = 0;       // channel uses
  double alpha = 0.0;  // n / N

  static SparcParams make(long L, long M, int gamma, int omega, double rho, double rate_nats);

  long sections_per_block() const { return L / gamma; }
  long cols_per_block() const { return N / gamma; }
  long rows_per_block() const { return n / gamma; }
};

// Banded variance profile with background level rho.  Every row averages to
// one so codeword power is one.
struct BaseMatrix {
  int gamma = 0;
  int omega = 0;
  double rho = 0.0;
  std::vector<double> w;        // gamma x gamma, row major
  std::vector<int> band_count;  // gamma_r: band entries in row r

  double operator()(int r, int c) const { return w[static_cast<size_t>(r) * gamma + c]; }
};

BaseMatrix build_base_matrix(int gamma, int omega, double rho);

// Boundary column blocks whose sections are known at the decoder: the first
// and last 4*omega blocks.
struct SeedSet {
  int gamma = 0;
  int omega = 0;

  bool contains(int c) const {  // c in [0, gamma)
    return c < 4 * omega || c >= gamma - 4 * omega;
  }
  int count() const { return 8 * omega; }
  std::vector<int> indices() const;
};

SeedSet seed_sections(int gamma, int omega);

double effective_rate(double rate, int omega, int gamma);

}  // namespace scsparc

#endif
