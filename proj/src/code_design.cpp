#include "scsparc/code_design.hpp"

#include <cmath>
#include <string>

#include "scsparc/errors.hpp"

namespace scsparc {

SparcParams SparcParams::make(long L, long M, int gamma, int omega, double rho,
                              double rate_nats) {
  if (L < 1 || M < 2) throw ParamError("SparcParams: need L >= 1, M >= 2");
  if ((M & (M - 1)) != 0) throw ParamError("SparcParams: M must be a power of two");
  if (gamma < 1) throw ParamError("SparcParams: gamma must be positive");
  if (omega < 0) throw ParamError("SparcParams: omega must be non-negative");
  if (L % gamma != 0) throw ParamError("SparcParams: gamma must divide L");
  if (gamma <= 8 * omega) throw ParamError("SparcParams: need gamma > 8*omega for the seed set");
  if (!(rho >= 0.0 && rho < 1.0)) throw ParamError("SparcParams: rho must lie in [0,1)");
  if (!(rate_nats > 0.0)) throw ParamError("SparcParams: rate must be positive");

  SparcParams p;
  p.L = L;
  p.M = M;
  p.gamma = gamma;
  p.omega = omega;
  p.rho = rho;
  p.N = M * L;
  long n_raw = static_cast<long>(std::lround(L * std::log(static_cast<double>(M)) / rate_nats));
  p.n = ((n_raw + gamma - 1) / gamma) * gamma;  // round up to a multiple of gamma
  p.R_nats = L * std::log(static_cast<double>(M)) / static_cast<double>(p.n);
  p.alpha = static_cast<double>(p.n) / static_cast<double>(p.N);
  return p;
}

BaseMatrix build_base_matrix(int gamma, int omega, double rho) {
  if (omega < 0) throw ParamError("build_base_matrix: omega must be non-negative");
  if (gamma < 2 * omega + 1) {
    throw ParamError("build_base_matrix: band exceeds matrix, need gamma >= 2*omega+1");
  }
  if (!(rho >= 0.0 && rho < 1.0)) throw ParamError("build_base_matrix: rho must lie in [0,1)");

  BaseMatrix bm;
  bm.gamma = gamma;
  bm.omega = omega;
  bm.rho = rho;
  bm.w.assign(static_cast<size_t>(gamma) * gamma, 0.0);
  bm.band_count.resize(gamma);
  for (int r = 0; r < gamma; ++r) {
    int lo = std::max(0, r - omega);
    int hi = std::min(gamma - 1, r + omega);
    int gr = hi - lo + 1;
    bm.band_count[r] = gr;
    // A row whose band spans every column has no off-band cells to carry the
    // rho share; the whole row budget goes to the band.
    double in_band = gr < gamma ? (1.0 - rho) * gamma / gr : static_cast<double>(gamma) / gr;
    double off_band = gr < gamma ? rho * gamma / (gamma - gr) : 0.0;
    for (int c = 0; c < gamma; ++c) {
      bm.w[static_cast<size_t>(r) * gamma + c] = (c >= lo && c <= hi) ? in_band : off_band;
    }
  }
  return bm;
}

std::vector<int> SeedSet::indices() const {
  std::vector<int> out;
  out.reserve(count());
  for (int c = 0; c < gamma; ++c) {
    if (contains(c)) out.push_back(c);
  }
  return out;
}

SeedSet seed_sections(int gamma, int omega) {
  if (omega < 0) throw ParamError("seed_sections: omega must be non-negative");
  if (gamma <= 8 * omega) {
    throw ParamError("seed_sections: need gamma > 8*omega, got gamma=" + std::to_string(gamma) +
                     " omega=" + std::to_string(omega));
  }
  return SeedSet{gamma, omega};
}

double effective_rate(double rate, int omega, int gamma) {
  if (gamma <= 8 * omega) throw ParamError("effective_rate: need gamma > 8*omega");
  return rate * (1.0 - 8.0 * omega / static_cast<double>(gamma));
}

}  // namespace scsparc
