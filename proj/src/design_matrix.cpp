#include "scsparc/design_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

#include "scsparc/errors.hpp"

namespace scsparc {

DesignMatrix::DesignMatrix(long n, long N, const BaseMatrix& w, RngStream stream, Options opts)
    : n_(n), N_(N), gamma_(w.gamma), stream_(stream.derive("design")) {
  if (n < 1 || N < 1) throw ParamError("DesignMatrix: empty shape");
  if (n % gamma_ != 0 || N % gamma_ != 0) {
    throw ParamError("DesignMatrix: gamma must divide both n and N");
  }
  double divisor = opts.variance_divisor;
  if (!(divisor > 0.0)) throw ParamError("DesignMatrix: variance divisor must be positive");

  block_sd_.resize(static_cast<size_t>(gamma_) * gamma_);
  for (int r = 0; r < gamma_; ++r) {
    for (int c = 0; c < gamma_; ++c) {
      block_sd_[static_cast<size_t>(r) * gamma_ + c] = std::sqrt(w(r, c) / divisor);
    }
  }

  std::vector<int> res = opts.resident_cols;
  if (res.empty()) {
    res.resize(gamma_);
    std::iota(res.begin(), res.end(), 0);
  }
  size_t bytes = resident_bytes(n_, N_, gamma_, res.size());
  double cap = opts.max_memory_gb * 1024.0 * 1024.0 * 1024.0;
  if (static_cast<double>(bytes) > cap) {
    throw ResourceError("DesignMatrix: resident storage needs " + std::to_string(bytes) +
                        " bytes, above the configured cap");
  }

  // Nonzero row-block segments per column block; zero-variance blocks are
  // skipped by every kernel.
  nz_rows_.resize(gamma_);
  for (int c = 0; c < gamma_; ++c) {
    for (int r = 0; r < gamma_; ++r) {
      if (block_sd_[static_cast<size_t>(r) * gamma_ + c] > 0.0) nz_rows_[c].push_back(r);
    }
  }

  panels_.resize(gamma_);
  long cpb = cols_per_block();
  for (int c : res) {
    if (c < 0 || c >= gamma_) throw ParamError("DesignMatrix: resident block out of range");
    auto& panel = panels_[c];
    panel.resize(static_cast<size_t>(cpb) * n_);
    for (long jl = 0; jl < cpb; ++jl) {
      generate_column(static_cast<long>(c) * cpb + jl, panel.data() + jl * n_);
    }
  }
}

size_t DesignMatrix::resident_bytes(long n, long N, int gamma, size_t resident_blocks) {
  return static_cast<size_t>(n) * static_cast<size_t>(N / gamma) * resident_blocks *
         sizeof(float);
}

double DesignMatrix::block_variance(int r, int c) const {
  double sd = block_sd_[static_cast<size_t>(r) * gamma_ + c];
  return sd * sd;
}

void DesignMatrix::generate_column(long j, float* dst) const {
  Rng rng(stream_.derive("col", static_cast<uint64_t>(j)));
  int cblock = static_cast<int>(j / cols_per_block());
  long rpb = rows_per_block();
  for (int r = 0; r < gamma_; ++r) {
    double sd = block_sd_[static_cast<size_t>(r) * gamma_ + cblock];
    float* seg = dst + r * rpb;
    if (sd == 0.0) {
      std::memset(seg, 0, sizeof(float) * rpb);
      continue;
    }
    for (long i = 0; i < rpb; ++i) seg[i] = static_cast<float>(sd * rng.normal());
  }
}

const float* DesignMatrix::column(long j, std::vector<float>& scratch) const {
  int cblock = static_cast<int>(j / cols_per_block());
  if (resident(cblock)) {
    long jl = j - static_cast<long>(cblock) * cols_per_block();
    return panels_[cblock].data() + jl * n_;
  }
  scratch.resize(n_);
  generate_column(j, scratch.data());
  return scratch.data();
}

void DesignMatrix::matvec(std::span<const double> v, std::span<double> u) const {
  std::vector<int> all(gamma_);
  std::iota(all.begin(), all.end(), 0);
  matvec(v, u, all);
}

void DesignMatrix::matvec(std::span<const double> v, std::span<double> u,
                          std::span<const int> cblocks) const {
  if (static_cast<long>(v.size()) != N_ || static_cast<long>(u.size()) != n_) {
    throw ParamError("matvec: shape mismatch");
  }
  std::fill(u.begin(), u.end(), 0.0);
  long cpb = cols_per_block();
  long rpb = rows_per_block();
  std::vector<float> scratch;
  for (int c : cblocks) {
    const auto& rows = nz_rows_[c];
    for (long jl = 0; jl < cpb; ++jl) {
      long j = static_cast<long>(c) * cpb + jl;
      double coef = v[j];
      if (coef == 0.0) continue;
      const float* col = column(j, scratch);
      for (int r : rows) {
        const float* seg = col + r * rpb;
        double* useg = u.data() + r * rpb;
        for (long i = 0; i < rpb; ++i) useg[i] += coef * seg[i];
      }
    }
  }
}

void DesignMatrix::matvec_t(std::span<const double> s, std::span<double> r) const {
  std::vector<int> all(gamma_);
  std::iota(all.begin(), all.end(), 0);
  matvec_t(s, r, all);
}

void DesignMatrix::matvec_t(std::span<const double> s, std::span<double> r,
                            std::span<const int> cblocks) const {
  if (static_cast<long>(s.size()) != n_ || static_cast<long>(r.size()) != N_) {
    throw ParamError("matvec_t: shape mismatch");
  }
  long cpb = cols_per_block();
  long rpb = rows_per_block();
  std::vector<float> scratch;
  for (int c : cblocks) {
    const auto& rows = nz_rows_[c];
    for (long jl = 0; jl < cpb; ++jl) {
      long j = static_cast<long>(c) * cpb + jl;
      const float* col = column(j, scratch);
      double acc = 0.0;
      for (int rb : rows) {
        const float* seg = col + rb * rpb;
        const double* sseg = s.data() + rb * rpb;
        for (long i = 0; i < rpb; ++i) acc += seg[i] * sseg[i];
      }
      r[j] = acc;
    }
  }
}

void DesignMatrix::add_column(long j, double coef, std::span<double> out) const {
  if (j < 0 || j >= N_) throw ParamError("add_column: column out of range");
  if (static_cast<long>(out.size()) != n_) throw ParamError("add_column: shape mismatch");
  std::vector<float> scratch;
  const float* col = column(j, scratch);
  for (long i = 0; i < n_; ++i) out[i] += coef * col[i];
}

}  // namespace scsparc
