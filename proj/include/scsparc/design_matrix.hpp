#ifndef SCSPARC_DESIGN_MATRIX_HPP
#define SCSPARC_DESIGN_MATRIX_HPP

#include <span>
#include <vector>

#include "scsparc/code_design.hpp"
#include "scsparc/rng.hpp"

namespace scsparc {

// Block-Gaussian design matrix.  Entries in block (r, c) are i.i.d.
// N(0, W_rc / variance_divisor); the SPARC construction divides by L, the
// generalized-linear-model variant by N * E[beta^2].
//
// Storage is column major and column addressed: every matrix column is drawn
// from its own derived stream, so columns can be regenerated on demand
// without materializing the rest of the matrix.  Only the column blocks
// listed in resident_cols are kept in memory (float); everything else is
// streamed when asked for.  Keeping the iterate-facing blocks resident and
// streaming the rest is what makes desk-scale runs fit in RAM.
class DesignMatrix {
 public:
  struct Options {
    double variance_divisor = 0.0;   // default: L (SPARC convention)
    std::vector<int> resident_cols;  // default: all column blocks
    double max_memory_gb = 4.0;
  };

  DesignMatrix(long n, long N, const BaseMatrix& w, RngStream stream, Options opts);

  long rows() const { return n_; }
  long cols() const { return N_; }
  int gamma() const { return gamma_; }
  long rows_per_block() const { return n_ / gamma_; }
  long cols_per_block() const { return N_ / gamma_; }
  bool resident(int cblock) const { return !panels_[cblock].empty(); }
  double block_variance(int r, int c) const;

  // u = sum over the given column blocks of A_{.c} v_c  (u zeroed first).
  void matvec(std::span<const double> v, std::span<double> u) const;
  void matvec(std::span<const double> v, std::span<double> u,
              std::span<const int> cblocks) const;

  // r_c = (A_{.c})^T s for each listed column block; other entries of r are
  // left untouched.
  void matvec_t(std::span<const double> s, std::span<double> r) const;
  void matvec_t(std::span<const double> s, std::span<double> r,
                std::span<const int> cblocks) const;

  // out += coef * column j, regenerating the column if it is not resident.
  void add_column(long j, double coef, std::span<double> out) const;

  // Bytes of resident storage for these options (exposed for planning).
  static size_t resident_bytes(long n, long N, int gamma, size_t resident_blocks);

 private:
  void generate_column(long j, float* dst) const;
  const float* column(long j, std::vector<float>& scratch) const;

  long n_ = 0;
  long N_ = 0;
  int gamma_ = 0;
  std::vector<double> block_sd_;        // sqrt(W_rc / divisor), row major
  RngStream stream_;
  std::vector<std::vector<float>> panels_;  // per column block, column major
};

}  // namespace scsparc

#endif
