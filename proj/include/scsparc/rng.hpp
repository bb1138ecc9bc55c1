#ifndef SCSPARC_RNG_HPP
#define SCSPARC_RNG_HPP

#include <cstdint>
#include <span>
#include <string_view>

namespace scsparc {

uint64_t hash64(uint64_t x);
uint64_t hash64(std::string_view s);

// Counter-style stream handle.  Streams are cheap values: a (master_seed,
// stream_id) pair.  Deriving a child stream mixes a salt into the id, so any
// number of statistically independent streams can be split off without
// coordination between threads.
struct RngStream {
  uint64_t master_seed = 0;
  uint64_t stream_id = 0;

  RngStream derive(uint64_t salt) const;
  RngStream derive(std::string_view label) const;
  RngStream derive(std::string_view label, uint64_t a) const;
  RngStream derive(std::string_view label, uint64_t a, uint64_t b) const;
};

// xoshiro256++ engine seeded deterministically from a stream.  Instances are
// not shareable between threads; instantiate one per stream instead.
class Rng {
 public:
  explicit Rng(RngStream stream);

  uint64_t next_u64();
  double uniform();  // [0, 1)
  double normal();   // N(0, 1), Box-Muller with a cached spare

  void fill_normal(std::span<double> out);
  void fill_normal(std::span<float> out);

 private:
  uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace scsparc

#endif
