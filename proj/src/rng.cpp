#include "scsparc/rng.hpp"

#include <cmath>
#include <numbers>

namespace scsparc {

namespace {

inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

uint64_t hash64(uint64_t x) {
  uint64_t s = x;
  return splitmix64(s);
}

uint64_t hash64(std::string_view s) {
  // FNV-1a, then a finalizing mix.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return hash64(h);
}

RngStream RngStream::derive(uint64_t salt) const {
  return RngStream{master_seed, hash64(stream_id ^ hash64(salt))};
}

RngStream RngStream::derive(std::string_view label) const { return derive(hash64(label)); }

RngStream RngStream::derive(std::string_view label, uint64_t a) const {
  return derive(hash64(label)).derive(a);
}

RngStream RngStream::derive(std::string_view label, uint64_t a, uint64_t b) const {
  return derive(hash64(label)).derive(a).derive(b);
}

Rng::Rng(RngStream stream) {
  uint64_t seed = stream.master_seed ^ hash64(stream.stream_id);
  for (auto& w : s_) w = splitmix64(seed);
  // All-zero state would lock the generator; splitmix output of anything is
  // never all-zero across four words in practice, but guard regardless.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

uint64_t Rng::next_u64() {
  const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 shifted away from zero so log() stays finite.
  double u1 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

void Rng::fill_normal(std::span<double> out) {
  for (auto& v : out) v = normal();
}

void Rng::fill_normal(std::span<float> out) {
  for (auto& v : out) v = static_cast<float>(normal());
}

}  // namespace scsparc
