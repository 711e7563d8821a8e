#pragma once

#include <cstdint>
#include <span>

namespace predlab {

// Deterministic counter-style stream: a splitmix64 walk keyed by
// (master seed, stream id). Replicas draw from disjoint streams, so results
// do not depend on scheduling order.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : state_(seed) {}

  static RngStream derive(uint64_t master, uint64_t stream_id) {
    RngStream mixer(master + 0x9e3779b97f4a7c15ULL * (stream_id + 1));
    uint64_t s = mixer.next_u64();
    return RngStream(s ^ (stream_id * 0xbf58476d1ce4e5b9ULL));
  }

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) with 53 significant bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Draw an index from a probability vector (sums to ~1).
  int pick(std::span<const double> probs) {
    double u = next_unit();
    double acc = 0.0;
    int last_positive = 0;
    for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
      if (probs[i] > 0.0) last_positive = i;
      acc += probs[i];
      if (u < acc) return i;
    }
    return last_positive;  // rounding slack lands on the last positive cell
  }

 private:
  uint64_t state_;
};

}  // namespace predlab
