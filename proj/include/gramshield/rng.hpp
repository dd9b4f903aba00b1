#ifndef GRAMSHIELD_RNG_HPP
#define GRAMSHIELD_RNG_HPP

#include <array>
#include <cstdint>

namespace gramshield {

// Seedable, splittable PRNG (xoshiro256**). We do not use <random>
// distributions because their output is implementation-defined; every
// draw here is bit-reproducible across platforms and compilers.
//
// Substreams are derived from (base seed, stream id), so per-trajectory
// work can run on any number of workers in any order without changing
// the sampled values.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  // Substream keyed by id, independent of this stream's current state.
  RngStream substream(std::uint64_t id) const;

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double next_double();

  // Uniform integer on [0, n); n must be > 0. Fixed-point multiply,
  // no rejection loop, deterministic draw count.
  std::uint64_t next_below(std::uint64_t n);

  std::uint64_t base_seed() const { return base_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t base_seed_ = 0;
  std::uint64_t stream_id_ = 0;
};

}  // namespace gramshield

#endif
