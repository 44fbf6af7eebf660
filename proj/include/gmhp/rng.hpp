#ifndef GMHP_RNG_HPP
#define GMHP_RNG_HPP

#include <cstdint>

namespace gmhp {

// Splittable random stream for reproducible Monte Carlo.
//
// A stream is identified by a 64-bit key and draws from the splitmix64
// sequence started at that key. Child streams are derived from the parent
// *key* and an integer label, never from the parent's draw position, so
// sibling streams can be consumed in any order (or on any thread) without
// affecting each other's output.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed);

  // Stream keyed by (this stream's key, label). Independent of draws already
  // made from this stream.
  RngStream substream(std::uint64_t label) const;

  std::uint64_t next_u64();

  // Uniform on (0,1]; never returns 0, so -log(uniform01()) is finite.
  double uniform01();
  double uniform(double lo, double hi);
  double exponential(double rate);
  double normal(double mean, double stddev);

  // Poisson with mean >= 0 (mean 0 yields 0).
  long long poisson(double mean);

  // UniformRandomBitGenerator interface, usable with <random> distributions.
  std::uint64_t operator()() { return next_u64(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~0ull; }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t state_;
};

// Seed of path `path_index` in a batch run under `master_seed`. Derivation is
// position-independent: growing the batch never reshuffles earlier paths.
std::uint64_t derive_path_seed(std::uint64_t master_seed, std::uint64_t path_index);

}  // namespace gmhp

#endif
