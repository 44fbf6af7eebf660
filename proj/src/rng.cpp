#include "gmhp/rng.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gmhp {

namespace {

// Finalizer of the splitmix64 generator (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
constexpr std::uint64_t kSubstreamSalt = 0xd6e8feb86659fd93ull;
constexpr std::uint64_t kPathSalt = 0xa24baed4963ee407ull;

}  // namespace

RngStream::RngStream(std::uint64_t seed) : key_(seed), state_(seed) {}

RngStream RngStream::substream(std::uint64_t label) const {
  return RngStream(mix64(key_ ^ mix64(label + kSubstreamSalt)));
}

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RngStream::uniform01() {
  // 53 random bits in [0,1), reflected into (0,1].
  return 1.0 - static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be positive");
  return -std::log(uniform01()) / rate;
}

double RngStream::normal(double mean, double stddev) {
  std::normal_distribution<double> dist(mean, stddev);
  return dist(*this);
}

long long RngStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be nonnegative");
  if (mean == 0.0) return 0;
  std::poisson_distribution<long long> dist(mean);
  return dist(*this);
}

std::uint64_t derive_path_seed(std::uint64_t master_seed, std::uint64_t path_index) {
  return mix64(master_seed ^ mix64(path_index + kPathSalt));
}

}  // namespace gmhp
