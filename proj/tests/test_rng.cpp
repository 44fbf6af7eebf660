#include <doctest.h>

#include <cmath>
#include <vector>

#include "gmhp/rng.hpp"

using namespace gmhp;

TEST_SUITE("rng") {

TEST_CASE("same seed reproduces the sequence") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("substreams do not depend on parent consumption") {
  RngStream fresh(7);
  RngStream drained(7);
  for (int i = 0; i < 17; ++i) drained.next_u64();
  RngStream child_a = fresh.substream(3);
  RngStream child_b = drained.substream(3);
  for (int i = 0; i < 20; ++i) CHECK(child_a.next_u64() == child_b.next_u64());
}

TEST_CASE("sibling substreams differ") {
  RngStream root(1);
  CHECK(root.substream(0).next_u64() != root.substream(1).next_u64());
  CHECK(root.substream(0).key() != root.substream(0).substream(0).key());
}

TEST_CASE("uniform01 lies in (0,1]") {
  RngStream rng(11);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("poisson mean zero and empirical mean") {
  RngStream rng(5);
  CHECK(rng.poisson(0.0) == 0);

  const double mean = 4.2;
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(rng.poisson(mean));
  const double empirical = sum / n;
  const double se = std::sqrt(mean / n);
  CHECK(std::abs(empirical - mean) < 4.0 * se);
}

TEST_CASE("exponential empirical mean") {
  RngStream rng(9);
  const double rate = 2.5;
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.exponential(rate);
  const double empirical = sum / n;
  const double se = 1.0 / (rate * std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(empirical - 1.0 / rate) < 4.0 * se);
}

TEST_CASE("path seeds are stable under batch growth") {
  std::vector<std::uint64_t> small, large;
  for (int j = 0; j < 4; ++j) small.push_back(derive_path_seed(99, j));
  for (int j = 0; j < 16; ++j) large.push_back(derive_path_seed(99, j));
  for (int j = 0; j < 4; ++j) CHECK(small[j] == large[j]);
}

}  // TEST_SUITE
