#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>

#include "amle/random.hpp"
#include "test_models.hpp"

using namespace amle;

TEST_CASE("standard_normals count and determinism") {
  NoiseSource a(42, 7);
  CHECK(standard_normals(a, 0).empty());
  NoiseSource b(42, 7);
  NoiseSource c(42, 7);
  CHECK(standard_normals(b, 1000) == standard_normals(c, 1000));

  // Copying forks an identical stream.
  NoiseSource d(1, 2);
  (void)d.normal();
  NoiseSource e = d;
  CHECK(d.normal() == e.normal());
  CHECK(d.normal() == e.normal());
}

TEST_CASE("uniforms lie in [0, 1)") {
  NoiseSource n(3, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = n.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("different streams and seeds differ") {
  NoiseSource a(42, 0);
  NoiseSource b(42, 1);
  NoiseSource c(43, 0);
  const Vector va = standard_normals(a, 16);
  CHECK(va != standard_normals(b, 16));
  CHECK(va != standard_normals(c, 16));
}

TEST_CASE("moments of 1e5 draws") {
  NoiseSource n(2024, 0);
  const std::size_t count = 100000;
  const Vector z = standard_normals(n, count);
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= static_cast<double>(count);
  double var = 0.0;
  for (double v : z) var += (v - mean) * (v - mean);
  var /= static_cast<double>(count - 1);
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(static_cast<double>(count)));
  CHECK(std::abs(var - 1.0) <= 0.02);
}

TEST_CASE("Kolmogorov-Smirnov on 1e4 draws") {
  NoiseSource n(99, 5);
  const Vector z = standard_normals(n, 10000);
  const double d = amle::testing::ks_distance(z, amle::testing::normal_cdf);
  // 1% critical value 1.628 / sqrt(n)
  CHECK(d < 1.628 / 100.0);
}

TEST_CASE("streams are pairwise uncorrelated") {
  const std::size_t count = 100000;
  const double bound = 4.0 / std::sqrt(static_cast<double>(count));
  std::vector<Vector> streams;
  for (std::uint64_t s = 0; s < 4; ++s) {
    NoiseSource n(777, s);
    streams.push_back(standard_normals(n, count));
  }
  for (std::size_t i = 0; i < streams.size(); ++i)
    for (std::size_t j = i + 1; j < streams.size(); ++j) {
      const double corr = dot(streams[i], streams[j]) /
                          (norm2(streams[i]) * norm2(streams[j]));
      CHECK(std::abs(corr) < bound);
    }
}

TEST_CASE("sequence follows the documented construction") {
  const std::uint64_t master = 0x1234567890abcdefULL;
  const std::uint64_t stream = 0xfedcba0987654321ULL;
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 engine(seq);
  auto uniform = [&] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };

  Vector expected;
  while (expected.size() < 200) {
    const double v1 = 2.0 * uniform() - 1.0;
    const double v2 = 2.0 * uniform() - 1.0;
    const double s = v1 * v1 + v2 * v2;
    if (s == 0.0 || s >= 1.0) continue;
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    expected.push_back(v1 * f);
    expected.push_back(v2 * f);
  }
  NoiseSource n(master, stream);
  CHECK(standard_normals(n, 200) == expected);
}
