#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "permlaw/rng.hpp"

using permlaw::RngStream;

TEST_SUITE("rng") {
  TEST_CASE("replay is exact and streams are independent") {
    RngStream a(12345, 3), b(12345, 3), c(12345, 4), d(54321, 3);
    bool same = true, differs_stream = false, differs_seed = false;
    for (int i = 0; i < 256; ++i) {
      const std::uint64_t x = a.next_u64();
      if (x != b.next_u64()) same = false;
      if (x != c.next_u64()) differs_stream = true;
      if (x != d.next_u64()) differs_seed = true;
    }
    CHECK(same);
    CHECK(differs_stream);
    CHECK(differs_seed);
  }

  TEST_CASE("counter mode: draws depend only on position") {
    RngStream a(9, 1);
    for (int i = 0; i < 5; ++i) a.next_u64();
    RngStream b(9, 1);
    std::vector<std::uint64_t> first5;
    for (int i = 0; i < 5; ++i) first5.push_back(b.next_u64());
    // b has consumed 5 draws; both streams now agree forever.
    for (int i = 0; i < 50; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(first5.size() == 5);
  }

  TEST_CASE("unit doubles live in [0,1) with the right moments") {
    RngStream r(777, 0);
    const int N = 200000;
    double s1 = 0.0, s2 = 0.0;
    double mn = 1.0, mx = 0.0;
    for (int i = 0; i < N; ++i) {
      const double u = r.next_unit();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      s1 += u;
      s2 += u * u;
      mn = std::min(mn, u);
      mx = std::max(mx, u);
    }
    const double mean = s1 / N;
    const double var = s2 / N - mean * mean;
    CHECK(std::abs(mean - 0.5) < 0.005);          // ~7 sigma
    CHECK(std::abs(var - 1.0 / 12.0) < 0.002);    // generous
    CHECK(mn < 0.001);
    CHECK(mx > 0.999);
  }

  TEST_CASE("uniform_below is in range and unbiased") {
    RngStream r(42, 0);
    const std::uint64_t n = 7;
    const int N = 140000;
    std::vector<int> counts(n, 0);
    for (int i = 0; i < N; ++i) {
      const std::uint64_t v = r.uniform_below(n);
      REQUIRE(v < n);
      ++counts[v];
    }
    // Each bin expects 20000, sd ~ 131; allow 6 sigma.
    for (std::uint64_t k = 0; k < n; ++k) CHECK(std::abs(counts[k] - 20000) < 800);
  }

  TEST_CASE("normal moments") {
    RngStream r(2718, 5);
    const int N = 200000;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < N; ++i) {
      const double x = r.normal();
      s1 += x;
      s2 += x * x;
      s4 += x * x * x * x;
    }
    CHECK(std::abs(s1 / N) < 0.02);
    CHECK(std::abs(s2 / N - 1.0) < 0.03);
    CHECK(std::abs(s4 / N - 3.0) < 0.2);  // Gaussian kurtosis
  }

  TEST_CASE("complex normal has unit second moment, isotropic") {
    RngStream r(31337, 2);
    const int N = 100000;
    double m2 = 0.0, re = 0.0, im = 0.0;
    for (int i = 0; i < N; ++i) {
      const auto zc = r.complex_normal();
      m2 += std::norm(zc);
      re += zc.real();
      im += zc.imag();
    }
    CHECK(std::abs(m2 / N - 1.0) < 0.02);
    CHECK(std::abs(re / N) < 0.01);
    CHECK(std::abs(im / N) < 0.01);
  }
}
