#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "permlaw/flatvec.hpp"
#include "permlaw/rng.hpp"

using namespace permlaw;
using Complex = std::complex<double>;

TEST_SUITE("flatvec") {
  TEST_CASE("two-level unit vector: closed-form distance 1/sqrt(3)") {
    // Half the entries at 2/sqrt(2n), half at 0, m = n/4 removable: the best
    // split leaves a two-level residual whose distance works out to
    // sqrt(n/4 * a^2 * ...) = 1/sqrt(3) independent of n.
    for (int n : {8, 16, 32, 64}) {
      Eigen::VectorXcd u = Eigen::VectorXcd::Zero(n);
      for (int i = 0; i < n / 2; ++i) u[i] = 2.0 / std::sqrt(2.0 * n);
      CHECK(std::abs(u.norm() - 1.0) < 1e-12);
      const auto fit = flatvec::flat_distance(u, n / 4);
      CHECK(fit.rho == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-10));
    }
  }

  TEST_CASE("alternating minimisation matches the exhaustive oracle") {
    RngStream r(211, 0);
    for (int rep = 0; rep < 30; ++rep) {
      const int n = 6 + static_cast<int>(r.uniform_below(5));  // 6..10
      const std::uint32_t m = 1 + static_cast<std::uint32_t>(r.uniform_below(3));
      Eigen::VectorXcd u(n);
      for (int i = 0; i < n; ++i) u[i] = r.complex_normal();
      u.normalize();
      const auto fast = flatvec::flat_distance(u, m);
      const auto exact = flatvec::flat_distance_exhaustive(u, m);
      CHECK(fast.rho >= exact.rho - 1e-12);  // exhaustive is the true minimum
      CHECK(fast.rho == doctest::Approx(exact.rho).epsilon(1e-9));
    }
  }

  TEST_CASE("exactly representable vectors have distance zero") {
    RngStream r(223, 0);
    const int n = 20;
    const Complex lambda(0.3, -0.7);
    Eigen::VectorXcd u = Eigen::VectorXcd::Constant(n, lambda);
    u[3] += Complex(2.0, 1.0);
    u[11] += Complex(-1.0, 0.5);
    const auto fit = flatvec::flat_distance(u, 2);
    CHECK(fit.rho < 1e-12);
    REQUIRE(fit.support.size() == 2);
    CHECK(std::find(fit.support.begin(), fit.support.end(), 3) != fit.support.end());
    CHECK(std::find(fit.support.begin(), fit.support.end(), 11) != fit.support.end());
    CHECK(std::abs(fit.lambda - lambda) < 1e-12);

    // m >= n trivially gives zero.
    CHECK(flatvec::flat_distance(u, 25).rho == 0.0);
    // Constant vectors are flat for every m.
    CHECK(flatvec::flat_distance(Eigen::VectorXcd::Constant(9, Complex(1.0, 2.0)), 0).rho <
          1e-14);
  }

  TEST_CASE("distance is invariant under adding multiples of the ones vector") {
    RngStream r(227, 0);
    Eigen::VectorXcd u(15);
    for (int i = 0; i < 15; ++i) u[i] = r.complex_normal();
    const auto base = flatvec::flat_distance(u, 3);
    const Eigen::VectorXcd shifted =
        u + Eigen::VectorXcd::Constant(15, Complex(0.8, -1.1));
    const auto moved = flatvec::flat_distance(shifted, 3);
    CHECK(moved.rho == doctest::Approx(base.rho).epsilon(1e-9));
  }

  TEST_CASE("bimodal locator certifies pairwise separation") {
    // The two-level vector is 1/sqrt(3)-far from flat; with rho = 0.5 the
    // locator must exhibit far/near groups with the advertised gap.
    const int n = 32;
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < n / 2; ++i) u[i] = 2.0 / std::sqrt(2.0 * n);
    const std::uint32_t m_star = n / 4;
    const double rho = 0.5;
    REQUIRE(flatvec::flat_distance(u, m_star).rho > rho);

    const auto loc = flatvec::bimodal_locate(u, m_star, rho);
    REQUIRE(loc.found);
    CHECK(loc.far.size() >= m_star);
    CHECK(!loc.near.empty());
    CHECK(loc.required == doctest::Approx(rho / (4.0 * std::sqrt(double(n)))));
    CHECK(loc.separation >= loc.required);

    // The actual guarantee, verified pair by pair.
    for (const auto j : loc.far)
      for (const auto k : loc.near) CHECK(std::abs(u[j] - u[k]) >= loc.required - 1e-12);

    // Disjointness of the groups.
    for (const auto j : loc.far)
      CHECK(std::find(loc.near.begin(), loc.near.end(), j) == loc.near.end());
  }

  TEST_CASE("bimodal locator declines flat vectors") {
    Eigen::VectorXcd u = Eigen::VectorXcd::Constant(16, Complex(0.25, 0.0));
    const auto loc = flatvec::bimodal_locate(u, 4, 0.5);
    CHECK_FALSE(loc.found);
  }

  TEST_CASE("random gaussian vectors: locator succeeds whenever distance is large") {
    RngStream r(229, 0);
    for (int rep = 0; rep < 10; ++rep) {
      Eigen::VectorXcd u(24);
      for (int i = 0; i < 24; ++i) u[i] = r.complex_normal();
      u.normalize();
      const auto fit = flatvec::flat_distance(u, 2);
      if (fit.rho <= 0.3) continue;  // only the far regime carries a guarantee
      const auto loc = flatvec::bimodal_locate(u, 2, 0.3);
      REQUIRE(loc.found);
      for (const auto j : loc.far)
        for (const auto k : loc.near) CHECK(std::abs(u[j] - u[k]) >= loc.required - 1e-12);
    }
  }
}
