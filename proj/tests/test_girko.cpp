#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "permlaw/girko.hpp"
#include "permlaw/permmat.hpp"
#include "permlaw/rng.hpp"
#include "permlaw/spectral.hpp"

using namespace permlaw;
using Complex = std::complex<double>;

TEST_SUITE("girko") {
  TEST_CASE("grid geometry") {
    girko::ComplexGrid g{Complex(0.5, -0.25), 1.2, 25};
    CHECK(g.spacing() == doctest::Approx(0.1));
    CHECK(std::abs(g.node(0, 0) - Complex(-0.7, -1.45)) < 1e-14);
    CHECK(std::abs(g.node(24, 24) - Complex(1.7, 0.95)) < 1e-14);
    CHECK(std::abs(g.node(12, 12) - g.center) < 1e-14);
    CHECK_THROWS_AS(girko::validate(girko::ComplexGrid{Complex(0, 0), 1.0, 2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(girko::validate(girko::ComplexGrid{Complex(0, 0), -1.0, 11}),
                    std::invalid_argument);
  }

  TEST_CASE("laplacian stencil is exact on quadratics") {
    girko::ComplexGrid g{Complex(0.3, 0.1), 0.9, 17};
    girko::PotentialField f;
    f.grid = g;
    f.values.resize(17, 17);
    f.clipped.setZero(17, 17);
    // f(x, y) = 2x^2 - y^2 + 0.5xy + 3x - y + 4, Laplacian = 4 - 2 = 2.
    for (int j = 0; j < 17; ++j)
      for (int k = 0; k < 17; ++k) {
        const Complex w = g.node(j, k);
        const double x = w.real(), y = w.imag();
        f.values(j, k) = 2.0 * x * x - y * y + 0.5 * x * y + 3.0 * x - y + 4.0;
      }
    const auto dens = girko::laplacian_density(f);
    REQUIRE(dens.interior.rows() == 15);
    for (int j = 0; j < 15; ++j)
      for (int k = 0; k < 15; ++k)
        CHECK(std::abs(dens.interior(j, k) - 2.0 / (2.0 * M_PI)) < 1e-10);
    // Interior mass of a constant density c is c * (interior area).
    const double h = g.spacing();
    CHECK(girko::interior_mass(dens) ==
          doctest::Approx(2.0 / (2.0 * M_PI) * 15 * 15 * h * h).epsilon(1e-9));
  }

  TEST_CASE("laplacian of a far harmonic function is numerically zero") {
    girko::ComplexGrid g{Complex(0.0, 0.0), 1.0, 41};
    girko::PotentialField f;
    f.grid = g;
    f.values.resize(41, 41);
    f.clipped.setZero(41, 41);
    const Complex pole(3.0, 1.0);  // outside the grid: log|z - pole| is harmonic here
    for (int j = 0; j < 41; ++j)
      for (int k = 0; k < 41; ++k) f.values(j, k) = std::log(std::abs(g.node(j, k) - pole));
    const auto dens = girko::laplacian_density(f);
    CHECK(dens.interior.cwiseAbs().maxCoeff() < 1e-2);
    CHECK(std::abs(girko::interior_mass(dens)) < 1e-3);
  }

  TEST_CASE("potential field: serial and threaded agree bit for bit") {
    RngStream r(83, 0);
    const auto s = permmat::PermutationSum::sample(20, 3, r);
    const girko::ComplexGrid g{Complex(0.0, 0.0), 1.4, 21};
    const auto serial = girko::log_potential_field_serial(s, g, 1e-30);
    const auto threaded = girko::log_potential_field(s, g, 1e-30, 4);
    CHECK((serial.values - threaded.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK((serial.clipped == threaded.clipped));

    // Spot-check one node against the direct definition.
    const Complex z0 = g.node(3, 17);
    const auto spec = spectral::singular_values(spectral::build_shifted(s, z0));
    double ref = 0.0;
    for (int i = 0; i < 20; ++i) ref += std::log(std::max(spec.values[i], 1e-30));
    CHECK(serial.values(3, 17) == doctest::Approx(ref / 20.0).epsilon(1e-12));
  }

  TEST_CASE("interior mass recovers the eigenvalue count of a small sum") {
    RngStream r(89, 0);
    const auto s = permmat::PermutationSum::sample(24, 4, r);
    const girko::ComplexGrid g{Complex(0.0, 0.0), 1.6, 81};
    const auto field = girko::log_potential_field(s, g, 1e-30, 0);
    const double mass = girko::interior_mass(girko::laplacian_density(field));
    const Eigen::VectorXcd eigs = spectral::eigenvalues(s);
    double inside = 0.0;
    const double h = g.spacing();
    for (int i = 0; i < eigs.size(); ++i)
      if (std::abs(eigs[i].real()) <= g.half_width - h &&
          std::abs(eigs[i].imag()) <= g.half_width - h)
        inside += 1.0;
    inside /= static_cast<double>(eigs.size());
    // The Perron eigenvalue sqrt(d) = 2 lies inside this grid, so the mass
    // should be close to 1; discretisation error scales with h^2 log terms.
    CHECK(std::abs(mass - inside) < 0.05);
  }

  TEST_CASE("disk metrics: calibrated samples") {
    // Near-perfect uniform sample: low-discrepancy radii and angles.
    const int N = 3000;
    Eigen::VectorXcd pts(N);
    for (int i = 0; i < N; ++i)
      pts[i] = std::polar(std::sqrt((i + 0.5) / N),
                          2.0 * M_PI * std::fmod(0.6180339887498949 * i, 1.0) - M_PI);
    const auto good = girko::disk_metrics(pts, 0.1);
    CHECK(good.inside_fraction == 1.0);
    CHECK(good.radial_ks < 0.01);
    CHECK(good.angular_ks < 0.01);

    // A ring at radius 1/2: empirical radial CDF jumps 0 -> 1 where the
    // uniform CDF is r^2 = 1/4, so KS = 3/4; angles remain uniform.
    Eigen::VectorXcd ring(N);
    for (int i = 0; i < N; ++i)
      ring[i] = std::polar(0.5, 2.0 * M_PI * (i + 0.5) / N - M_PI);
    const auto bad = girko::disk_metrics(ring, 0.1);
    CHECK(bad.radial_ks == doctest::Approx(0.75).epsilon(1e-3));
    CHECK(bad.angular_ks < 0.01);

    // Outliers count against inside_fraction.
    Eigen::VectorXcd mixed(4);
    mixed << Complex(0.1, 0.0), Complex(0.0, 0.5), Complex(2.0, 0.0), Complex(0.5, 0.5);
    CHECK(girko::disk_metrics(mixed, 0.1).inside_fraction == doctest::Approx(0.75));
  }

  TEST_CASE("ginibre sample: deterministic, correct second moment") {
    RngStream r1(97, 5), r2(97, 5);
    const auto g1 = girko::sample_ginibre(40, r1);
    const auto g2 = girko::sample_ginibre(40, r2);
    CHECK((g1 - g2).norm() == 0.0);
    CHECK(std::abs(g1.squaredNorm() / (40.0 * 40.0) - 1.0) < 0.05);
  }

  TEST_CASE("replacement comparison vanishes when the ensembles coincide") {
    RngStream r(101, 0);
    const auto s = permmat::PermutationSum::sample(12, 3, r);
    // Feed the permutation sum itself as the "Gaussian": G = S sqrt(n)/sqrt(d)
    // makes G/sqrt(n) = S/sqrt(d), so the node-wise difference is exactly 0.
    const Eigen::MatrixXcd fake =
        (s.dense() * std::sqrt(12.0) / std::sqrt(3.0)).cast<Complex>();
    const girko::ComplexGrid g{Complex(0.0, 0.0), 1.5, 11};
    const auto delta = girko::replacement_compare(s, fake, g, 2);
    CHECK(delta.cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("bump function: values, support and Laplacian consistency") {
    const double R = 1.3;
    CHECK(girko::smooth_bump(Complex(0.0, 0.0), R) == 1.0);
    CHECK(girko::smooth_bump(Complex(R, 0.0), R) == 0.0);
    CHECK(girko::smooth_bump(Complex(1.5, 0.0), R) == 0.0);
    CHECK(girko::smooth_bump_laplacian(Complex(2.0, 0.0), R) == 0.0);

    // Central finite differences reproduce the closed-form Laplacian.
    for (const Complex z0 : {Complex(0.2, 0.3), Complex(-0.6, 0.1), Complex(0.0, 0.9)}) {
      const double h = 1e-5;
      const double lap_fd =
          (girko::smooth_bump(z0 + Complex(h, 0), R) + girko::smooth_bump(z0 - Complex(h, 0), R) +
           girko::smooth_bump(z0 + Complex(0, h), R) + girko::smooth_bump(z0 - Complex(0, h), R) -
           4.0 * girko::smooth_bump(z0, R)) /
          (h * h);
      CHECK(girko::smooth_bump_laplacian(z0, R) == doctest::Approx(lap_fd).epsilon(1e-4));
    }

    // The Laplacian of a compactly supported function integrates to zero.
    girko::ComplexGrid g{Complex(0.0, 0.0), 2.0, 201};
    const double h = g.spacing();
    double acc = 0.0;
    for (int j = 0; j < 201; ++j)
      for (int k = 0; k < 201; ++k) acc += girko::smooth_bump_laplacian(g.node(j, k), R) * h * h;
    CHECK(std::abs(acc) < 1e-3);
  }
}
