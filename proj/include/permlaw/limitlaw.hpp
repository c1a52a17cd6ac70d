#pragma once

// The limiting objects: the cubic equation satisfied by the Stieltjes
// transform of the limiting symmetrized singular-value law on the imaginary
// axis, the circular density, the fixed-d spectral density, and the
// finite-size error envelopes used by the experiments.

#include <complex>
#include <cstdint>

namespace permlaw::limitlaw {

using Complex = std::complex<double>;

struct CubicParams {
  double delta;  // 1 - |z|^2, in (0, 1]
  double eta;    // imaginary-axis height, > 0
};

// Q(x) = x (x + eta)^2 - delta x - eta.  Q(0) = -eta < 0 and Q has exactly
// one positive root; writing wt m = -i x turns the cubic fixed-point
// equation for the limit transform at xi = i eta into Q(x) = 0.
double cubic_eval(double x, const CubicParams& p);
double cubic_derivative(double x, const CubicParams& p);

// The unique positive root: bracketing + bisection to width 1e-14, then one
// Newton polish.  Postcondition: x > 0 and |Q(x)| <= 1e-12.
double positive_root(const CubicParams& p);

// wt m_infty(i eta) = -i x_star(1 - |z|^2, eta); domain |z| < 1, eta > 0.
Complex wtm_infinity(Complex z, double eta);

// Residual of the limiting fixed-point equation at a trial value m:
//   m (xi - m)^2 + (1 - |z|^2) m - xi.
// Vanishes at m = wt m_infty(xi); evaluating it at a finite-n transform
// measures how far the empirical transform is from solving the limit
// equation.
Complex loop_residual(Complex m, Complex xi, Complex z);

// Density of the uniform law on the unit disk: 1/pi inside, 0 outside.
double circular_density(Complex z);

// Fixed-d limiting spectral density
//   f_d(z) = (1/pi) d^2 (d-1) / (d^2 - |z|^2)^2   for |z| <= sqrt(d),
// integrating to 1 over the disk of radius sqrt(d); requires d >= 2.
double mu_d_density(Complex z, std::uint32_t d);

// Error envelope C * max(d^{-1/2}, log(n) n^{-1/4}) / eta^3.
double locallaw_bound(std::uint32_t n, std::uint32_t d, double eta, double C);

// Admissibility predicate eta^3 * min(sqrt(d), n^{1/4}/log n) >= varpi.
bool locallaw_admissible(std::uint32_t n, std::uint32_t d, double eta, double varpi);

// |Q(x)| / |x - x_star|, the certified-stability ratio; away from the root
// it stays bounded below, which is what makes the fixed point numerically
// identifiable.  Throws std::invalid_argument when x equals the root.
double stability_gap(double x, const CubicParams& p);

}  // namespace permlaw::limitlaw
