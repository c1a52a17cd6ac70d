#include "permlaw/limitlaw.hpp"

#include <cmath>
#include <stdexcept>

namespace permlaw::limitlaw {

static void check_params(const CubicParams& p) {
  if (!(p.delta > 0.0) || !(p.delta <= 1.0))
    throw std::invalid_argument("cubic: delta must lie in (0, 1]");
  if (!(p.eta > 0.0) || !std::isfinite(p.eta))
    throw std::invalid_argument("cubic: eta must be positive and finite");
}

double cubic_eval(double x, const CubicParams& p) {
  check_params(p);
  const double t = x + p.eta;
  return x * t * t - p.delta * x - p.eta;
}

double cubic_derivative(double x, const CubicParams& p) {
  check_params(p);
  const double t = x + p.eta;
  return t * t + 2.0 * x * t - p.delta;
}

double positive_root(const CubicParams& p) {
  check_params(p);
  // Q(0) = -eta < 0, and Q(1) = 1 - delta + eta + eta^2 > 0 for delta <= 1,
  // so [0, 1] always brackets; keep the doubling loop for robustness.
  double lo = 0.0, hi = 1.0;
  while (cubic_eval(hi, p) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e12) throw std::invalid_argument("positive_root: failed to bracket");
  }
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    if (cubic_eval(mid, p) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double x = 0.5 * (lo + hi);
  const double dq = cubic_derivative(x, p);
  if (dq != 0.0) {
    const double polished = x - cubic_eval(x, p) / dq;
    if (std::isfinite(polished) && polished > 0.0 &&
        std::abs(cubic_eval(polished, p)) <= std::abs(cubic_eval(x, p)))
      x = polished;
  }
  return x;
}

Complex wtm_infinity(Complex z, double eta) {
  const double zsq = std::norm(z);
  if (!(zsq < 1.0)) throw std::invalid_argument("wtm_infinity: requires |z| < 1");
  const double x = positive_root(CubicParams{1.0 - zsq, eta});
  return Complex(0.0, -x);
}

Complex loop_residual(Complex m, Complex xi, Complex z) {
  const Complex diff = xi - m;
  return m * diff * diff + (1.0 - std::norm(z)) * m - xi;
}

double circular_density(Complex z) {
  return std::norm(z) <= 1.0 ? 1.0 / M_PI : 0.0;
}

double mu_d_density(Complex z, std::uint32_t d) {
  if (d < 2) throw std::invalid_argument("mu_d_density: requires d >= 2");
  const double dd = static_cast<double>(d);
  const double zsq = std::norm(z);
  if (zsq > dd) return 0.0;
  const double denom = dd * dd - zsq;
  return dd * dd * (dd - 1.0) / (M_PI * denom * denom);
}

double locallaw_bound(std::uint32_t n, std::uint32_t d, double eta, double C) {
  if (n < 2 || d < 1) throw std::invalid_argument("locallaw_bound: requires n >= 2, d >= 1");
  if (!(eta > 0.0)) throw std::invalid_argument("locallaw_bound: eta must be positive");
  const double nn = static_cast<double>(n);
  const double term = std::max(1.0 / std::sqrt(static_cast<double>(d)),
                               std::log(nn) * std::pow(nn, -0.25));
  return C * term / (eta * eta * eta);
}

bool locallaw_admissible(std::uint32_t n, std::uint32_t d, double eta, double varpi) {
  if (n < 2 || d < 1) throw std::invalid_argument("locallaw_admissible: requires n >= 2, d >= 1");
  if (!(eta > 0.0)) return false;
  const double nn = static_cast<double>(n);
  const double strength = std::min(std::sqrt(static_cast<double>(d)),
                                   std::pow(nn, 0.25) / std::log(nn));
  return eta * eta * eta * strength >= varpi;
}

double stability_gap(double x, const CubicParams& p) {
  const double root = positive_root(p);
  const double dist = std::abs(x - root);
  if (dist == 0.0) throw std::invalid_argument("stability_gap: x coincides with the root");
  return std::abs(cubic_eval(x, p)) / dist;
}

}  // namespace permlaw::limitlaw
