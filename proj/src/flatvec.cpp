#include "permlaw/flatvec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "permlaw/rng.hpp"

namespace permlaw::flatvec {

namespace {

// Optimal fit for a fixed lambda: support = m largest |u_j - lambda|, and the
// residual collects everything off the support.
FlatFit fit_for_lambda(const Eigen::VectorXcd& u, std::uint32_t m, Complex lambda) {
  const std::int64_t n = u.size();
  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dev(n);
  for (std::int64_t j = 0; j < n; ++j) dev[j] = std::abs(u[j] - lambda);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::int64_t a, std::int64_t b) { return dev[a] > dev[b]; });
  FlatFit fit;
  fit.lambda = lambda;
  fit.support.assign(order.begin(), order.begin() + m);
  std::sort(fit.support.begin(), fit.support.end());
  double acc = 0.0;
  for (std::int64_t r = m; r < n; ++r) acc += dev[order[r]] * dev[order[r]];
  fit.rho = std::sqrt(acc);
  return fit;
}

Complex mean_off_support(const Eigen::VectorXcd& u, const std::vector<std::int64_t>& support) {
  const std::int64_t n = u.size();
  std::vector<bool> on(n, false);
  for (std::int64_t j : support) on[j] = true;
  Complex acc = 0.0;
  std::int64_t cnt = 0;
  for (std::int64_t j = 0; j < n; ++j)
    if (!on[j]) {
      acc += u[j];
      ++cnt;
    }
  return cnt > 0 ? acc / static_cast<double>(cnt) : Complex(0.0, 0.0);
}

FlatFit alternate_from(const Eigen::VectorXcd& u, std::uint32_t m, Complex lambda0) {
  // Coordinate descent: the off-support mean is optimal for a fixed support,
  // the m largest deviations are optimal for a fixed lambda, so the residual
  // never increases and the support settles after finitely many rounds.
  FlatFit fit = fit_for_lambda(u, m, lambda0);
  for (int it = 0; it < 100; ++it) {
    const Complex lambda = mean_off_support(u, fit.support);
    const FlatFit next = fit_for_lambda(u, m, lambda);
    const bool settled = next.support == fit.support;
    if (next.rho <= fit.rho) fit = next;
    if (settled) break;
  }
  return fit;
}

}  // namespace

FlatFit flat_distance(const Eigen::VectorXcd& u, std::uint32_t m, int restarts) {
  const std::int64_t n = u.size();
  if (n == 0) throw std::invalid_argument("flat_distance: empty vector");
  if (m >= static_cast<std::uint64_t>(n)) {
    FlatFit fit;
    fit.rho = 0.0;
    fit.support.resize(n);
    std::iota(fit.support.begin(), fit.support.end(), 0);
    return fit;
  }
  FlatFit best = alternate_from(u, m, Complex(0.0, 0.0));
  const Complex mean = u.mean();
  FlatFit cand = alternate_from(u, m, mean);
  if (cand.rho < best.rho) best = cand;
  // Deterministic pseudo-random starts inside the disk holding the entries.
  RngStream rng(0xF1A7F1A7ULL, 0);
  const double radius = u.cwiseAbs().maxCoeff();
  for (int r = 0; r < restarts; ++r) {
    const double rad = radius * std::sqrt(rng.next_unit());
    const double ang = 2.0 * M_PI * rng.next_unit();
    cand = alternate_from(u, m, Complex(rad * std::cos(ang), rad * std::sin(ang)));
    if (cand.rho < best.rho) best = cand;
  }
  return best;
}

FlatFit flat_distance_exhaustive(const Eigen::VectorXcd& u, std::uint32_t m) {
  const std::int64_t n = u.size();
  if (n == 0) throw std::invalid_argument("flat_distance_exhaustive: empty vector");
  if (m >= static_cast<std::uint64_t>(n)) return flat_distance(u, m, 0);
  // Guard the support count C(n, m).
  double combos = 1.0;
  for (std::uint32_t i = 0; i < m; ++i) combos *= static_cast<double>(n - i) / (i + 1);
  if (combos > 2e6) throw std::invalid_argument("flat_distance_exhaustive: too many supports");

  std::vector<std::int64_t> support(m);
  std::iota(support.begin(), support.end(), 0);
  FlatFit best;
  best.rho = std::numeric_limits<double>::infinity();
  for (;;) {
    // For a fixed support, the optimal lambda is the off-support mean.
    const Complex lambda = mean_off_support(u, support);
    std::vector<bool> on(n, false);
    for (std::int64_t j : support) on[j] = true;
    double acc = 0.0;
    for (std::int64_t j = 0; j < n; ++j)
      if (!on[j]) acc += std::norm(u[j] - lambda);
    const double rho = std::sqrt(acc);
    if (rho < best.rho) {
      best.rho = rho;
      best.lambda = lambda;
      best.support = support;
    }
    // Next m-combination in lexicographic order.
    std::int64_t i = static_cast<std::int64_t>(m) - 1;
    while (i >= 0 && support[i] == n - static_cast<std::int64_t>(m) + i) --i;
    if (i < 0) break;
    ++support[i];
    for (std::int64_t k = i + 1; k < static_cast<std::int64_t>(m); ++k)
      support[k] = support[k - 1] + 1;
  }
  return best;
}

BimodalSets bimodal_locate(const Eigen::VectorXcd& u, std::uint32_t m_star, double rho) {
  const std::int64_t n = u.size();
  if (n == 0) throw std::invalid_argument("bimodal_locate: empty vector");
  if (m_star >= static_cast<std::uint64_t>(n))
    throw std::invalid_argument("bimodal_locate: m_star must be < n");
  BimodalSets out;
  out.required = rho / (4.0 * std::sqrt(static_cast<double>(n)));

  const FlatFit fit = flat_distance(u, m_star);
  out.lambda = fit.lambda;
  if (fit.rho <= rho) return out;  // vector is flat at this scale; nothing to locate

  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> radius(n);
  for (std::int64_t j = 0; j < n; ++j) radius[j] = std::abs(u[j] - fit.lambda);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::int64_t a, std::int64_t b) { return radius[a] > radius[b]; });

  // Sweep the cut size t: far group = t largest radii, near group = entries at
  // radial distance >= required below the smallest far radius.  Radial
  // separation certifies the pairwise bound via the reverse triangle
  // inequality.  Keep the cut with the largest near group.
  std::size_t best_t = 0, best_near = 0;
  for (std::size_t t = m_star; t < static_cast<std::size_t>(n); ++t) {
    const double rmin_far = radius[order[t - 1]];
    std::size_t near_count = 0;
    for (std::size_t r = t; r < static_cast<std::size_t>(n); ++r)
      if (radius[order[r]] <= rmin_far - out.required) ++near_count;
    if (near_count > best_near) {
      best_near = near_count;
      best_t = t;
    }
  }
  if (best_near == 0) return out;

  out.found = true;
  out.far.assign(order.begin(), order.begin() + best_t);
  const double rmin_far = radius[order[best_t - 1]];
  for (std::size_t r = best_t; r < static_cast<std::size_t>(n); ++r)
    if (radius[order[r]] <= rmin_far - out.required) out.near.push_back(order[r]);
  double max_near_radius = 0.0;
  for (std::int64_t j : out.near) max_near_radius = std::max(max_near_radius, radius[j]);
  out.separation = rmin_far - max_near_radius;
  out.near_ratio = static_cast<double>(out.near.size()) /
                   static_cast<double>(n - static_cast<std::int64_t>(m_star));
  std::sort(out.far.begin(), out.far.end());
  std::sort(out.near.begin(), out.near.end());
  return out;
}

}  // namespace permlaw::flatvec
