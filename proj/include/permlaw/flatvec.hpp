#pragma once

// Distance of a unit vector to the set of "m-sparse plus constant" vectors,
//   rho(u) = min{ ||u - v - lambda 1||_2 : v m-sparse, lambda complex },
// computed by alternating minimisation with restarts, plus the exhaustive
// small-n oracle and a locator that, for vectors far from that set, exhibits
// two index groups whose entries are pairwise separated.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace permlaw::flatvec {

using Complex = std::complex<double>;

struct FlatFit {
  double rho = 0.0;                   // attained distance
  Complex lambda{0.0, 0.0};           // fitted constant level
  std::vector<std::int64_t> support;  // 0-based positions carrying the sparse part
};

// Alternating minimisation: for fixed lambda the optimal support keeps the m
// largest |u_j - lambda|, for fixed support the optimal lambda is the mean of
// u off the support.  Runs from lambda = 0, lambda = mean(u) and `restarts`
// deterministic pseudo-random starts, keeps the best.
FlatFit flat_distance(const Eigen::VectorXcd& u, std::uint32_t m, int restarts = 20);

// Exact minimum by enumerating all supports; guarded to C(n, m) <= 2e6.
FlatFit flat_distance_exhaustive(const Eigen::VectorXcd& u, std::uint32_t m);

struct BimodalSets {
  bool found = false;
  Complex lambda{0.0, 0.0};            // centre the radii are measured from
  std::vector<std::int64_t> far;       // |far| >= m_star, entries far from lambda
  std::vector<std::int64_t> near;      // entries close to lambda
  double separation = 0.0;             // min over pairs of |u_far - u_near| lower bound
  double required = 0.0;               // rho / (4 sqrt(n))
  double near_ratio = 0.0;             // |near| / (n - m_star)
};

// For u with flat_distance(u, m_star) > rho, searches for disjoint groups
// far/near with |far| >= m_star and pairwise entry separation at least
// rho/(4 sqrt(n)), by sorting |u_j - lambda| and sweeping the cut; radial
// separation r_far - r_near >= g certifies |u_{j1} - u_{j2}| >= g.
BimodalSets bimodal_locate(const Eigen::VectorXcd& u, std::uint32_t m_star, double rho);

}  // namespace permlaw::flatvec
