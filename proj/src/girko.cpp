#include "permlaw/girko.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "permlaw/parallel.hpp"
#include "permlaw/spectral.hpp"

namespace permlaw::girko {

void validate(const ComplexGrid& grid) {
  if (grid.resolution < 3) throw std::invalid_argument("grid: resolution must be >= 3");
  if (!(grid.half_width > 0.0)) throw std::invalid_argument("grid: half_width must be positive");
}

static PotentialField field_with_threads(const permmat::PermutationSum& s,
                                         const ComplexGrid& grid, double clip, int threads) {
  validate(grid);
  if (!(clip > 0.0)) throw std::invalid_argument("log_potential_field: clip must be positive");
  const int res = grid.resolution;
  PotentialField out;
  out.grid = grid;
  out.values.resize(res, res);
  out.clipped.resize(res, res);
  parallel_for(static_cast<std::int64_t>(res) * res, threads, [&](std::int64_t idx) {
    const int j = static_cast<int>(idx / res);
    const int k = static_cast<int>(idx % res);
    const auto shifted = spectral::build_shifted(s, grid.node(j, k));
    const auto spec = spectral::singular_values(shifted);
    const auto pot = spectral::log_potential(spec, clip);
    out.values(j, k) = pot.value;
    out.clipped(j, k) = pot.clipped ? 1 : 0;
  });
  return out;
}

PotentialField log_potential_field_serial(const permmat::PermutationSum& s,
                                          const ComplexGrid& grid, double clip) {
  return field_with_threads(s, grid, clip, 1);
}

PotentialField log_potential_field(const permmat::PermutationSum& s, const ComplexGrid& grid,
                                   double clip, int threads) {
  return field_with_threads(s, grid, clip, resolve_threads(threads));
}

DensityField laplacian_density(const PotentialField& field) {
  validate(field.grid);
  const int res = field.grid.resolution;
  const double h = field.grid.spacing();
  const double scale = 1.0 / (2.0 * M_PI * h * h);
  DensityField out;
  out.grid = field.grid;
  out.interior.resize(res - 2, res - 2);
  for (int j = 1; j + 1 < res; ++j)
    for (int k = 1; k + 1 < res; ++k) {
      const double lap = field.values(j + 1, k) + field.values(j - 1, k) +
                         field.values(j, k + 1) + field.values(j, k - 1) -
                         4.0 * field.values(j, k);
      out.interior(j - 1, k - 1) = scale * lap;
    }
  return out;
}

double interior_mass(const DensityField& density) {
  const double h = density.grid.spacing();
  return density.interior.sum() * h * h;
}

// One-sample KS distance of sorted values against a continuous CDF.
static double ks_against(const std::vector<double>& sorted, double (*cdf)(double)) {
  const std::size_t m = sorted.size();
  if (m == 0) return 1.0;
  double dist = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double f = cdf(sorted[i]);
    dist = std::max(dist, std::abs(f - static_cast<double>(i) / m));
    dist = std::max(dist, std::abs(static_cast<double>(i + 1) / m - f));
  }
  return dist;
}

DiskMetrics disk_metrics(const Eigen::VectorXcd& eigs, double epsilon) {
  if (eigs.size() == 0) throw std::invalid_argument("disk_metrics: empty spectrum");
  const Eigen::Index n = eigs.size();
  Eigen::Index inside = 0;
  std::vector<double> rsq, args;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = std::abs(eigs[i]);
    if (r <= 1.0 + epsilon) ++inside;
    if (r <= 1.0) {
      rsq.push_back(r * r);
      args.push_back(std::arg(eigs[i]));
    }
  }
  std::sort(rsq.begin(), rsq.end());
  std::sort(args.begin(), args.end());
  DiskMetrics out;
  out.inside_fraction = static_cast<double>(inside) / static_cast<double>(n);
  // Under the circular law, |lambda|^2 is uniform on [0,1] and arg(lambda)
  // uniform on (-pi, pi].
  out.radial_ks = ks_against(rsq, [](double x) { return std::clamp(x, 0.0, 1.0); });
  out.angular_ks =
      ks_against(args, [](double t) { return std::clamp((t + M_PI) / (2.0 * M_PI), 0.0, 1.0); });
  return out;
}

Eigen::MatrixXcd sample_ginibre(std::uint32_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("sample_ginibre: n must be positive");
  Eigen::MatrixXcd g(n, n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
  return g;
}

Eigen::MatrixXd replacement_compare(const permmat::PermutationSum& s,
                                    const Eigen::MatrixXcd& ginibre, const ComplexGrid& grid,
                                    int threads) {
  validate(grid);
  const std::uint32_t n = s.n();
  if (ginibre.rows() != static_cast<Eigen::Index>(n) || ginibre.cols() != ginibre.rows())
    throw std::invalid_argument("replacement_compare: shape mismatch");
  const int res = grid.resolution;
  const Eigen::MatrixXd sm = s.dense() / std::sqrt(static_cast<double>(s.d()));
  const Eigen::MatrixXcd gm = ginibre / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd delta(res, res);
  parallel_for(static_cast<std::int64_t>(res) * res, resolve_threads(threads),
               [&](std::int64_t idx) {
                 const int j = static_cast<int>(idx / res);
                 const int k = static_cast<int>(idx % res);
                 const Complex z = grid.node(j, k);
                 Eigen::MatrixXcd lhs = (-sm).cast<Complex>();
                 lhs.diagonal().array() += z;
                 Eigen::MatrixXcd rhs = -gm;
                 rhs.diagonal().array() += z;
                 delta(j, k) = spectral::log_abs_det_scaled(lhs) -
                               spectral::log_abs_det_scaled(rhs);
               });
  return delta;
}

double smooth_bump(Complex z, double radius) {
  const double sfrac = std::norm(z) / (radius * radius);
  if (sfrac >= 1.0) return 0.0;
  const double t = 1.0 - sfrac;
  return t * t * t;
}

double smooth_bump_laplacian(Complex z, double radius) {
  const double sfrac = std::norm(z) / (radius * radius);
  if (sfrac >= 1.0) return 0.0;
  return 12.0 / (radius * radius) * (1.0 - sfrac) * (3.0 * sfrac - 1.0);
}

}  // namespace permlaw::girko
