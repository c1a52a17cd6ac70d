#pragma once

// Hermitization pipeline made numerical: log-potential fields over a grid of
// shifts z, the discrete-Laplacian density recovery, distance-to-circular
// metrics for eigenvalue clouds, and the Ginibre baseline for replacement
// comparisons.

#include <complex>
#include <cstdint>

#include <Eigen/Core>

#include "permlaw/permmat.hpp"
#include "permlaw/rng.hpp"

namespace permlaw::girko {

using Complex = std::complex<double>;

// Square grid of resolution^2 nodes covering
//   [Re c - w, Re c + w] x [Im c - w, Im c + w]
// with nodes at the endpoints; spacing h = 2w/(resolution - 1).
struct ComplexGrid {
  Complex center{0.0, 0.0};
  double half_width = 1.5;
  int resolution = 61;

  double spacing() const { return 2.0 * half_width / (resolution - 1); }
  // j indexes the real direction, k the imaginary direction.
  Complex node(int j, int k) const {
    const double h = spacing();
    return center + Complex(-half_width + j * h, -half_width + k * h);
  }
};

void validate(const ComplexGrid& grid);  // resolution >= 3, half_width > 0

struct PotentialField {
  ComplexGrid grid;
  Eigen::MatrixXd values;                               // values(j, k) at node(j, k)
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> clipped;
};

// U(z) = (1/n) sum_i log max(s_i(z I - S/sqrt(d)), clip) on every grid node.
// The serial version is the reference implementation; the threaded one
// computes the same nodes with an OpenMP loop and must agree bit for bit.
PotentialField log_potential_field_serial(const permmat::PermutationSum& s,
                                          const ComplexGrid& grid, double clip);
PotentialField log_potential_field(const permmat::PermutationSum& s, const ComplexGrid& grid,
                                   double clip, int threads);

struct DensityField {
  ComplexGrid grid;
  // interior(j, k) sits at grid.node(j + 1, k + 1); the boundary ring has no
  // five-point stencil and is excluded.
  Eigen::MatrixXd interior;
};

// (1/2 pi) times the five-point discrete Laplacian of the potential;
// approximates the eigenvalue density of S/sqrt(d) on interior nodes.
DensityField laplacian_density(const PotentialField& field);

// sum of interior density values times h^2: approximately the fraction of
// eigenvalues falling strictly inside the grid.
double interior_mass(const DensityField& density);

struct DiskMetrics {
  double inside_fraction;  // share of eigenvalues with |lambda| <= 1 + epsilon
  double radial_ks;        // KS distance of |lambda|^2 to uniform, eigenvalues with |lambda| <= 1
  double angular_ks;       // KS distance of arg(lambda) to uniform on (-pi, pi]
};

DiskMetrics disk_metrics(const Eigen::VectorXcd& eigs, double epsilon);

// n x n matrix of i.i.d. complex Gaussians with E|g|^2 = 1, filled row by row.
Eigen::MatrixXcd sample_ginibre(std::uint32_t n, RngStream& rng);

// Node-wise difference of normalised log determinants,
//   (1/n) log|det(S/sqrt(d) - z)| - (1/n) log|det(G/sqrt(n) - z)|,
// the quantity whose smallness transfers the circular law from the Gaussian
// ensemble.  Entries follow the grid layout of PotentialField::values.
Eigen::MatrixXd replacement_compare(const permmat::PermutationSum& s,
                                    const Eigen::MatrixXcd& ginibre, const ComplexGrid& grid,
                                    int threads);

// C^2 bump (1 - |z|^2/R^2)^3 on |z| <= R (zero outside) and its Laplacian
// (12/R^2)(1 - s)(3 s - 1) with s = |z|^2/R^2; the test function for the
// integration-by-parts consistency check.
double smooth_bump(Complex z, double radius);
double smooth_bump_laplacian(Complex z, double radius);

}  // namespace permlaw::girko
