#pragma once

// Dense spectral computations for the shifted matrices A(z) = z I - S/sqrt(d):
// singular values, Hermitization, Stieltjes transforms of the singular-value
// distribution, log potentials, and block resolvent traces.  Everything here
// is exact dense linear algebra; statistical interpretation lives in the
// experiment drivers.

#include <complex>
#include <cstdint>

#include <Eigen/Core>

#include "permlaw/permmat.hpp"

namespace permlaw::spectral {

using Complex = std::complex<double>;

struct ShiftedMatrix {
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  Complex z;
  Eigen::MatrixXcd entries;  // z I - S/sqrt(d)
};

struct SingularSpectrum {
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  Complex z;
  Eigen::VectorXd values;  // sorted nonincreasing, all >= 0
};

// Dense A(z) = z I - S/sqrt(d).
ShiftedMatrix build_shifted(const permmat::PermutationSum& s, Complex z);

// Full singular value spectrum of A, sorted nonincreasing.
SingularSpectrum singular_values(const ShiftedMatrix& a);

// 2n x 2n Hermitian block matrix [[0, A], [A*, 0]]; its spectrum is +-s_i(A).
Eigen::MatrixXcd hermitize(const ShiftedMatrix& a);

// Eigenvalues of S/sqrt(d) (the matrix is real; complex pairs come from the
// real Schur form), in no particular order.
Eigen::VectorXcd eigenvalues(const permmat::PermutationSum& s);

// m_n(xi) = (1/n) sum_i 1/(xi - s_i^2), the Stieltjes transform of the
// empirical law of the squared singular values.  Requires Im xi != 0 or
// xi real and away from the spectrum.
Complex stieltjes_m(const SingularSpectrum& spec, Complex xi);

// wt m_n(xi) = (1/n) sum_i xi/(xi^2 - s_i^2), the Stieltjes transform of the
// symmetrized singular value law (eigenvalues +-s_i of the Hermitization).
// Satisfies wt m_n(xi) = xi * m_n(xi^2) and |wt m_n| <= 1/|Im xi|.
Complex stieltjes_sym(const SingularSpectrum& spec, Complex xi);

struct LogPotential {
  double value = 0.0;  // (1/n) sum_i log(max(s_i, clip))
  bool clipped = false;
};

LogPotential log_potential(const SingularSpectrum& spec, double clip);

// Smallest singular value via the full SVD.
double smallest_singular(const ShiftedMatrix& a);

// Independent estimate of the smallest singular value: power iteration on
// (A A*)^{-1} through an LU factorisation of A.  Throws NumericError if A is
// numerically singular or the iteration fails to converge.
double smallest_singular_inverse_iteration(const ShiftedMatrix& a);

struct BlockTraces {
  Complex f11, f12, f21, f22;  // each (1/n) Tr of the n x n block
};

// Normalised block traces of F(xi) = (xi I_{2n} - [[0, B], [B*, 0]])^{-1}
// with B = A + M (M optional perturbation, pass a 0 x 0 matrix to skip).
// Computed through one dense 2n x 2n solve so the result does not share a
// code path with the SVD routines; (f11 + f22)/2 equals stieltjes_sym(xi).
BlockTraces block_resolvent_traces(const ShiftedMatrix& a, Complex xi,
                                   const Eigen::MatrixXcd& m = Eigen::MatrixXcd());

// log |det(A)| / n via LU (no SVD); used as a cross-oracle for log_potential.
double log_abs_det_scaled(const Eigen::MatrixXcd& matrix);

}  // namespace permlaw::spectral
