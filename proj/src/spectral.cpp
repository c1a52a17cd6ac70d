#include "permlaw/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "permlaw/errors.hpp"

namespace permlaw::spectral {

ShiftedMatrix build_shifted(const permmat::PermutationSum& s, Complex z) {
  const std::uint32_t n = s.n();
  const double scale = 1.0 / std::sqrt(static_cast<double>(s.d()));
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& p : s.perms())
    for (std::uint32_t i = 1; i <= n; ++i) a(i - 1, p(i) - 1) -= scale;
  a.diagonal().array() += z;
  return ShiftedMatrix{n, s.d(), z, std::move(a)};
}

SingularSpectrum singular_values(const ShiftedMatrix& a) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a.entries);
  Eigen::VectorXd vals = svd.singularValues();  // Eigen returns nonincreasing order
  return SingularSpectrum{a.n, a.d, a.z, std::move(vals)};
}

Eigen::MatrixXcd hermitize(const ShiftedMatrix& a) {
  const std::uint32_t n = a.n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  h.topRightCorner(n, n) = a.entries;
  h.bottomLeftCorner(n, n) = a.entries.adjoint();
  return h;
}

Eigen::VectorXcd eigenvalues(const permmat::PermutationSum& s) {
  Eigen::MatrixXd m = s.dense() / std::sqrt(static_cast<double>(s.d()));
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalues: QR iteration failed");
  return es.eigenvalues();
}

Complex stieltjes_m(const SingularSpectrum& spec, Complex xi) {
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < spec.values.size(); ++i) {
    const double s2 = spec.values[i] * spec.values[i];
    acc += 1.0 / (xi - s2);
  }
  return acc / static_cast<double>(spec.values.size());
}

Complex stieltjes_sym(const SingularSpectrum& spec, Complex xi) {
  const Complex xi2 = xi * xi;
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < spec.values.size(); ++i) {
    const double s2 = spec.values[i] * spec.values[i];
    acc += xi / (xi2 - s2);
  }
  return acc / static_cast<double>(spec.values.size());
}

LogPotential log_potential(const SingularSpectrum& spec, double clip) {
  if (!(clip > 0.0)) throw std::invalid_argument("log_potential: clip must be positive");
  LogPotential out;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < spec.values.size(); ++i) {
    double s = spec.values[i];
    if (s < clip) {
      s = clip;
      out.clipped = true;
    }
    acc += std::log(s);
  }
  out.value = acc / static_cast<double>(spec.values.size());
  return out;
}

double smallest_singular(const ShiftedMatrix& a) {
  const SingularSpectrum spec = singular_values(a);
  return spec.values[spec.values.size() - 1];
}

double smallest_singular_inverse_iteration(const ShiftedMatrix& a) {
  const Eigen::Index n = a.entries.rows();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a.entries);
  // Reject numerically singular input: an exactly zero pivot poisons the solves.
  const double diag_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(diag_min > 0.0) || !std::isfinite(diag_min))
    throw NumericError("inverse iteration: matrix is numerically singular");

  // Power iteration on (A A*)^{-1} = A^{-*} A^{-1}; the dominant eigenvalue is
  // 1/s_min^2.  Deterministic start from a fixed auxiliary stream.
  RngStream rng(0x5eed5eedULL, 0);
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.complex_normal();
  v.normalize();

  double rho = 0.0;
  const int max_iters = 20000;
  for (int it = 0; it < max_iters; ++it) {
    // w = (A A*)^{-1} v, obtained from A (A* w) = v.
    const Eigen::VectorXcd t = lu.solve(v);
    const Eigen::VectorXcd w = lu.adjoint().solve(t);
    rho = std::real(v.dot(w));  // Rayleigh quotient, real for a Hermitian operator
    if (!(rho > 0.0) || !std::isfinite(rho))
      throw NumericError("inverse iteration: lost positivity");
    // Hermitian residual bound: |rho - lambda_closest| <= ||B v - rho v||.
    const double resid = (w - rho * v).norm();
    if (resid <= 5e-8 * rho) return 1.0 / std::sqrt(rho);
    v = w / w.norm();
  }
  throw NumericError("inverse iteration: no convergence within iteration budget");
}

BlockTraces block_resolvent_traces(const ShiftedMatrix& a, Complex xi,
                                   const Eigen::MatrixXcd& m) {
  const Eigen::Index n = a.entries.rows();
  Eigen::MatrixXcd b = a.entries;
  if (m.size() != 0) {
    if (m.rows() != n || m.cols() != n)
      throw std::invalid_argument("block_resolvent_traces: perturbation shape mismatch");
    b += m;
  }
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  k.diagonal().setConstant(xi);
  k.topRightCorner(n, n) = -b;
  k.bottomLeftCorner(n, n) = -b.adjoint();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(k);
  const Eigen::MatrixXcd f = lu.inverse();
  BlockTraces out;
  out.f11 = f.topLeftCorner(n, n).trace() / static_cast<double>(n);
  out.f12 = f.topRightCorner(n, n).trace() / static_cast<double>(n);
  out.f21 = f.bottomLeftCorner(n, n).trace() / static_cast<double>(n);
  out.f22 = f.bottomRightCorner(n, n).trace() / static_cast<double>(n);
  return out;
}

double log_abs_det_scaled(const Eigen::MatrixXcd& matrix) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(matrix);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    const double p = std::abs(lu.matrixLU()(i, i));
    acc += std::log(p);  // -inf for an exactly singular matrix propagates honestly
  }
  return acc / static_cast<double>(matrix.rows());
}

}  // namespace permlaw::spectral
