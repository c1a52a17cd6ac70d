#pragma once

// Permutations of {1,...,n}, sums S = P_1 + ... + P_d of permutation matrices,
// and the handful of trace statistics the experiments lean on.  The matrix
// P_pi has entries P(i, j) = 1{pi(i) = j}; everything here works through the
// one-line images, matrices are never materialised in this module.

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "permlaw/rng.hpp"

namespace permlaw::permmat {

// A permutation of {1, ..., n}; images are stored 1-indexed (images[i-1] =
// pi(i)) and serialised 0-indexed.
class Permutation {
 public:
  // Validates that images is a bijection of {1,...,n}; throws std::invalid_argument.
  explicit Permutation(std::vector<std::uint32_t> images);

  static Permutation identity(std::uint32_t n);

  std::uint32_t size() const { return static_cast<std::uint32_t>(images_.size()); }

  // pi(i) for 1 <= i <= n (unchecked in release builds).
  std::uint32_t operator()(std::uint32_t i) const { return images_[i - 1]; }

  const std::vector<std::uint32_t>& images() const { return images_; }

  Permutation inverse() const;
  Permutation compose(const Permutation& other) const;  // (this ∘ other)(i) = this(other(i))

  // Swaps the images at positions a, b (1-indexed); the result differs from
  // *this in exactly the two rows a and b of the matrix.
  Permutation with_transposition(std::uint32_t a, std::uint32_t b) const;

  bool operator==(const Permutation& other) const { return images_ == other.images_; }

 private:
  struct Trusted {};
  Permutation(Trusted, std::vector<std::uint32_t> images) : images_(std::move(images)) {}
  friend Permutation sample_permutation(std::uint32_t n, RngStream& rng);

  std::vector<std::uint32_t> images_;
};

// Uniform permutation by Fisher-Yates with rejection-sampled swap indices.
Permutation sample_permutation(std::uint32_t n, RngStream& rng);

std::uint32_t fixed_points(const Permutation& p);          // = Tr P
std::vector<std::uint32_t> cycle_type(const Permutation& p);  // cycle lengths, nonincreasing
std::uint32_t hamming_distance(const Permutation& p, const Permutation& q);

// #{i : p(i) = q(i)} = Tr(P Q*); equals n - hamming_distance(p, q).
std::uint32_t trace_pair(const Permutation& p, const Permutation& q);

// Sum of d independent permutation matrices.
class PermutationSum {
 public:
  PermutationSum(std::uint32_t n, std::vector<Permutation> perms);

  static PermutationSum sample(std::uint32_t n, std::uint32_t d, RngStream& rng);

  std::uint32_t n() const { return n_; }
  std::uint32_t d() const { return static_cast<std::uint32_t>(perms_.size()); }
  const std::vector<Permutation>& perms() const { return perms_; }
  const Permutation& perm(std::uint32_t ell) const { return perms_[ell]; }

  // (S u)_i = sum_ell u_{pi_ell(i)}; O(n d), no dense matrix.
  Eigen::VectorXcd matvec(const Eigen::VectorXcd& u) const;
  // (S^* u)_j = sum over i with pi_ell(i) = j of u_i.
  Eigen::VectorXcd matvec_adjoint(const Eigen::VectorXcd& u) const;

  std::uint64_t trace() const;         // Tr S = sum of fixed point counts
  std::uint64_t trace_ssstar() const;  // Tr S S* = nd + sum_{l != l'} trace_pair

  // Dense n x n real matrix with entries S(i, j) = #{ell : pi_ell(i) = j}.
  Eigen::MatrixXd dense() const;

  // Number of entries differing from another sum with the same (n, d),
  // i.e. sum_ell hamming_distance(pi_ell, pi'_ell).
  std::uint64_t hamming_distance_to(const PermutationSum& other) const;

 private:
  std::uint32_t n_;
  std::vector<Permutation> perms_;
};

// Serialisation: a permutation becomes a compact 0-indexed JSON array
// ("[2,0,1]"), a sum becomes {"n":..,"d":..,"perms":[[..],..]}.
std::string to_json(const Permutation& p);
std::string to_json(const PermutationSum& s);
Permutation permutation_from_json(const std::string& text);
PermutationSum permutation_sum_from_json(const std::string& text);

}  // namespace permlaw::permmat
