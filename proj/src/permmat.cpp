#include "permlaw/permmat.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

namespace permlaw::permmat {

using nlohmann::json;

Permutation::Permutation(std::vector<std::uint32_t> images) : images_(std::move(images)) {
  const std::uint32_t n = static_cast<std::uint32_t>(images_.size());
  if (n == 0) throw std::invalid_argument("permutation: empty image list");
  std::vector<bool> seen(n, false);
  for (std::uint32_t v : images_) {
    if (v < 1 || v > n) throw std::invalid_argument("permutation: image out of range");
    if (seen[v - 1]) throw std::invalid_argument("permutation: repeated image");
    seen[v - 1] = true;
  }
}

Permutation Permutation::identity(std::uint32_t n) {
  std::vector<std::uint32_t> im(n);
  for (std::uint32_t i = 0; i < n; ++i) im[i] = i + 1;
  return Permutation(Trusted{}, std::move(im));
}

Permutation Permutation::inverse() const {
  std::vector<std::uint32_t> im(images_.size());
  for (std::uint32_t i = 0; i < images_.size(); ++i) im[images_[i] - 1] = i + 1;
  return Permutation(Trusted{}, std::move(im));
}

Permutation Permutation::compose(const Permutation& other) const {
  if (size() != other.size()) throw std::invalid_argument("compose: size mismatch");
  std::vector<std::uint32_t> im(images_.size());
  for (std::uint32_t i = 1; i <= size(); ++i) im[i - 1] = (*this)(other(i));
  return Permutation(Trusted{}, std::move(im));
}

Permutation Permutation::with_transposition(std::uint32_t a, std::uint32_t b) const {
  if (a < 1 || a > size() || b < 1 || b > size() || a == b)
    throw std::invalid_argument("with_transposition: bad positions");
  std::vector<std::uint32_t> im = images_;
  std::swap(im[a - 1], im[b - 1]);
  return Permutation(Trusted{}, std::move(im));
}

Permutation sample_permutation(std::uint32_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("sample_permutation: n must be positive");
  std::vector<std::uint32_t> im(n);
  for (std::uint32_t i = 0; i < n; ++i) im[i] = i + 1;
  for (std::uint32_t i = n; i >= 2; --i) {
    const std::uint32_t j = static_cast<std::uint32_t>(rng.uniform_below(i));  // in [0, i)
    std::swap(im[i - 1], im[j]);
  }
  return Permutation(Permutation::Trusted{}, std::move(im));
}

std::uint32_t fixed_points(const Permutation& p) {
  std::uint32_t c = 0;
  for (std::uint32_t i = 1; i <= p.size(); ++i)
    if (p(i) == i) ++c;
  return c;
}

std::vector<std::uint32_t> cycle_type(const Permutation& p) {
  const std::uint32_t n = p.size();
  std::vector<bool> visited(n, false);
  std::vector<std::uint32_t> lengths;
  for (std::uint32_t i = 1; i <= n; ++i) {
    if (visited[i - 1]) continue;
    std::uint32_t len = 0, j = i;
    do {
      visited[j - 1] = true;
      j = p(j);
      ++len;
    } while (j != i);
    lengths.push_back(len);
  }
  std::sort(lengths.rbegin(), lengths.rend());
  return lengths;
}

std::uint32_t hamming_distance(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) throw std::invalid_argument("hamming_distance: size mismatch");
  std::uint32_t c = 0;
  for (std::uint32_t i = 1; i <= p.size(); ++i)
    if (p(i) != q(i)) ++c;
  return c;
}

std::uint32_t trace_pair(const Permutation& p, const Permutation& q) {
  return p.size() - hamming_distance(p, q);
}

PermutationSum::PermutationSum(std::uint32_t n, std::vector<Permutation> perms)
    : n_(n), perms_(std::move(perms)) {
  if (n_ == 0) throw std::invalid_argument("permutation_sum: n must be positive");
  if (perms_.empty()) throw std::invalid_argument("permutation_sum: needs d >= 1 permutations");
  for (const auto& p : perms_)
    if (p.size() != n_) throw std::invalid_argument("permutation_sum: size mismatch");
}

PermutationSum PermutationSum::sample(std::uint32_t n, std::uint32_t d, RngStream& rng) {
  std::vector<Permutation> ps;
  ps.reserve(d);
  for (std::uint32_t l = 0; l < d; ++l) ps.push_back(sample_permutation(n, rng));
  return PermutationSum(n, std::move(ps));
}

Eigen::VectorXcd PermutationSum::matvec(const Eigen::VectorXcd& u) const {
  if (u.size() != static_cast<Eigen::Index>(n_)) throw std::invalid_argument("matvec: size mismatch");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n_);
  for (const auto& p : perms_)
    for (std::uint32_t i = 1; i <= n_; ++i) out[i - 1] += u[p(i) - 1];
  return out;
}

Eigen::VectorXcd PermutationSum::matvec_adjoint(const Eigen::VectorXcd& u) const {
  if (u.size() != static_cast<Eigen::Index>(n_))
    throw std::invalid_argument("matvec_adjoint: size mismatch");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n_);
  for (const auto& p : perms_)
    for (std::uint32_t i = 1; i <= n_; ++i) out[p(i) - 1] += u[i - 1];
  return out;
}

std::uint64_t PermutationSum::trace() const {
  std::uint64_t t = 0;
  for (const auto& p : perms_) t += fixed_points(p);
  return t;
}

std::uint64_t PermutationSum::trace_ssstar() const {
  // Tr S S* = sum_{l, l'} #{i : pi_l(i) = pi_l'(i)}; the diagonal terms give nd.
  std::uint64_t t = static_cast<std::uint64_t>(n_) * d();
  for (std::uint32_t a = 0; a < d(); ++a)
    for (std::uint32_t b = a + 1; b < d(); ++b)
      t += 2ull * trace_pair(perms_[a], perms_[b]);
  return t;
}

Eigen::MatrixXd PermutationSum::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
  for (const auto& p : perms_)
    for (std::uint32_t i = 1; i <= n_; ++i) m(i - 1, p(i) - 1) += 1.0;
  return m;
}

std::uint64_t PermutationSum::hamming_distance_to(const PermutationSum& other) const {
  if (n_ != other.n_ || d() != other.d())
    throw std::invalid_argument("hamming_distance_to: shape mismatch");
  std::uint64_t t = 0;
  for (std::uint32_t l = 0; l < d(); ++l) t += hamming_distance(perms_[l], other.perms_[l]);
  return t;
}

std::string to_json(const Permutation& p) {
  json arr = json::array();
  for (std::uint32_t v : p.images()) arr.push_back(v - 1);
  return arr.dump();
}

std::string to_json(const PermutationSum& s) {
  json obj;
  obj["n"] = s.n();
  obj["d"] = s.d();
  json perms = json::array();
  for (const auto& p : s.perms()) {
    json arr = json::array();
    for (std::uint32_t v : p.images()) arr.push_back(v - 1);
    perms.push_back(std::move(arr));
  }
  obj["perms"] = std::move(perms);
  return obj.dump();
}

static Permutation permutation_from_json_array(const json& arr) {
  if (!arr.is_array()) throw std::invalid_argument("permutation json: expected array");
  std::vector<std::uint32_t> im;
  im.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number_unsigned() && !v.is_number_integer())
      throw std::invalid_argument("permutation json: expected integer entries");
    const std::int64_t x = v.get<std::int64_t>();
    if (x < 0 || x >= static_cast<std::int64_t>(arr.size()))
      throw std::invalid_argument("permutation json: entry out of range");
    im.push_back(static_cast<std::uint32_t>(x) + 1);
  }
  return Permutation(std::move(im));  // validating constructor catches repeats
}

Permutation permutation_from_json(const std::string& text) {
  return permutation_from_json_array(json::parse(text));
}

PermutationSum permutation_sum_from_json(const std::string& text) {
  const json obj = json::parse(text);
  if (!obj.is_object() || !obj.contains("n") || !obj.contains("perms"))
    throw std::invalid_argument("permutation sum json: expected {n, d, perms}");
  const std::uint32_t n = obj.at("n").get<std::uint32_t>();
  std::vector<Permutation> ps;
  for (const auto& arr : obj.at("perms")) ps.push_back(permutation_from_json_array(arr));
  if (obj.contains("d") && obj.at("d").get<std::size_t>() != ps.size())
    throw std::invalid_argument("permutation sum json: d does not match perms");
  return PermutationSum(n, std::move(ps));
}

}  // namespace permlaw::permmat
