#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaudin/linalg.hpp"
#include "gaudin/scalar.hpp"

namespace gaudin {

/// Weight of a rank-l root system, stored in fundamental-weight coordinates
/// (the k-th coordinate is the pairing with the k-th simple coroot).
class Weight {
 public:
  Weight() = default;
  explicit Weight(std::vector<Rat> coords) : m_(std::move(coords)) {}
  static Weight zero(int rank) { return Weight(std::vector<Rat>(rank, Rat(0))); }

  int rank() const { return static_cast<int>(m_.size()); }
  const Rat& operator[](int i) const { return m_[i]; }
  Rat& operator[](int i) { return m_[i]; }
  const std::vector<Rat>& coords() const { return m_; }

  Weight operator+(const Weight& o) const;
  Weight operator-(const Weight& o) const;
  Weight operator*(const Rat& s) const;
  bool operator==(const Weight& o) const { return m_ == o.m_; }
  bool operator<(const Weight& o) const { return m_ < o.m_; }

  bool is_integral() const;
  bool is_dominant_integral() const;

  std::string str() const;

 private:
  std::vector<Rat> m_;
};

/// Combinatorial data of a type A_l root system.
struct RootData {
  int rank = 0;
  std::vector<std::vector<int>> cartan;  // a[i][j] = <alpha_j, alpha_i-check>
  Matrix<Rat> cartan_inv;

  static RootData type_a(int rank);

  Weight simple_root(int i) const;       // alpha_i in fundamental coordinates
  Weight fundamental_weight(int i) const;
  Weight rho() const;

  /// <lambda, alpha_i-check> for a weight in fundamental coordinates.
  Rat pairing(const Weight& w, int i) const { return w[i]; }

  /// Coordinates c with lambda = sum_i c_i alpha_i.
  std::vector<Rat> root_coords(const Weight& w) const;
  Weight from_root_coords(const std::vector<Rat>& c) const;
  /// Height <lambda, rho-check> in the root lattice; errors when not integral.
  Rat height(const Weight& w) const;

  /// Simple reflection s_i.
  Weight reflect(const Weight& w, int i) const;

  /// Coordinates of a weight in the epsilon basis of gl_n (n = rank + 1),
  /// with omega_k = eps_1 + ... + eps_k - (k/n) sum_a eps_a.  The returned
  /// n-vector sums to zero.
  std::vector<Rat> epsilon_coords(const Weight& w) const;
};

/// Weyl group element given by a reduced word in the simple reflections
/// (0-based generator indices; empty word = identity).
struct WeylElement {
  std::vector<int> word;

  bool operator==(const WeylElement& o) const { return word == o.word; }
};

/// Ordinary (unshifted) action; the word acts with its rightmost letter first.
Weight weyl_apply(const RootData& rd, const WeylElement& w, const Weight& lambda);

/// Shifted action w . lambda = w(lambda + rho) - rho.
Weight weyl_shifted_apply(const RootData& rd, const WeylElement& w, const Weight& lambda);

WeylElement weyl_inverse(const WeylElement& w);

/// All (rank+1)! elements with BFS-minimal reduced words, identity first.
std::vector<WeylElement> weyl_group(const RootData& rd);

/// The longest element.
WeylElement weyl_longest(const RootData& rd);

/// -w0(lambda); for type A this reverses the fundamental coordinates.
Weight dual_weight(const RootData& rd, const Weight& lambda);

struct InfinityClass {
  Weight lambda_infinity;  // dominant integral
  WeylElement w;
};

/// Finds the unique dominant integral lambda_inf and Weyl element w with
///   mu = w(-w0(lambda_inf) + rho) - rho,
/// i.e. mu lies in the shifted orbit of the dual weight at infinity.
/// Returns nullopt when mu + rho is irregular or not integral-dominant
/// conjugate.
std::optional<InfinityClass> classify_weight_at_infinity(const RootData& rd,
                                                         const Weight& mu);

}  // namespace gaudin
