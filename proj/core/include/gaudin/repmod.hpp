#pragma once

#include <map>
#include <memory>
#include <vector>

#include "gaudin/liealg.hpp"
#include "gaudin/linalg.hpp"

namespace gaudin {

/// Exact matrix model of a type A highest-weight module.  Basis states are
/// PBW monomials in the negative root vectors applied to a highest vector
/// (state 0), ordered by root height and then lexicographically.
///
/// Chevalley basis elements are indexed as
///   k          -> e_k   (k-th positive root)
///   P + k      -> f_k
///   2P + i     -> h_i   (i-th simple coroot; P = number of positive roots)
/// and the first `rank` positive roots are the simple ones.
class Representation {
 public:
  enum class Kind { VermaTruncated, Irreducible };

  int rank() const { return rank_; }
  std::size_t dim() const { return weights_.size(); }
  Kind kind() const { return kind_; }
  const Weight& highest_weight() const { return lambda_; }
  /// Height cutoff used when the underlying Verma module was truncated.
  int depth() const { return depth_; }

  const Weight& weight_of(std::size_t state) const { return weights_[state]; }
  /// PBW exponent vector labelling a basis state.
  const std::vector<unsigned char>& pbw_label(std::size_t state) const {
    return labels_[state];
  }

  int positive_root_count() const { return static_cast<int>(root_weights_.size()); }
  const Weight& positive_root(int k) const { return root_weights_[k]; }
  int root_height(int k) const { return root_heights_[k]; }

  const SparseMat<Rat>& raising(int i) const { return e_[i]; }
  const SparseMat<Rat>& lowering(int i) const { return f_[i]; }
  /// Diagonal matrix of the i-th simple coroot.
  SparseMat<Rat> cartan(int i) const;

  /// Matrix of an arbitrary Chevalley basis element (cached).  Non-simple
  /// root vectors are built from iterated commutators of the simple ones.
  const SparseMat<Rat>& basis_matrix(int id) const;

  int e_id(int k) const { return k; }
  int f_id(int k) const { return positive_root_count() + k; }
  int h_id(int i) const { return 2 * positive_root_count() + i; }

 private:
  friend Representation verma_rep(const RootData&, const Weight&, int, std::size_t);
  friend Representation irreducible_rep(const RootData&, const Weight&, std::size_t);

  int rank_ = 0;
  Kind kind_ = Kind::VermaTruncated;
  int depth_ = 0;
  Weight lambda_;
  std::vector<Weight> weights_;
  std::vector<std::vector<unsigned char>> labels_;
  std::vector<Weight> root_weights_;
  std::vector<int> root_heights_;
  std::vector<SparseMat<Rat>> e_, f_;
  mutable std::map<int, SparseMat<Rat>> basis_cache_;
};

/// Verma module with highest weight lambda, truncated to root height <= depth.
/// The Chevalley relations hold exactly on states of height < depth.
Representation verma_rep(const RootData& rd, const Weight& lambda, int depth,
                         std::size_t state_cap = 50000);

/// Finite-dimensional irreducible with dominant integral highest weight,
/// realized as the Verma quotient by the radical of the contravariant form.
Representation irreducible_rep(const RootData& rd, const Weight& lambda,
                               std::size_t dim_cap = 2000);

/// Weyl dimension formula.
Rat weyl_dimension(const RootData& rd, const Weight& lambda);

/// Gram matrix of the contravariant form on the weight-mu subspace,
/// in the representation's own basis.
Matrix<Rat> shapovalov_gram(const Representation& rep, const Weight& mu);

/// Tensor product of highest-weight modules over a common root system.
/// State indices are mixed-radix with the last factor fastest.
class TensorRep {
 public:
  explicit TensorRep(std::vector<std::shared_ptr<const Representation>> factors);

  int sites() const { return static_cast<int>(factors_.size()); }
  const Representation& factor(int i) const { return *factors_[i]; }
  std::size_t dim() const { return dim_; }
  int rank() const { return factors_.front()->rank(); }

  std::size_t stride(int i) const { return strides_[i]; }
  std::size_t factor_index(std::size_t state, int i) const {
    return (state / strides_[i]) % factors_[i]->dim();
  }
  Weight weight_of(std::size_t state) const;
  /// Index of v_1 (x) ... (x) v_N, all factors at their highest state.
  std::size_t highest_state() const { return 0; }

  std::vector<std::size_t> weight_subspace(const Weight& mu) const;

  /// a acting on the chosen tensor slot.
  SparseMat<Rat> site_matrix(int site, const SparseMat<Rat>& a) const;

 private:
  std::vector<std::shared_ptr<const Representation>> factors_;
  std::vector<std::size_t> strides_;
  std::size_t dim_ = 0;
};

TensorRep tensor_irreducibles(const RootData& rd, const std::vector<Weight>& lambdas,
                              std::size_t dim_cap = 2000);

/// Basis of the subspace of weight mu killed by every raising generator,
/// as exact vectors in the full tensor space.
std::vector<std::vector<Rat>> singular_space(const TensorRep& t, const Weight& mu);

}  // namespace gaudin
