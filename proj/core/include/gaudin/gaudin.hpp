#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gaudin/repmod.hpp"
#include "gaudin/scalar.hpp"

namespace gaudin {

/// Marked points with attached dominant integral weights; the shared
/// parameter object of the whole pipeline.  F is Rat or Cplx.
template <typename F>
struct GaudinProblem {
  RootData rd;
  std::vector<F> points;
  std::vector<Weight> weights;
  std::optional<Weight> weight_at_infinity;

  int sites() const { return static_cast<int>(points.size()); }

  void validate() const {
    if (points.size() != weights.size())
      throw DegenerateInputError("points and weights must match in length");
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j)
        if (points_coincide(points[i], points[j]))
          throw DegenerateInputError("marked points must be pairwise distinct");
    for (const auto& w : weights) {
      if (w.rank() != rd.rank)
        throw DegenerateInputError("weight rank does not match root data");
      if (!w.is_dominant_integral())
        throw DegenerateInputError("weights must be dominant integral");
    }
    if (weight_at_infinity && !weight_at_infinity->is_dominant_integral())
      throw DegenerateInputError("weight at infinity must be dominant integral");
  }
};

inline GaudinProblem<Cplx> complexify(const GaudinProblem<Rat>& p) {
  GaudinProblem<Cplx> out;
  out.rd = p.rd;
  for (const auto& z : p.points) out.points.push_back(FieldTraits<Cplx>::from_rat(z));
  out.weights = p.weights;
  out.weight_at_infinity = p.weight_at_infinity;
  return out;
}

/// Dual bases (J_a, J^a) for the trace form, realized inside a fixed
/// representation.  kappa_0(e_beta,f_beta) = 1 and kappa_0(h_i,h_j) = a_ij,
/// so the dual of h_i mixes the coroots through the inverse Cartan matrix.
struct InvariantForm {
  std::vector<SparseMat<Rat>> basis;
  std::vector<SparseMat<Rat>> dual;

  std::size_t size() const { return basis.size(); }

  static InvariantForm trace_form(const RootData& rd, const Representation& rep);
};

/// Quadratic Casimir Delta = 1/2 sum_a J_a J^a; scalar on irreducibles,
/// lambda(lambda+2)/4 in the rank-1 case.
SparseMat<Rat> casimir_matrix(const Representation& rep);

/// sum_a J_a^{(i)} J^{a(j)}, the z-independent two-site block of the
/// Hamiltonians.  Symmetric in (i, j).
SparseMat<Rat> pair_operator(const RootData& rd, const TensorRep& t, int i, int j);

/// Xi_i = sum_{j != i} sum_a J_a^{(i)} J^{a(j)} / (z_i - z_j); exact for
/// rational points.
template <typename F>
SparseMat<F> gaudin_hamiltonian(const GaudinProblem<F>& p, const TensorRep& t, int i);

/// Generating function Phi_u(S) = 1/2 sum_a M(J^a) M(J_a) with
/// M(X) = sum_i X^{(i)}/(u - z_i), assembled straight from the dual bases
/// (independently of gaudin_hamiltonian, so the partial-fraction identity
/// Phi_u(S) = sum Xi_i/(u-z_i) + sum Delta^{(i)}/(u-z_i)^2 stays a test).
template <typename F>
SparseMat<F> sugawara_generating(const GaudinProblem<F>& p, const TensorRep& t,
                                 const F& u);

/// One joint eigenvector of the restricted Hamiltonians.
struct JointEigenvalue {
  std::vector<Cplx> values;       // eigenvalue of Xi_i per site
  std::vector<double> residuals;  // ||Xi_i v - theta_i v|| / ||v|| per site
  std::vector<Cplx> vector;       // eigenvector in the full tensor space
};

struct SpectrumRecord {
  std::size_t singular_dim = 0;
  bool possibly_degenerate = false;  // residuals stayed large after a retry
  bool retried = false;
  std::vector<JointEigenvalue> entries;
};

/// Brute-force oracle: restricts every Xi_i exactly to the singular weight-mu
/// subspace (asserting invariance on the way), then diagonalizes a random
/// real combination and reads each Xi_i off by Rayleigh quotients.  A
/// degeneracy of the combination triggers one retry before the record is
/// flagged possibly degenerate.
template <typename F>
SpectrumRecord joint_spectrum(const GaudinProblem<F>& p, const TensorRep& t,
                              const Weight& mu, std::uint64_t seed = 20240901,
                              std::size_t cap = 256);

}  // namespace gaudin
