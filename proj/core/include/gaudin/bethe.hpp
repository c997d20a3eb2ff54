#pragma once

#include <cstdint>
#include <vector>

#include "gaudin/gaudin.hpp"

namespace gaudin {

/// Simple-root index per unknown w_j (0-based).
using ColorAssignment = std::vector<int>;

template <typename F>
struct BetheSolution {
  std::vector<F> w;
  ColorAssignment colors;
  double residual = 0.0;            // max-norm of the equation residual
  double jacobian_condition = 0.0;  // singular-value ratio at the root
  bool possibly_degenerate = false; // near-singular Jacobian
};

/// r_j = sum_i <lambda_i, alpha_{i_j}-check>/(w_j - z_i)
///     - sum_{s != j} <alpha_{i_s}, alpha_{i_j}-check>/(w_j - w_s).
/// Also evaluated through the partial-fraction connection (the constant term
/// of the expansion at w_j, paired with the coroot) and cross-checked.
template <typename F>
std::vector<F> bae_residual(const GaudinProblem<F>& p, const BetheSolution<F>& s);

/// Closed-form derivative dr_j / dw_k.
template <typename F>
Matrix<F> bae_jacobian(const GaudinProblem<F>& p, const BetheSolution<F>& s);

/// mu = sum_i lambda_i - sum_j alpha_{i_j}.
template <typename F>
Weight solution_weight(const GaudinProblem<F>& p, const ColorAssignment& colors);

/// Ordered-partition state: phi = (-1)^m sum over ordered partitions
/// (I^1,...,I^N) of {1..m} of the product over sites of
///   F_{i(t_1)} ... F_{i(t_a)} v_lambda / ((w_{t_1}-w_{t_2}) ... (w_{t_a}-z_j)).
/// Per-site operator words are exact and memoized; the scalar chain is the
/// only place the w values enter.
template <typename F>
std::vector<F> bethe_vector(const GaudinProblem<F>& p, const BetheSolution<F>& s,
                            const TensorRep& t);

/// Canonical representative of the same-color permutation orbit: sorts the
/// w values within each color by (real, imaginary).
template <typename F>
void canonicalize_solution(BetheSolution<F>& s);

struct SolverConfig {
  std::uint64_t seed = 1;
  int starts = 0;       // 0 = 64 * m
  double tol = 1e-12;
  double dedup = 1e-8;
  int max_iter = 200;
  int threads = 1;
  double collision = 1e-6;
};

struct SolveResult {
  std::vector<BetheSolution<Cplx>> solutions;
  /// Roots with a w_j within the collision radius of a marked point or of a
  /// same-color partner; excluded from completeness counts.
  std::vector<BetheSolution<Cplx>> collisions;
  int converged_starts = 0;
};

/// Multistart damped Newton over random starts in a disc of radius
/// 2 max|z_i| plus midpoint heuristics; converged roots are canonicalized and
/// deduplicated by single-linkage clustering.  Deterministic for a fixed
/// seed, independent of thread count.
SolveResult solve_bae(const GaudinProblem<Cplx>& p, const ColorAssignment& colors,
                      const SolverConfig& cfg = {});

}  // namespace gaudin
