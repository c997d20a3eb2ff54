#pragma once

#include <vector>

#include "gaudin/bethe.hpp"
#include "gaudin/diffop.hpp"
#include "gaudin/ratfun.hpp"

namespace gaudin {

/// First-order operator d_t + lambda(t) with values in the Cartan; stores
/// the simple-pole data (marked points, then Bethe points) plus the
/// component functions in fundamental coordinates.
template <typename F>
struct CartanConnection {
  RootData rd;
  std::vector<F> points;        // z_1..z_N, w_1..w_m
  std::vector<Weight> residues; // lambda_i at z_i, -alpha_{i_j} at w_j
  std::vector<RationalFunction<F>> components;  // per fundamental coordinate

  const RationalFunction<F>& component(int c) const { return components[c]; }
};

/// lambda(t) = sum_i lambda_i/(t - z_i) - sum_j alpha_{i_j}/(t - w_j).
template <typename F>
CartanConnection<F> cartan_connection(const GaudinProblem<F>& p,
                                      const BetheSolution<F>& s);

/// Epsilon-coordinate components u_1..u_n (n = rank + 1) with sum u_k = 0,
/// ready for the rank-n Miura factorization.
template <typename F>
std::vector<RationalFunction<F>> connection_components(const CartanConnection<F>& c);

/// Scalar operator d^n + v_1 d^{n-2} + ... + v_{n-1}; v stores the composed
/// coefficients in that sign convention, so the rank-2 Fuchsian form reads
/// d^2 - q with q = -v_1.
template <typename F>
struct Oper {
  int rank = 0;
  std::vector<RationalFunction<F>> v;  // v_1 .. v_{rank-1}

  const RationalFunction<F>& coefficient(int k) const { return v[k - 1]; }
};

/// (d - u_1) ... (d - u_n) for traceless u; the d^{n-1} coefficient is
/// asserted to vanish.
template <typename F>
Oper<F> miura_sln(const std::vector<RationalFunction<F>>& u_list);

/// Rank-2 special case u -> u^2 - u'; asserted against the factorization.
template <typename F>
Oper<F> miura_sl2(const RationalFunction<F>& u);

/// Full pipeline: Miura transform of the Cartan connection of (p, s).
template <typename F>
Oper<F> miura_oper(const GaudinProblem<F>& p, const BetheSolution<F>& s);

/// Principal parts of every v_k at the point, plus the rank-2 Fuchsian pair:
/// c = double-pole coefficient and mu = first-order residue of q = -v_1.
template <typename F>
struct ResidueRecord {
  std::vector<std::vector<F>> principal;  // per v_k: exponents -(k+1)..-1
  F c = F(0);
  F mu = F(0);
};

template <typename F>
ResidueRecord<F> oper_residues(const Oper<F>& o, const F& x);

/// Residue data at infinity, computed after the substitution t = 1/s with
/// each v_k pulled back as a (k+1)-differential.
template <typename F>
ResidueRecord<F> oper_residues_at_infinity(const Oper<F>& o);

template <typename F>
struct RegularityReport {
  bool regular = true;
  std::vector<std::vector<F>> singular;  // principal parts per v_k
  double worst = 0.0;                    // largest singular magnitude
};

/// True iff every v_k is pole-free at x (exactly, or below tol).
template <typename F>
RegularityReport<F> regularity_check(const Oper<F>& o, const F& x, double tol = 1e-9);

/// Resonance obstruction of the Frobenius series for d^2 - q at x, with
/// prescribed non-negative integer exponent parameter: exponents are
/// (lambda+2)/2 and -lambda/2, the gap is lambda + 1, and the returned value
/// vanishes iff the local solutions are log-free.  For lambda = 0 the value
/// is literally the first-order residue of q.
template <typename F>
F frobenius_obstruction(const Oper<F>& o, const F& x, int lambda);

/// v(phi(s)) phi'(s)^2 for a Moebius map (whose Schwarzian vanishes).
template <typename F>
RationalFunction<F> transform_projective_connection(const RationalFunction<F>& v,
                                                    const Mobius<F>& phi);

template <typename F>
struct EigenvaluePrediction {
  std::vector<F> miura;        // -Res_{z_i} v_1, the symbolic ground truth
  std::vector<F> closed_form;  // rank-1 pole-sum formula with kappa_pair
};

/// Per-site first-order residues of the Miura oper; the closed form is the
/// rank-1 evaluator kappa sum_{j!=i} l_i l_j/(z_i-z_j) - sum_j l_i/(z_i-w_j)
/// with the cross-term constant supplied by the caller (see fit_kappa_pair).
template <typename F>
EigenvaluePrediction<F> predicted_eigenvalues(const GaudinProblem<F>& p,
                                              const BetheSolution<F>& s,
                                              double kappa_pair);

/// Determines the cross-term constant from the two-point spectrum oracle
/// instead of trusting any printed formula; returns 1/2 under the trace
/// normalization.
double fit_kappa_pair();

}  // namespace gaudin
