#include "gaudin/opers.hpp"

#include <algorithm>
#include <cmath>

#include "gaudin/repmod.hpp"

namespace gaudin {

namespace {

template <typename F>
bool function_is_zero(const RationalFunction<F>& f, double tol) {
  if constexpr (FieldTraits<F>::is_exact)
    return f.is_zero();
  else
    return approx_equal(f, RationalFunction<F>::zero(), tol);
}

}  // namespace

template <typename F>
CartanConnection<F> cartan_connection(const GaudinProblem<F>& p, const BetheSolution<F>& s) {
  p.validate();
  if (s.w.size() != s.colors.size())
    throw DegenerateInputError("Bethe points and colors must match in length");
  for (std::size_t j = 0; j < s.w.size(); ++j) {
    for (const auto& z : p.points)
      if (points_coincide(s.w[j], z))
        throw DegenerateInputError("Bethe points must stay away from the marked points");
    for (std::size_t k = j + 1; k < s.w.size(); ++k)
      if (points_coincide(s.w[j], s.w[k]))
        throw DegenerateInputError("Bethe points must be pairwise distinct");
  }
  CartanConnection<F> c;
  c.rd = p.rd;
  c.points = p.points;
  c.residues = p.weights;
  for (std::size_t j = 0; j < s.w.size(); ++j) {
    const int col = s.colors[j];
    if (col < 0 || col >= p.rd.rank) throw DegenerateInputError("color out of range");
    c.points.push_back(s.w[j]);
    c.residues.push_back(p.rd.simple_root(col) * Rat(-1));
  }
  c.components.assign(p.rd.rank, RationalFunction<F>::zero());
  for (std::size_t k = 0; k < c.points.size(); ++k)
    for (int i = 0; i < p.rd.rank; ++i) {
      const Rat coef = c.residues[k][i];
      if (coef == 0) continue;
      c.components[i] = c.components[i] + RationalFunction<F>::simple_pole(
                                              c.points[k], FieldTraits<F>::from_rat(coef));
    }
  return c;
}

template <typename F>
std::vector<RationalFunction<F>> connection_components(const CartanConnection<F>& c) {
  const int n = c.rd.rank + 1;
  std::vector<RationalFunction<F>> u(n, RationalFunction<F>::zero());
  for (std::size_t k = 0; k < c.points.size(); ++k) {
    const std::vector<Rat> eps = c.rd.epsilon_coords(c.residues[k]);
    for (int a = 0; a < n; ++a) {
      if (eps[a] == 0) continue;
      u[a] = u[a] +
             RationalFunction<F>::simple_pole(c.points[k], FieldTraits<F>::from_rat(eps[a]));
    }
  }
  return u;
}

template <typename F>
Oper<F> miura_sln(const std::vector<RationalFunction<F>>& u_list) {
  const int n = static_cast<int>(u_list.size());
  if (n < 2) throw Error("miura_sln needs at least two factors");
  RationalFunction<F> trace = RationalFunction<F>::zero();
  for (const auto& u : u_list) trace = trace + u;
  if (!function_is_zero(trace, 1e-9)) throw Error("miura_sln: factors must sum to zero");

  DiffOp<F> d = DiffOp<F>::first_order(-u_list[0]);
  for (int k = 1; k < n; ++k) d = compose(d, DiffOp<F>::first_order(-u_list[k]));
  if (!function_is_zero(d.coeff(static_cast<std::size_t>(n - 1)), 1e-9))
    throw Error("miura_sln: subleading coefficient failed to cancel");

  Oper<F> o;
  o.rank = n;
  for (int k = 1; k <= n - 1; ++k) o.v.push_back(d.coeff(static_cast<std::size_t>(n - 1 - k)));
  return o;
}

template <typename F>
Oper<F> miura_sl2(const RationalFunction<F>& u) {
  Oper<F> o = miura_sln<F>({u, -u});
  const RationalFunction<F> direct = u.derivative() - u * u;
  if constexpr (FieldTraits<F>::is_exact) {
    if (!(o.v[0] == direct)) throw Error("miura_sl2: factorization mismatch");
  } else {
    if (!approx_equal(o.v[0], direct, 1e-9)) throw Error("miura_sl2: factorization mismatch");
  }
  return o;
}

template <typename F>
Oper<F> miura_oper(const GaudinProblem<F>& p, const BetheSolution<F>& s) {
  return miura_sln(connection_components(cartan_connection(p, s)));
}

template <typename F>
ResidueRecord<F> oper_residues(const Oper<F>& o, const F& x) {
  if (o.v.empty()) throw Error("oper has no coefficients");
  ResidueRecord<F> r;
  for (const auto& vk : o.v) {
    const long ord = vk.pole_order(x);
    std::vector<F> pp;
    for (long m = ord; m >= 1; --m) pp.push_back(vk.principal_coeff(x, m));
    r.principal.push_back(std::move(pp));
  }
  r.c = -o.v[0].principal_coeff(x, 2);
  r.mu = -o.v[0].residue(x);
  return r;
}

template <typename F>
ResidueRecord<F> oper_residues_at_infinity(const Oper<F>& o) {
  Oper<F> pulled;
  pulled.rank = o.rank;
  const Mobius<F> inv = Mobius<F>::inversion();
  for (std::size_t i = 0; i < o.v.size(); ++i)
    pulled.v.push_back(mobius_pullback(o.v[i], inv, static_cast<long>(i) + 2));
  return oper_residues(pulled, F(0));
}

template <typename F>
RegularityReport<F> regularity_check(const Oper<F>& o, const F& x, double tol) {
  RegularityReport<F> rep;
  for (const auto& vk : o.v) {
    const long ord = vk.pole_order(x);
    std::vector<F> pp;
    for (long m = ord; m >= 1; --m) {
      const F cm = vk.principal_coeff(x, m);
      const double mag = FieldTraits<F>::magnitude(cm);
      rep.worst = std::max(rep.worst, mag);
      if constexpr (FieldTraits<F>::is_exact) {
        if (!(cm == F(0))) rep.regular = false;
      } else {
        if (mag > tol) rep.regular = false;
      }
      pp.push_back(cm);
    }
    rep.singular.push_back(std::move(pp));
  }
  return rep;
}

template <typename F>
F frobenius_obstruction(const Oper<F>& o, const F& x, int lambda) {
  if (o.rank != 2) throw Error("frobenius_obstruction handles rank two only");
  if (lambda < 0) throw Error("frobenius_obstruction: negative exponent parameter");
  const RationalFunction<F> q = -o.v[0];
  if (q.pole_order(x) > 2)
    throw Error("frobenius_obstruction: pole order exceeds two at the expansion point");
  const F c2 = q.principal_coeff(x, 2);
  const F expect = FieldTraits<F>::from_rat(Rat(lambda) * Rat(lambda + 2) / Rat(4));
  bool exponent_ok;
  if constexpr (FieldTraits<F>::is_exact)
    exponent_ok = (c2 == expect);
  else
    exponent_ok = FieldTraits<F>::magnitude(c2 - expect) <=
                  1e-8 * std::max(1.0, FieldTraits<F>::magnitude(expect));
  if (!exponent_ok)
    throw Error("frobenius_obstruction: double pole does not match the exponent parameter");

  // Power series y = tau^(-lambda/2) sum_k a_k tau^k in y'' = q y; the
  // indicial factor K(K - lambda - 1) vanishes first at K = lambda + 1 and
  // the unresolvable right-hand side there is the returned obstruction.
  const auto series = q.laurent(x, lambda - 1);
  std::vector<F> a(static_cast<std::size_t>(lambda) + 1, F(0));
  a[0] = F(1);
  for (int k = 1; k <= lambda; ++k) {
    F rhs(0);
    for (int j = 0; j < k; ++j) rhs = rhs + series.at(k - 2 - j) * a[j];
    a[k] = rhs / (F(k) * F(k - lambda - 1));
  }
  F obstruction(0);
  for (int j = 0; j <= lambda; ++j) obstruction = obstruction + series.at(lambda - 1 - j) * a[j];
  return obstruction;
}

template <typename F>
RationalFunction<F> transform_projective_connection(const RationalFunction<F>& v,
                                                    const Mobius<F>& phi) {
  return mobius_pullback(v, phi, 2);
}

template <typename F>
EigenvaluePrediction<F> predicted_eigenvalues(const GaudinProblem<F>& p,
                                              const BetheSolution<F>& s, double kappa_pair) {
  EigenvaluePrediction<F> out;
  const Oper<F> o = miura_oper(p, s);
  for (const auto& z : p.points) out.miura.push_back(-o.v[0].residue(z));
  if (p.rd.rank == 1) {
    const F kappa = FieldTraits<F>::from_rat(Rat(kappa_pair));
    for (int i = 0; i < p.sites(); ++i) {
      const F li = FieldTraits<F>::from_rat(p.weights[i][0]);
      F acc(0);
      for (int j = 0; j < p.sites(); ++j) {
        if (j == i) continue;
        const F lj = FieldTraits<F>::from_rat(p.weights[j][0]);
        acc = acc + kappa * li * lj / (p.points[i] - p.points[j]);
      }
      for (const auto& w : s.w) acc = acc - li / (p.points[i] - w);
      out.closed_form.push_back(acc);
    }
  }
  return out;
}

double fit_kappa_pair() {
  // Two spin-1/2 sites pin the cross-term constant: the simultaneous
  // spectrum gives the singlet eigenvalue and the one-point Bethe root
  // supplies the pole sum, leaving kappa as the only unknown.
  GaudinProblem<Rat> p;
  p.rd = RootData::type_a(1);
  p.points = {Rat(0), Rat(1)};
  p.weights = {p.rd.fundamental_weight(0), p.rd.fundamental_weight(0)};
  const TensorRep t = tensor_irreducibles(p.rd, p.weights);
  const SpectrumRecord rec = joint_spectrum(p, t, Weight::zero(1));
  if (rec.entries.size() != 1) throw Error("fit_kappa_pair: unexpected singlet multiplicity");
  const Cplx theta = rec.entries[0].values[0];

  const SolveResult sr = solve_bae(complexify(p), ColorAssignment{0});
  if (sr.solutions.size() != 1) throw Error("fit_kappa_pair: unexpected Bethe count");
  const Cplx w = sr.solutions[0].w[0];

  const Cplx z1(0.0), z2(1.0);
  const Cplx kappa = (theta + Cplx(1) / (z1 - w)) * (z1 - z2);
  return kappa.real();
}

template CartanConnection<Rat> cartan_connection(const GaudinProblem<Rat>&,
                                                 const BetheSolution<Rat>&);
template CartanConnection<Cplx> cartan_connection(const GaudinProblem<Cplx>&,
                                                  const BetheSolution<Cplx>&);
template std::vector<RationalFunction<Rat>> connection_components(const CartanConnection<Rat>&);
template std::vector<RationalFunction<Cplx>> connection_components(const CartanConnection<Cplx>&);
template Oper<Rat> miura_sln(const std::vector<RationalFunction<Rat>>&);
template Oper<Cplx> miura_sln(const std::vector<RationalFunction<Cplx>>&);
template Oper<Rat> miura_sl2(const RationalFunction<Rat>&);
template Oper<Cplx> miura_sl2(const RationalFunction<Cplx>&);
template Oper<Rat> miura_oper(const GaudinProblem<Rat>&, const BetheSolution<Rat>&);
template Oper<Cplx> miura_oper(const GaudinProblem<Cplx>&, const BetheSolution<Cplx>&);
template ResidueRecord<Rat> oper_residues(const Oper<Rat>&, const Rat&);
template ResidueRecord<Cplx> oper_residues(const Oper<Cplx>&, const Cplx&);
template ResidueRecord<Rat> oper_residues_at_infinity(const Oper<Rat>&);
template ResidueRecord<Cplx> oper_residues_at_infinity(const Oper<Cplx>&);
template RegularityReport<Rat> regularity_check(const Oper<Rat>&, const Rat&, double);
template RegularityReport<Cplx> regularity_check(const Oper<Cplx>&, const Cplx&, double);
template Rat frobenius_obstruction(const Oper<Rat>&, const Rat&, int);
template Cplx frobenius_obstruction(const Oper<Cplx>&, const Cplx&, int);
template RationalFunction<Rat> transform_projective_connection(const RationalFunction<Rat>&,
                                                               const Mobius<Rat>&);
template RationalFunction<Cplx> transform_projective_connection(const RationalFunction<Cplx>&,
                                                                const Mobius<Cplx>&);
template EigenvaluePrediction<Rat> predicted_eigenvalues(const GaudinProblem<Rat>&,
                                                         const BetheSolution<Rat>&, double);
template EigenvaluePrediction<Cplx> predicted_eigenvalues(const GaudinProblem<Cplx>&,
                                                          const BetheSolution<Cplx>&, double);

}  // namespace gaudin
