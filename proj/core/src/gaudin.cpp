#include "gaudin/gaudin.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cassert>
#include <random>

namespace gaudin {

namespace {

Cplx to_complex(const Rat& x) { return Cplx(rat_to_double(x), 0.0); }
Cplx to_complex(const Cplx& x) { return x; }

Eigen::MatrixXcd dense_complex(const Matrix<Rat>& m) {
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = to_complex(m(r, c));
  return out;
}

std::vector<InvariantForm> site_forms(const RootData& rd, const TensorRep& t) {
  std::vector<InvariantForm> forms;
  forms.reserve(t.sites());
  for (int s = 0; s < t.sites(); ++s)
    forms.push_back(InvariantForm::trace_form(rd, t.factor(s)));
  return forms;
}

SparseMat<Rat> pair_operator_from(const TensorRep& t,
                                  const std::vector<InvariantForm>& forms, int i,
                                  int j) {
  SparseMat<Rat> acc(t.dim(), t.dim());
  for (std::size_t a = 0; a < forms[i].size(); ++a)
    acc = acc + t.site_matrix(i, forms[i].basis[a]) *
                    t.site_matrix(j, forms[j].dual[a]);
  return acc;
}

}  // namespace

InvariantForm InvariantForm::trace_form(const RootData& rd, const Representation& rep) {
  InvariantForm form;
  const int P = rep.positive_root_count();
  for (int k = 0; k < P; ++k) {
    form.basis.push_back(rep.basis_matrix(rep.e_id(k)));
    form.dual.push_back(rep.basis_matrix(rep.f_id(k)));
  }
  for (int k = 0; k < P; ++k) {
    form.basis.push_back(rep.basis_matrix(rep.f_id(k)));
    form.dual.push_back(rep.basis_matrix(rep.e_id(k)));
  }
  for (int i = 0; i < rd.rank; ++i) {
    form.basis.push_back(rep.cartan(i));
    SparseMat<Rat> dual(rep.dim(), rep.dim());
    for (int j = 0; j < rd.rank; ++j) {
      const Rat c = rd.cartan_inv(i, j);
      if (c != 0) dual = dual + rep.cartan(j).scaled(c);
    }
    form.dual.push_back(std::move(dual));
  }
  return form;
}

SparseMat<Rat> casimir_matrix(const Representation& rep) {
  const RootData rd = RootData::type_a(rep.rank());
  const InvariantForm form = InvariantForm::trace_form(rd, rep);
  SparseMat<Rat> acc(rep.dim(), rep.dim());
  for (std::size_t a = 0; a < form.size(); ++a)
    acc = acc + form.basis[a] * form.dual[a];
  return acc.scaled(Rat(1, 2));
}

SparseMat<Rat> pair_operator(const RootData& rd, const TensorRep& t, int i, int j) {
  if (i == j || i < 0 || j < 0 || i >= t.sites() || j >= t.sites())
    throw Error("pair_operator: bad site indices");
  return pair_operator_from(t, site_forms(rd, t), i, j);
}

template <typename F>
SparseMat<F> gaudin_hamiltonian(const GaudinProblem<F>& p, const TensorRep& t, int i) {
  if (i < 0 || i >= p.sites()) throw Error("gaudin_hamiltonian: site out of range");
  const auto forms = site_forms(p.rd, t);
  SparseMat<F> acc(t.dim(), t.dim());
  for (int j = 0; j < p.sites(); ++j) {
    if (j == i) continue;
    const F coeff = FieldTraits<F>::from_int(1) / (p.points[i] - p.points[j]);
    acc = acc + pair_operator_from(t, forms, i, j).template cast<F>().scaled(coeff);
  }
  return acc;
}

template <typename F>
SparseMat<F> sugawara_generating(const GaudinProblem<F>& p, const TensorRep& t,
                                 const F& u) {
  for (const auto& z : p.points)
    if (points_coincide(u, z))
      throw DegenerateInputError("u coincides with a marked point");
  const auto forms = site_forms(p.rd, t);
  const std::size_t n_basis = forms.empty() ? 0 : forms[0].size();

  SparseMat<F> acc(t.dim(), t.dim());
  for (std::size_t a = 0; a < n_basis; ++a) {
    SparseMat<F> m_dual(t.dim(), t.dim()), m_basis(t.dim(), t.dim());
    for (int i = 0; i < p.sites(); ++i) {
      const F coeff = FieldTraits<F>::from_int(1) / (u - p.points[i]);
      m_dual = m_dual + t.site_matrix(i, forms[i].dual[a]).template cast<F>().scaled(coeff);
      m_basis =
          m_basis + t.site_matrix(i, forms[i].basis[a]).template cast<F>().scaled(coeff);
    }
    acc = acc + m_dual * m_basis;
  }
  return acc.scaled(FieldTraits<F>::from_rat(Rat(1, 2)));
}

template <typename F>
SpectrumRecord joint_spectrum(const GaudinProblem<F>& p, const TensorRep& t,
                              const Weight& mu, std::uint64_t seed, std::size_t cap) {
  SpectrumRecord rec;
  const auto sing = singular_space(t, mu);
  rec.singular_dim = sing.size();
  if (sing.empty()) return rec;
  if (sing.size() > cap)
    throw CapExceededError("singular space dimension exceeds the spectrum cap");

  const std::size_t dim = t.dim();
  const std::size_t k = sing.size();
  const int n = p.sites();

  Matrix<Rat> b(dim, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t r = 0; r < dim; ++r) b(r, j) = sing[j][r];

  // pivot rows: a k-subset of rows on which the basis matrix is invertible
  Matrix<Rat> bt = b.transpose();
  const auto pivot_rows = rref(bt);
  assert(pivot_rows.size() == k);
  Matrix<Rat> b_rows(k, k);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) b_rows(r, c) = b(pivot_rows[r], c);

  // exact restriction of each pair operator; asserts the singular space is
  // invariant, which is the g-invariance of the Hamiltonians in disguise
  const auto forms = site_forms(p.rd, t);
  std::map<std::pair<int, int>, Matrix<Rat>> restricted;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const SparseMat<Rat> om = pair_operator_from(t, forms, i, j);
      Matrix<Rat> image(dim, k);
      for (std::size_t c = 0; c < k; ++c) {
        std::vector<Rat> col(dim);
        for (std::size_t r = 0; r < dim; ++r) col[r] = b(r, c);
        const auto y = om.apply(col);
        for (std::size_t r = 0; r < dim; ++r) image(r, c) = y[r];
      }
      Matrix<Rat> image_rows(k, k);
      for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c) image_rows(r, c) = image(pivot_rows[r], c);
      Matrix<Rat> y = solve_exact(b_rows, image_rows);
      if (!(b * y == image))
        throw Error("singular space is not invariant under a pair operator");
      restricted.emplace(std::make_pair(i, j), std::move(y));
    }
  }

  std::vector<Eigen::MatrixXcd> xc(n, Eigen::MatrixXcd::Zero(k, k));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto& y = restricted.at({std::min(i, j), std::max(i, j)});
      const Cplx coeff = Cplx(1.0) / (to_complex(p.points[i]) - to_complex(p.points[j]));
      xc[i] += coeff * dense_complex(y);
    }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(1.0, 2.0);
  const double resid_tol = 1e-8;

  auto attempt = [&]() {
    Eigen::MatrixXcd combo = Eigen::MatrixXcd::Zero(k, k);
    for (int i = 0; i < n; ++i) combo += unif(rng) * xc[i];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(combo);
    std::vector<JointEigenvalue> entries;
    double worst = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      Eigen::VectorXcd v = es.eigenvectors().col(c);
      JointEigenvalue je;
      for (int i = 0; i < n; ++i) {
        const Cplx theta = (v.adjoint() * xc[i] * v)(0, 0) / v.squaredNorm();
        const double resid = (xc[i] * v - theta * v).norm() / v.norm();
        je.values.push_back(theta);
        je.residuals.push_back(resid);
        worst = std::max(worst, resid);
      }
      Eigen::VectorXcd w = Eigen::VectorXcd::Zero(dim);
      for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t cc = 0; cc < k; ++cc) w(r) += to_complex(b(r, cc)) * v(cc);
      // normalize by the first component of maximal magnitude
      std::size_t imax = 0;
      for (std::size_t r = 1; r < dim; ++r)
        if (std::abs(w(r)) > std::abs(w(imax))) imax = r;
      if (std::abs(w(imax)) > 0) w /= w(imax);
      je.vector.assign(w.data(), w.data() + dim);
      entries.push_back(std::move(je));
    }
    return std::make_pair(std::move(entries), worst);
  };

  auto [entries, worst] = attempt();
  if (worst > resid_tol) {
    rec.retried = true;
    auto [entries2, worst2] = attempt();
    if (worst2 < worst) {
      entries = std::move(entries2);
      worst = worst2;
    }
    if (worst > resid_tol) rec.possibly_degenerate = true;
  }

  std::sort(entries.begin(), entries.end(),
            [](const JointEigenvalue& a, const JointEigenvalue& b) {
              for (std::size_t i = 0; i < a.values.size(); ++i) {
                const ScalarLess<Cplx> less;
                if (less(a.values[i], b.values[i])) return true;
                if (less(b.values[i], a.values[i])) return false;
              }
              return false;
            });
  rec.entries = std::move(entries);
  return rec;
}

template SparseMat<Rat> gaudin_hamiltonian<Rat>(const GaudinProblem<Rat>&,
                                                const TensorRep&, int);
template SparseMat<Cplx> gaudin_hamiltonian<Cplx>(const GaudinProblem<Cplx>&,
                                                  const TensorRep&, int);
template SparseMat<Rat> sugawara_generating<Rat>(const GaudinProblem<Rat>&,
                                                 const TensorRep&, const Rat&);
template SparseMat<Cplx> sugawara_generating<Cplx>(const GaudinProblem<Cplx>&,
                                                   const TensorRep&, const Cplx&);
template SpectrumRecord joint_spectrum<Rat>(const GaudinProblem<Rat>&, const TensorRep&,
                                            const Weight&, std::uint64_t, std::size_t);
template SpectrumRecord joint_spectrum<Cplx>(const GaudinProblem<Cplx>&,
                                             const TensorRep&, const Weight&,
                                             std::uint64_t, std::size_t);

}  // namespace gaudin
