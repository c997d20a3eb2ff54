#include "gaudin/repmod.hpp"

#include <algorithm>
#include <cassert>
#include <utility>

namespace gaudin {

namespace {

// Type A Chevalley basis realized through matrix units of gl_n:
//   e_(p,q) = E_{p,q+1},  f_(p,q) = E_{q+1,p},  h_i = E_{ii} - E_{i+1,i+1}
// (0-based, root alpha_p + ... + alpha_q).  All structure constants are
// integers obtained by commuting the matrix units.
struct Chevalley {
  struct Root {
    int p, q;
    int height() const { return q - p + 1; }
  };

  int rank, n, P;
  std::vector<Root> roots;                      // sorted by (height, p)
  std::vector<std::vector<int>> root_index_;    // [p][q] -> index
  // bracket_[x][y]: [x, y] as integer combination of basis elements
  std::vector<std::vector<std::vector<std::pair<int, long>>>> bracket_;

  explicit Chevalley(int rank_in) : rank(rank_in), n(rank_in + 1) {
    for (int h = 1; h <= rank; ++h)
      for (int p = 0; p + h - 1 < rank; ++p) roots.push_back({p, p + h - 1});
    P = static_cast<int>(roots.size());
    root_index_.assign(rank, std::vector<int>(rank, -1));
    for (int k = 0; k < P; ++k) root_index_[roots[k].p][roots[k].q] = k;
    build_table();
  }

  int e_id(int k) const { return k; }
  int f_id(int k) const { return P + k; }
  int h_id(int i) const { return 2 * P + i; }
  int total() const { return 2 * P + rank; }

  // n x n integer matrix of a basis element.
  std::vector<long> gl_matrix(int id) const {
    std::vector<long> m(n * n, 0);
    if (id < P) {
      m[roots[id].p * n + (roots[id].q + 1)] = 1;
    } else if (id < 2 * P) {
      const Root& r = roots[id - P];
      m[(r.q + 1) * n + r.p] = 1;
    } else {
      const int i = id - 2 * P;
      m[i * n + i] = 1;
      m[(i + 1) * n + (i + 1)] = -1;
    }
    return m;
  }

  void build_table() {
    bracket_.assign(total(), std::vector<std::vector<std::pair<int, long>>>(total()));
    std::vector<std::vector<long>> mats(total());
    for (int id = 0; id < total(); ++id) mats[id] = gl_matrix(id);
    for (int x = 0; x < total(); ++x) {
      for (int y = 0; y < total(); ++y) {
        std::vector<long> c(n * n, 0);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            long acc = 0;
            for (int k = 0; k < n; ++k)
              acc += mats[x][i * n + k] * mats[y][k * n + j] -
                     mats[y][i * n + k] * mats[x][k * n + j];
            c[i * n + j] = acc;
          }
        bracket_[x][y] = decompose(c);
      }
    }
  }

  std::vector<std::pair<int, long>> decompose(const std::vector<long>& m) const {
    std::vector<std::pair<int, long>> out;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j || m[i * n + j] == 0) continue;
        const int id = (i < j) ? e_id(root_index_[i][j - 1]) : f_id(root_index_[j][i - 1]);
        out.emplace_back(id, m[i * n + j]);
      }
    // diagonal part: sum_i c_i h_i with c_i the partial sums of the diagonal
    long partial = 0;
    for (int i = 0; i < rank; ++i) {
      partial += m[i * n + i];
      if (partial != 0) out.emplace_back(h_id(i), partial);
    }
    return out;
  }

  const std::vector<std::pair<int, long>>& bracket(int x, int y) const {
    return bracket_[x][y];
  }
};

using Monomial = std::vector<unsigned char>;
using Combo = std::map<Monomial, Rat>;

void combo_add(Combo& dst, const Monomial& m, const Rat& c) {
  if (c == 0) return;
  auto [it, fresh] = dst.emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) dst.erase(it);
  }
}

// Straightening engine: applies Chevalley basis elements to PBW monomials in
// the negative root vectors, truncating at the configured root height.
struct Engine {
  const Chevalley& ch;
  const Weight lambda;
  const std::vector<Rat> coroot_pairings;  // <lambda, alpha_i-check>
  const int depth;
  std::map<std::pair<int, Monomial>, Combo> memo;

  Engine(const Chevalley& c, const Weight& lam, int d)
      : ch(c), lambda(lam), coroot_pairings(lam.coords()), depth(d) {}

  int height_of(const Monomial& m) const {
    int h = 0;
    for (int k = 0; k < ch.P; ++k) h += m[k] * ch.roots[k].height();
    return h;
  }

  int first_factor(const Monomial& m) const {
    for (int k = 0; k < ch.P; ++k)
      if (m[k] > 0) return k;
    return -1;
  }

  const Combo& apply(int id, const Monomial& m) {
    const auto key = std::make_pair(id, m);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Combo out = compute(id, m);
    return memo.emplace(std::move(key), std::move(out)).first->second;
  }

  Combo compute(int id, const Monomial& m) {
    Combo out;
    const int k0 = first_factor(m);
    if (k0 < 0) {
      // acting on the highest vector
      if (id >= ch.P && id < 2 * ch.P) {
        const int k = id - ch.P;
        if (ch.roots[k].height() <= depth) {
          Monomial one(ch.P, 0);
          one[k] = 1;
          combo_add(out, one, Rat(1));
        }
      } else if (id >= 2 * ch.P) {
        combo_add(out, m, coroot_pairings[id - 2 * ch.P]);
      }
      return out;
    }
    if (id >= ch.P && id < 2 * ch.P && id - ch.P <= k0) {
      // f_k with k <= first factor: already normal ordered
      const int k = id - ch.P;
      if (height_of(m) + ch.roots[k].height() <= depth) {
        Monomial inc = m;
        ++inc[k];
        combo_add(out, inc, Rat(1));
      }
      return out;
    }
    // X f_{k0} m' = f_{k0} (X m') + [X, f_{k0}] m'
    Monomial rest = m;
    --rest[k0];
    const Combo& inner = apply(id, rest);
    for (const auto& [mm, c] : inner) {
      const Combo& shifted = apply(ch.f_id(k0), mm);
      for (const auto& [mm2, c2] : shifted) combo_add(out, mm2, c * c2);
    }
    for (const auto& [id2, coeff] : ch.bracket(id, ch.f_id(k0))) {
      const Combo& term = apply(id2, rest);
      for (const auto& [mm, c] : term) combo_add(out, mm, c * Rat(coeff));
    }
    return out;
  }
};

void enumerate_monomials(const Chevalley& ch, int k, int budget, Monomial& cur,
                         std::vector<Monomial>& out, std::size_t cap) {
  if (k == ch.P) {
    out.push_back(cur);
    if (out.size() > cap) throw CapExceededError("truncated Verma module too large");
    return;
  }
  const int h = ch.roots[k].height();
  for (int a = 0; a * h <= budget; ++a) {
    cur[k] = static_cast<unsigned char>(a);
    enumerate_monomials(ch, k + 1, budget - a * h, cur, out, cap);
  }
  cur[k] = 0;
}

Weight monomial_weight(const Chevalley& ch, const RootData& rd, const Weight& lambda,
                       const Monomial& m) {
  Weight w = lambda;
  for (int k = 0; k < ch.P; ++k) {
    if (m[k] == 0) continue;
    Weight beta = Weight::zero(rd.rank);
    for (int i = ch.roots[k].p; i <= ch.roots[k].q; ++i) beta = beta + rd.simple_root(i);
    w = w - beta * Rat(static_cast<int>(m[k]));
  }
  return w;
}

}  // namespace

SparseMat<Rat> Representation::cartan(int i) const {
  SparseMat<Rat> h(dim(), dim());
  for (std::size_t s = 0; s < dim(); ++s) {
    const Rat v = weights_[s][i];
    if (v != 0) h.add_entry(s, s, v);
  }
  return h;
}

const SparseMat<Rat>& Representation::basis_matrix(int id) const {
  auto it = basis_cache_.find(id);
  if (it != basis_cache_.end()) return it->second;

  const int P = positive_root_count();
  SparseMat<Rat> m;
  if (id >= 2 * P) {
    m = cartan(id - 2 * P);
  } else {
    const int k = (id < P) ? id : id - P;
    const bool is_e = id < P;
    if (root_heights_[k] == 1) {
      m = is_e ? e_[k] : f_[k];
    } else {
      // e_(p,q) = [e_p, e_(p+1,q)], f_(p,q) = [f_q, f_(p,q-1)].
      // Roots are enumerated by (height, p), so (p, q) is recoverable from k.
      int p = -1, q = -1;
      {
        int idx = 0;
        for (int hh = 1; hh <= rank_ && p < 0; ++hh)
          for (int pp = 0; pp + hh - 1 < rank_ && p < 0; ++pp, ++idx)
            if (idx == k) {
              p = pp;
              q = pp + hh - 1;
            }
      }
      auto find_root = [&](int pp, int qq) {
        int idx = 0;
        for (int hh = 1; hh <= rank_; ++hh)
          for (int p2 = 0; p2 + hh - 1 < rank_; ++p2, ++idx)
            if (p2 == pp && p2 + hh - 1 == qq) return idx;
        throw Error("root lookup failed");
      };
      if (is_e) {
        const auto& a = basis_matrix(e_id(find_root(p, p)));
        const auto& b = basis_matrix(e_id(find_root(p + 1, q)));
        m = commutator(a, b);
      } else {
        const auto& a = basis_matrix(f_id(find_root(q, q)));
        const auto& b = basis_matrix(f_id(find_root(p, q - 1)));
        m = commutator(a, b);
      }
    }
  }
  return basis_cache_.emplace(id, std::move(m)).first->second;
}

Representation verma_rep(const RootData& rd, const Weight& lambda, int depth,
                         std::size_t state_cap) {
  if (!lambda.is_integral())
    throw DegenerateInputError("verma_rep expects an integral highest weight");
  const Chevalley ch(rd.rank);

  std::vector<Monomial> basis;
  Monomial cur(ch.P, 0);
  enumerate_monomials(ch, 0, depth, cur, basis, state_cap);
  Engine eng(ch, lambda, depth);
  std::sort(basis.begin(), basis.end(), [&](const Monomial& a, const Monomial& b) {
    const int ha = eng.height_of(a), hb = eng.height_of(b);
    if (ha != hb) return ha < hb;
    return a < b;
  });
  std::map<Monomial, std::size_t> index;
  for (std::size_t s = 0; s < basis.size(); ++s) index[basis[s]] = s;

  Representation rep;
  rep.rank_ = rd.rank;
  rep.kind_ = Representation::Kind::VermaTruncated;
  rep.depth_ = depth;
  rep.lambda_ = lambda;
  rep.labels_ = basis;
  for (const auto& m : basis) rep.weights_.push_back(monomial_weight(ch, rd, lambda, m));
  for (int k = 0; k < ch.P; ++k) {
    Weight beta = Weight::zero(rd.rank);
    for (int i = ch.roots[k].p; i <= ch.roots[k].q; ++i) beta = beta + rd.simple_root(i);
    rep.root_weights_.push_back(beta);
    rep.root_heights_.push_back(ch.roots[k].height());
  }

  const std::size_t d = basis.size();
  for (int i = 0; i < rd.rank; ++i) {
    SparseMat<Rat> e(d, d), f(d, d);
    for (std::size_t s = 0; s < d; ++s) {
      for (const auto& [mm, c] : eng.apply(ch.e_id(i), basis[s])) {
        auto it = index.find(mm);
        assert(it != index.end());
        e.add_entry(it->second, s, c);
      }
      for (const auto& [mm, c] : eng.apply(ch.f_id(i), basis[s])) {
        auto it = index.find(mm);
        if (it == index.end()) continue;  // beyond the truncation depth
        f.add_entry(it->second, s, c);
      }
    }
    rep.e_.push_back(std::move(e));
    rep.f_.push_back(std::move(f));
  }
  return rep;
}

Rat weyl_dimension(const RootData& rd, const Weight& lambda) {
  if (!lambda.is_dominant_integral())
    throw DegenerateInputError("weyl_dimension expects a dominant integral weight");
  Rat dim(1);
  for (int p = 0; p < rd.rank; ++p) {
    for (int q = p; q < rd.rank; ++q) {
      Rat num(0);
      for (int i = p; i <= q; ++i) num += lambda[i] + 1;
      dim *= num / Rat(q - p + 1);
    }
  }
  return dim;
}

Matrix<Rat> shapovalov_gram(const Representation& rep, const Weight& mu) {
  std::vector<std::size_t> states;
  for (std::size_t s = 0; s < rep.dim(); ++s)
    if (rep.weight_of(s) == mu) states.push_back(s);
  const std::size_t d = states.size();
  const int P = rep.positive_root_count();

  Matrix<Rat> gram(d, d);
  for (std::size_t b = 0; b < d; ++b) {
    for (std::size_t a = 0; a < d; ++a) {
      // <f^A v, f^B v> = coefficient of v in e_{k}^{A_k} ... (ascending k
      // applied first) acting on state b.
      std::vector<Rat> vec(rep.dim(), Rat(0));
      vec[states[b]] = 1;
      const auto& label = rep.pbw_label(states[a]);
      for (int k = 0; k < P; ++k)
        for (int rep_count = 0; rep_count < label[k]; ++rep_count)
          vec = rep.basis_matrix(rep.e_id(k)).apply(vec);
      gram(a, b) = vec[0];
    }
  }
  return gram;
}

Representation irreducible_rep(const RootData& rd, const Weight& lambda,
                               std::size_t dim_cap) {
  if (!lambda.is_dominant_integral())
    throw DegenerateInputError("irreducible_rep expects a dominant integral weight");
  const Rat dim_formula = weyl_dimension(rd, lambda);
  if (dim_formula > Rat(static_cast<long>(dim_cap)))
    throw CapExceededError("irreducible dimension " + rat_to_string(dim_formula) +
                           " exceeds cap");

  const Rat depth_rat = rd.height(lambda - weyl_apply(rd, weyl_longest(rd), lambda));
  const long depth = boost::multiprecision::numerator(depth_rat).convert_to<long>();
  Representation verma = verma_rep(rd, lambda, static_cast<int>(depth));

  // group Verma states by weight
  std::map<Weight, std::vector<std::size_t>> spaces;
  for (std::size_t s = 0; s < verma.dim(); ++s) spaces[verma.weight_of(s)].push_back(s);

  struct SpaceData {
    std::vector<std::size_t> verma_states;
    std::vector<std::size_t> representatives;  // subset of verma_states
    Matrix<Rat> projector;                     // quotient coords <- space coords
    std::vector<std::size_t> quotient_index;   // global index per representative
  };
  std::map<Weight, SpaceData> data;

  Representation rep;
  rep.rank_ = rd.rank;
  rep.kind_ = Representation::Kind::Irreducible;
  rep.depth_ = static_cast<int>(depth);
  rep.lambda_ = lambda;
  rep.root_weights_.assign(verma.root_weights_.begin(), verma.root_weights_.end());
  rep.root_heights_ = verma.root_heights_;

  // iterate Verma states in order so the quotient basis stays canonically
  // sorted by (height, label)
  std::vector<Weight> order;
  for (std::size_t s = 0; s < verma.dim(); ++s) {
    const Weight& mu = verma.weight_of(s);
    if (!data.count(mu)) order.push_back(mu);
    data[mu].verma_states = spaces[mu];
  }

  for (const Weight& mu : order) {
    SpaceData& sd = data[mu];
    const std::size_t d = sd.verma_states.size();
    Matrix<Rat> gram = shapovalov_gram(verma, mu);
    assert(gram.rows() == d);
    Matrix<Rat> reduced = gram;
    const auto pivots = rref(reduced);
    const Matrix<Rat> kernel = nullspace(gram);
    const std::size_t r = pivots.size();
    assert(r + kernel.cols() == d);

    // invertible [unit columns at pivots | kernel basis]; the projector is
    // the first r rows of its inverse
    Matrix<Rat> m(d, d);
    for (std::size_t j = 0; j < r; ++j) m(pivots[j], j) = 1;
    for (std::size_t j = 0; j < kernel.cols(); ++j)
      for (std::size_t i = 0; i < d; ++i) m(i, r + j) = kernel(i, j);
    const Matrix<Rat> minv = solve_exact(m, Matrix<Rat>::identity(d));
    sd.projector = Matrix<Rat>(r, d);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < d; ++j) sd.projector(i, j) = minv(i, j);

    for (std::size_t j = 0; j < r; ++j) {
      const std::size_t vs = sd.verma_states[pivots[j]];
      sd.representatives.push_back(vs);
      sd.quotient_index.push_back(rep.weights_.size());
      rep.weights_.push_back(mu);
      rep.labels_.push_back(verma.pbw_label(vs));
    }
  }

  if (Rat(static_cast<long>(rep.weights_.size())) != dim_formula)
    throw Error("irreducible quotient dimension disagrees with the Weyl formula");

  const std::size_t qdim = rep.weights_.size();
  auto project_image = [&](const std::vector<Rat>& image, const Weight& target,
                           SparseMat<Rat>& out, std::size_t col) {
    auto it = data.find(target);
    if (it == data.end()) return;  // weight space beyond the truncation
    const SpaceData& td = it->second;
    if (td.representatives.empty()) return;
    std::vector<Rat> local(td.verma_states.size(), Rat(0));
    for (std::size_t i = 0; i < td.verma_states.size(); ++i)
      local[i] = image[td.verma_states[i]];
    const auto q = td.projector.apply(local);
    for (std::size_t i = 0; i < q.size(); ++i)
      if (q[i] != 0) out.add_entry(td.quotient_index[i], col, q[i]);
  };

  for (int i = 0; i < rd.rank; ++i) {
    SparseMat<Rat> e(qdim, qdim), f(qdim, qdim);
    const Weight alpha = rd.simple_root(i);
    for (const Weight& mu : order) {
      const SpaceData& sd = data[mu];
      for (std::size_t j = 0; j < sd.representatives.size(); ++j) {
        std::vector<Rat> unit(verma.dim(), Rat(0));
        unit[sd.representatives[j]] = 1;
        project_image(verma.raising(i).apply(unit), mu + alpha, e,
                      sd.quotient_index[j]);
        project_image(verma.lowering(i).apply(unit), mu - alpha, f,
                      sd.quotient_index[j]);
      }
    }
    rep.e_.push_back(std::move(e));
    rep.f_.push_back(std::move(f));
  }
  return rep;
}

TensorRep::TensorRep(std::vector<std::shared_ptr<const Representation>> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty()) throw DegenerateInputError("tensor product needs >= 1 factor");
  for (const auto& f : factors_)
    if (f->rank() != factors_.front()->rank())
      throw DegenerateInputError("tensor factors over different root systems");
  strides_.assign(factors_.size(), 1);
  dim_ = 1;
  for (int i = static_cast<int>(factors_.size()) - 1; i >= 0; --i) {
    strides_[i] = dim_;
    dim_ *= factors_[i]->dim();
  }
}

Weight TensorRep::weight_of(std::size_t state) const {
  Weight w = Weight::zero(rank());
  for (int i = 0; i < sites(); ++i)
    w = w + factors_[i]->weight_of(factor_index(state, i));
  return w;
}

std::vector<std::size_t> TensorRep::weight_subspace(const Weight& mu) const {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < dim_; ++s)
    if (weight_of(s) == mu) out.push_back(s);
  return out;
}

SparseMat<Rat> TensorRep::site_matrix(int site, const SparseMat<Rat>& a) const {
  const std::size_t d = factors_[site]->dim();
  assert(a.rows() == d && a.cols() == d);
  SparseMat<Rat> out(dim_, dim_);
  const std::size_t stride = strides_[site];
  for (std::size_t r = 0; r < d; ++r) {
    for (const auto& [c, v] : a.row(r)) {
      // all full-space states whose site index equals c
      for (std::size_t s = 0; s < dim_; ++s) {
        if (factor_index(s, site) != c) continue;
        const std::size_t target = s + (r - c) * stride;
        out.add_entry(target, s, v);
      }
    }
  }
  return out;
}

TensorRep tensor_irreducibles(const RootData& rd, const std::vector<Weight>& lambdas,
                              std::size_t dim_cap) {
  std::vector<std::shared_ptr<const Representation>> factors;
  Rat total(1);
  for (const auto& lam : lambdas) {
    total *= weyl_dimension(rd, lam);
    if (total > Rat(static_cast<long>(dim_cap)))
      throw CapExceededError("tensor product dimension exceeds cap");
  }
  for (const auto& lam : lambdas)
    factors.push_back(std::make_shared<Representation>(irreducible_rep(rd, lam, dim_cap)));
  return TensorRep(std::move(factors));
}

std::vector<std::vector<Rat>> singular_space(const TensorRep& t, const Weight& mu) {
  const auto states = t.weight_subspace(mu);
  if (states.empty()) return {};
  const int rank = t.rank();

  // stack the raising operators restricted to the weight-mu subspace
  std::vector<Matrix<Rat>> blocks;
  std::size_t total_rows = 0;
  for (int i = 0; i < rank; ++i) {
    SparseMat<Rat> e_total(t.dim(), t.dim());
    for (int s = 0; s < t.sites(); ++s)
      e_total = e_total + t.site_matrix(s, t.factor(s).raising(i));
    std::map<std::size_t, std::size_t> row_of;
    Matrix<Rat> block(t.dim(), states.size());
    std::size_t used = 0;
    for (std::size_t col = 0; col < states.size(); ++col) {
      std::vector<Rat> unit(t.dim(), Rat(0));
      unit[states[col]] = 1;
      const auto img = e_total.apply(unit);
      for (std::size_t r = 0; r < img.size(); ++r) {
        if (img[r] == 0) continue;
        auto [it, fresh] = row_of.emplace(r, used);
        if (fresh) ++used;
        block(it->second, col) = img[r];
      }
    }
    Matrix<Rat> compact(used, states.size());
    for (std::size_t r = 0; r < used; ++r)
      for (std::size_t c = 0; c < states.size(); ++c) compact(r, c) = block(r, c);
    blocks.push_back(std::move(compact));
    total_rows += used;
  }

  Matrix<Rat> stacked(total_rows, states.size());
  std::size_t at = 0;
  for (const auto& b : blocks) {
    for (std::size_t r = 0; r < b.rows(); ++r)
      for (std::size_t c = 0; c < b.cols(); ++c) stacked(at + r, c) = b(r, c);
    at += b.rows();
  }

  const Matrix<Rat> null = nullspace(stacked);
  std::vector<std::vector<Rat>> out;
  for (std::size_t j = 0; j < null.cols(); ++j) {
    std::vector<Rat> v(t.dim(), Rat(0));
    for (std::size_t i = 0; i < states.size(); ++i) v[states[i]] = null(i, j);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace gaudin
