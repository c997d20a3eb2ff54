#include "gaudin/bethe.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <thread>

#include "gaudin/ratfun.hpp"

namespace gaudin {

namespace {

template <typename F>
void require_distinct_points(const GaudinProblem<F>& p, const std::vector<F>& w) {
  for (std::size_t j = 0; j < w.size(); ++j) {
    for (std::size_t i = 0; i < p.points.size(); ++i)
      if (points_coincide(w[j], p.points[i]))
        throw DegenerateInputError("w coincides with a marked point");
    for (std::size_t s = j + 1; s < w.size(); ++s)
      if (points_coincide(w[j], w[s]))
        throw DegenerateInputError("coincident Bethe parameters");
  }
}

void assert_close(const Rat& a, const Rat& b) {
  if (a != b) throw Error("bae residual cross-check failed");
}

void assert_close(const Cplx& a, const Cplx& b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  if (!(std::abs(a - b) <= 1e-9 * scale))
    throw Error("bae residual cross-check failed");
}

template <typename F>
void validate_colors(const GaudinProblem<F>& p, const ColorAssignment& colors) {
  for (int c : colors)
    if (c < 0 || c >= p.rd.rank)
      throw DegenerateInputError("color index outside the simple roots");
}

}  // namespace

template <typename F>
std::vector<F> bae_residual(const GaudinProblem<F>& p, const BetheSolution<F>& s) {
  validate_colors(p, s.colors);
  require_distinct_points(p, s.w);
  const std::size_t m = s.w.size();

  std::vector<F> r(m, F(0));
  for (std::size_t j = 0; j < m; ++j) {
    F acc(0);
    for (std::size_t i = 0; i < p.points.size(); ++i)
      acc = acc + FieldTraits<F>::from_rat(p.weights[i][s.colors[j]]) /
                      (s.w[j] - p.points[i]);
    for (std::size_t t = 0; t < m; ++t) {
      if (t == j) continue;
      acc = acc - FieldTraits<F>::from_rat(Rat(p.rd.cartan[s.colors[j]][s.colors[t]])) /
                      (s.w[j] - s.w[t]);
    }
    r[j] = acc;
  }

  // independent route: the constant expansion coefficient of the connection
  // at w_j, paired with the coroot of the attached color
  std::vector<RationalFunction<F>> comp(p.rd.rank);
  for (int c = 0; c < p.rd.rank; ++c) {
    RationalFunction<F> f;
    for (std::size_t i = 0; i < p.points.size(); ++i)
      f = f + RationalFunction<F>::simple_pole(p.points[i],
                                               FieldTraits<F>::from_rat(p.weights[i][c]));
    for (std::size_t t = 0; t < m; ++t) {
      const Rat a = p.rd.simple_root(s.colors[t])[c];
      f = f - RationalFunction<F>::simple_pole(s.w[t], FieldTraits<F>::from_rat(a));
    }
    comp[c] = std::move(f);
  }
  for (std::size_t j = 0; j < m; ++j) {
    const int cj = s.colors[j];
    auto reg = comp[cj] +
               RationalFunction<F>::simple_pole(s.w[j], FieldTraits<F>::from_int(2));
    assert_close(r[j], reg.evaluate(s.w[j]));
  }
  return r;
}

template <typename F>
Matrix<F> bae_jacobian(const GaudinProblem<F>& p, const BetheSolution<F>& s) {
  validate_colors(p, s.colors);
  require_distinct_points(p, s.w);
  const std::size_t m = s.w.size();
  Matrix<F> jac(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    F diag(0);
    for (std::size_t i = 0; i < p.points.size(); ++i) {
      const F d = s.w[j] - p.points[i];
      diag = diag - FieldTraits<F>::from_rat(p.weights[i][s.colors[j]]) / (d * d);
    }
    for (std::size_t t = 0; t < m; ++t) {
      if (t == j) continue;
      const F d = s.w[j] - s.w[t];
      const F a = FieldTraits<F>::from_rat(Rat(p.rd.cartan[s.colors[j]][s.colors[t]]));
      diag = diag + a / (d * d);
      jac(j, t) = -(a / (d * d));
    }
    jac(j, j) = diag;
  }
  return jac;
}

template <typename F>
Weight solution_weight(const GaudinProblem<F>& p, const ColorAssignment& colors) {
  validate_colors(p, colors);
  Weight mu = Weight::zero(p.rd.rank);
  for (const auto& lam : p.weights) mu = mu + lam;
  for (int c : colors) mu = mu - p.rd.simple_root(c);
  return mu;
}

template <typename F>
std::vector<F> bethe_vector(const GaudinProblem<F>& p, const BetheSolution<F>& s,
                            const TensorRep& t) {
  validate_colors(p, s.colors);
  require_distinct_points(p, s.w);
  const int m = static_cast<int>(s.w.size());
  const int n = t.sites();
  if (n != p.sites()) throw DegenerateInputError("tensor sites do not match problem");
  if (m > 8) throw CapExceededError("too many Bethe parameters for direct assembly");

  // exact operator words per site, keyed by the ordered index tuple
  std::vector<std::map<std::vector<int>, std::vector<Rat>>> words(n);
  std::function<const std::vector<Rat>&(int, const std::vector<int>&)> word_vec =
      [&](int site, const std::vector<int>& tuple) -> const std::vector<Rat>& {
    auto it = words[site].find(tuple);
    if (it != words[site].end()) return it->second;
    std::vector<Rat> v;
    if (tuple.empty()) {
      v.assign(t.factor(site).dim(), Rat(0));
      v[0] = 1;
    } else {
      std::vector<int> rest(tuple.begin() + 1, tuple.end());
      v = t.factor(site).lowering(s.colors[tuple.front()]).apply(word_vec(site, rest));
    }
    return words[site].emplace(tuple, std::move(v)).first->second;
  };

  std::vector<F> phi(t.dim(), F(0));
  std::vector<int> assign(m, 0);
  const long total = static_cast<long>(std::pow(static_cast<double>(n), m) + 0.5);
  for (long code = 0; code < total; ++code) {
    long rem = code;
    for (int q = 0; q < m; ++q) {
      assign[q] = static_cast<int>(rem % n);
      rem /= n;
    }
    // per-site accumulated vectors: sum over orderings of this site's indices
    std::vector<std::vector<F>> site_vec(n);
    bool dead = false;
    for (int j = 0; j < n && !dead; ++j) {
      std::vector<int> idx;
      for (int q = 0; q < m; ++q)
        if (assign[q] == j) idx.push_back(q);
      std::vector<F> acc(t.factor(j).dim(), F(0));
      if (idx.empty()) {
        acc[0] = FieldTraits<F>::from_int(1);
      } else {
        std::sort(idx.begin(), idx.end());
        do {
          F denom = FieldTraits<F>::from_int(1);
          for (std::size_t q = 0; q + 1 < idx.size(); ++q)
            denom = denom * (s.w[idx[q]] - s.w[idx[q + 1]]);
          denom = denom * (s.w[idx.back()] - p.points[j]);
          const auto& wv = word_vec(j, idx);
          for (std::size_t r = 0; r < wv.size(); ++r)
            if (wv[r] != 0) acc[r] = acc[r] + FieldTraits<F>::from_rat(wv[r]) / denom;
        } while (std::next_permutation(idx.begin(), idx.end()));
      }
      bool nonzero = false;
      for (const auto& x : acc)
        if (!FieldTraits<F>::is_zero(x, 0.0)) nonzero = true;
      if (!nonzero) dead = true;
      site_vec[j] = std::move(acc);
    }
    if (dead) continue;
    for (std::size_t state = 0; state < t.dim(); ++state) {
      F prod = FieldTraits<F>::from_int(1);
      for (int j = 0; j < n; ++j) {
        prod = prod * site_vec[j][t.factor_index(state, j)];
        if (FieldTraits<F>::is_zero(prod, 0.0)) break;
      }
      phi[state] = phi[state] + prod;
    }
  }
  if (m % 2 == 1)
    for (auto& x : phi) x = -x;
  return phi;
}

template <typename F>
void canonicalize_solution(BetheSolution<F>& s) {
  std::map<int, std::vector<std::size_t>> positions;
  for (std::size_t j = 0; j < s.colors.size(); ++j)
    positions[s.colors[j]].push_back(j);
  const ScalarLess<F> less;
  for (auto& [c, pos] : positions) {
    std::vector<F> vals;
    for (auto j : pos) vals.push_back(s.w[j]);
    std::sort(vals.begin(), vals.end(), less);
    for (std::size_t q = 0; q < pos.size(); ++q) s.w[pos[q]] = vals[q];
  }
}

namespace {

double max_norm(const std::vector<Cplx>& v) {
  double out = 0.0;
  for (const auto& x : v) out = std::max(out, std::abs(x));
  return out;
}

struct Candidate {
  std::vector<Cplx> w;
  double residual = 0.0;
};

std::optional<Candidate> newton_start(const GaudinProblem<Cplx>& p,
                                      const ColorAssignment& colors,
                                      const SolverConfig& cfg, std::uint64_t start) {
  const int m = static_cast<int>(colors.size());
  std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed), start};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  double zmax = 1.0;
  for (const auto& z : p.points) zmax = std::max(zmax, std::abs(z));
  const double radius = 2.0 * zmax;
  // the residual decays like <mu + alpha, coroot>/w at infinity, so an
  // escaping iterate eventually satisfies any tolerance; treat leaving the
  // search region as divergence instead
  const double escape = 1000.0 * zmax;

  BetheSolution<Cplx> s;
  s.colors = colors;
  s.w.resize(m);
  const bool midpoint_mode = (start % 4 == 0) && p.sites() >= 2;
  for (int j = 0; j < m; ++j) {
    if (midpoint_mode) {
      const int a = static_cast<int>(unif(rng) * p.sites()) % p.sites();
      int b = static_cast<int>(unif(rng) * p.sites()) % p.sites();
      if (b == a) b = (a + 1) % p.sites();
      const Cplx jitter(1e-3 * (unif(rng) - 0.5), 1e-3 * (unif(rng) - 0.5));
      s.w[j] = 0.5 * (p.points[a] + p.points[b]) + jitter;
    } else {
      const double rho = radius * std::sqrt(unif(rng));
      const double ang = 2.0 * 3.14159265358979323846 * unif(rng);
      s.w[j] = Cplx(rho * std::cos(ang), rho * std::sin(ang));
    }
  }

  try {
    std::vector<Cplx> r = bae_residual(p, s);
    double rn = max_norm(r);
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
      for (const auto& w : s.w)
        if (std::abs(w) > escape) return std::nullopt;
      if (rn < cfg.tol) {
        Candidate c;
        c.w = s.w;
        c.residual = rn;
        return c;
      }
      const Matrix<Cplx> jm = bae_jacobian(p, s);
      Eigen::MatrixXcd j(m, m);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) j(a, b) = jm(a, b);
      Eigen::VectorXcd rv(m);
      for (int a = 0; a < m; ++a) rv(a) = r[a];
      Eigen::FullPivLU<Eigen::MatrixXcd> lu(j);
      if (!lu.isInvertible()) return std::nullopt;
      const Eigen::VectorXcd step = lu.solve(rv);

      bool accepted = false;
      double alpha = 1.0;
      for (int half = 0; half <= 20; ++half, alpha *= 0.5) {
        BetheSolution<Cplx> trial = s;
        for (int a = 0; a < m; ++a) trial.w[a] = s.w[a] - alpha * step(a);
        try {
          std::vector<Cplx> rt = bae_residual(p, trial);
          const double rtn = max_norm(rt);
          if (rtn < rn && std::isfinite(rtn)) {
            s = std::move(trial);
            r = std::move(rt);
            rn = rtn;
            accepted = true;
            break;
          }
        } catch (const Error&) {
          // trial hit a pole; damp further
        }
      }
      if (!accepted) return std::nullopt;
    }
    bool inside = true;
    for (const auto& w : s.w)
      if (std::abs(w) > escape) inside = false;
    if (rn < cfg.tol && inside) {
      Candidate c;
      c.w = s.w;
      c.residual = rn;
      return c;
    }
  } catch (const Error&) {
    // start began on a pole or the evaluation degenerated
  }
  return std::nullopt;
}

}  // namespace

SolveResult solve_bae(const GaudinProblem<Cplx>& p, const ColorAssignment& colors,
                      const SolverConfig& cfg) {
  p.validate();
  validate_colors(p, colors);
  SolveResult out;
  const int m = static_cast<int>(colors.size());
  if (m == 0) {
    BetheSolution<Cplx> empty;
    out.solutions.push_back(std::move(empty));
    return out;
  }

  const int starts = cfg.starts > 0 ? cfg.starts : 64 * m;
  std::vector<std::optional<Candidate>> slots(starts);
  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    for (int k = 0; k < starts; ++k)
      slots[k] = newton_start(p, colors, cfg, static_cast<std::uint64_t>(k));
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int k = next.fetch_add(1);
        if (k >= starts) return;
        slots[k] = newton_start(p, colors, cfg, static_cast<std::uint64_t>(k));
      }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // gather in start order, canonicalize, cluster by single linkage
  std::vector<BetheSolution<Cplx>> found;
  for (int k = 0; k < starts; ++k) {
    if (!slots[k]) continue;
    BetheSolution<Cplx> s;
    s.w = slots[k]->w;
    s.colors = colors;
    s.residual = slots[k]->residual;
    canonicalize_solution(s);
    found.push_back(std::move(s));
    ++out.converged_starts;
  }

  const std::size_t nf = found.size();
  std::vector<std::size_t> parent(nf);
  for (std::size_t i = 0; i < nf; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < nf; ++a)
    for (std::size_t b = a + 1; b < nf; ++b) {
      double d = 0.0;
      for (int j = 0; j < m; ++j)
        d = std::max(d, std::abs(found[a].w[j] - found[b].w[j]));
      if (d < cfg.dedup) parent[find(a)] = find(b);
    }
  std::map<std::size_t, std::size_t> best;  // cluster root -> index of best member
  for (std::size_t i = 0; i < nf; ++i) {
    const std::size_t root = find(i);
    auto it = best.find(root);
    if (it == best.end() || found[i].residual < found[it->second].residual)
      best[root] = i;
  }

  std::vector<BetheSolution<Cplx>> reps;
  for (const auto& [root, idx] : best) reps.push_back(found[idx]);
  std::sort(reps.begin(), reps.end(),
            [](const BetheSolution<Cplx>& a, const BetheSolution<Cplx>& b) {
              const ScalarLess<Cplx> less;
              for (std::size_t j = 0; j < a.w.size(); ++j) {
                if (less(a.w[j], b.w[j])) return true;
                if (less(b.w[j], a.w[j])) return false;
              }
              return false;
            });

  for (auto& s : reps) {
    const Matrix<Cplx> jm = bae_jacobian(p, s);
    Eigen::MatrixXcd j(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) j(a, b) = jm(a, b);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(j);
    const double smin = svd.singularValues()(m - 1);
    const double smax = svd.singularValues()(0);
    s.jacobian_condition = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
    s.possibly_degenerate = !(s.jacobian_condition < 1e8);

    bool collision = false;
    for (int a = 0; a < m && !collision; ++a) {
      for (const auto& z : p.points)
        if (std::abs(s.w[a] - z) < cfg.collision) collision = true;
      for (int b = 0; b < m; ++b)
        if (b != a && colors[a] == colors[b] &&
            std::abs(s.w[a] - s.w[b]) < cfg.collision)
          collision = true;
    }
    if (collision)
      out.collisions.push_back(s);
    else
      out.solutions.push_back(s);
  }
  return out;
}

template std::vector<Rat> bae_residual<Rat>(const GaudinProblem<Rat>&,
                                            const BetheSolution<Rat>&);
template std::vector<Cplx> bae_residual<Cplx>(const GaudinProblem<Cplx>&,
                                              const BetheSolution<Cplx>&);
template Matrix<Rat> bae_jacobian<Rat>(const GaudinProblem<Rat>&,
                                       const BetheSolution<Rat>&);
template Matrix<Cplx> bae_jacobian<Cplx>(const GaudinProblem<Cplx>&,
                                         const BetheSolution<Cplx>&);
template Weight solution_weight<Rat>(const GaudinProblem<Rat>&, const ColorAssignment&);
template Weight solution_weight<Cplx>(const GaudinProblem<Cplx>&,
                                      const ColorAssignment&);
template std::vector<Rat> bethe_vector<Rat>(const GaudinProblem<Rat>&,
                                            const BetheSolution<Rat>&,
                                            const TensorRep&);
template std::vector<Cplx> bethe_vector<Cplx>(const GaudinProblem<Cplx>&,
                                              const BetheSolution<Cplx>&,
                                              const TensorRep&);
template void canonicalize_solution<Rat>(BetheSolution<Rat>&);
template void canonicalize_solution<Cplx>(BetheSolution<Cplx>&);

}  // namespace gaudin
