#include "gaudin/bethe.hpp"

#include <cmath>
#include <random>

#include "doctest.h"

using namespace gaudin;

namespace {

Weight wt(std::vector<int> c) {
  std::vector<Rat> r(c.begin(), c.end());
  return Weight(r);
}

GaudinProblem<Rat> a1_problem(std::vector<Rat> z, std::vector<int> lambdas) {
  GaudinProblem<Rat> p;
  p.rd = RootData::type_a(1);
  p.points = std::move(z);
  for (int l : lambdas) p.weights.push_back(wt({l}));
  p.validate();
  return p;
}

double vec_norm(const std::vector<Cplx>& v) {
  double acc = 0.0;
  for (const auto& x : v) acc += std::norm(x);
  return std::sqrt(acc);
}

std::vector<Cplx> total_raising_image(const TensorRep& t, int i,
                                      const std::vector<Cplx>& v) {
  std::vector<Cplx> img(t.dim(), Cplx(0));
  for (int s = 0; s < t.sites(); ++s) {
    auto part = t.site_matrix(s, t.factor(s).raising(i)).cast<Cplx>().apply(v);
    for (std::size_t r = 0; r < img.size(); ++r) img[r] += part[r];
  }
  return img;
}

}  // namespace

TEST_CASE("residuals vanish exactly at the midpoint") {
  auto p = a1_problem({Rat(0), Rat(1)}, {1, 1});
  BetheSolution<Rat> s;
  s.colors = {0};
  s.w = {Rat(1, 2)};
  auto r = bae_residual(p, s);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == 0);

  // one site, lambda = 2: no finite root
  GaudinProblem<Rat> p1 = a1_problem({Rat(0)}, {2});
  BetheSolution<Rat> s1;
  s1.colors = {0};
  s1.w = {Rat(5)};
  CHECK(bae_residual(p1, s1)[0] == Rat(2, 5));

  // empty solution
  BetheSolution<Rat> s0;
  CHECK(bae_residual(p, s0).empty());

  CHECK(solution_weight(p, {0}) == wt({0}));
  CHECK(solution_weight(p, {}) == wt({2}));
  auto a2 = RootData::type_a(2);
  GaudinProblem<Rat> pa{a2, {Rat(0), Rat(1)}, {wt({1, 0}), wt({0, 1})}, {}};
  CHECK(solution_weight(pa, {0, 1}) == wt({0, 0}));
}

TEST_CASE("residual cross-check catches coincident input") {
  auto p = a1_problem({Rat(0), Rat(1)}, {1, 1});
  BetheSolution<Rat> s;
  s.colors = {0};
  s.w = {Rat(1)};
  CHECK_THROWS_AS(bae_residual(p, s), DegenerateInputError);
  BetheSolution<Rat> s2;
  s2.colors = {0, 0};
  s2.w = {Rat(3), Rat(3)};
  CHECK_THROWS_AS(bae_residual(p, s2), DegenerateInputError);
}

TEST_CASE("jacobian matches finite differences and the midpoint closed form") {
  // closed form at the midpoint: J = -8/(z1-z2)^2
  auto p = a1_problem({Rat(0), Rat(1)}, {1, 1});
  BetheSolution<Rat> s;
  s.colors = {0};
  s.w = {Rat(1, 2)};
  auto j = bae_jacobian(p, s);
  CHECK(j(0, 0) == Rat(-8));

  // random off-shell complex configurations vs central differences
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  auto a2 = RootData::type_a(2);
  for (int trial = 0; trial < 20; ++trial) {
    GaudinProblem<Cplx> pc;
    pc.rd = a2;
    pc.points = {Cplx(0.0), Cplx(1.0), Cplx(0.3, 1.1)};
    pc.weights = {wt({1, 0}), wt({0, 1}), wt({1, 1})};
    BetheSolution<Cplx> sc;
    sc.colors = {0, 1, 0};
    for (int q = 0; q < 3; ++q) sc.w.push_back(Cplx(unif(rng), unif(rng)));
    bool ok = true;
    try {
      bae_residual(pc, sc);
    } catch (const DegenerateInputError&) {
      ok = false;  // rare coincidence draw, skip
    }
    if (!ok) continue;

    auto jac = bae_jacobian(pc, sc);
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k) {
      auto sp = sc, sm = sc;
      sp.w[k] += Cplx(h, 0.0);
      sm.w[k] -= Cplx(h, 0.0);
      auto rp = bae_residual(pc, sp);
      auto rm = bae_residual(pc, sm);
      for (int q = 0; q < 3; ++q) {
        const Cplx fd = (rp[q] - rm[q]) / (2.0 * h);
        const double scale = std::max(1.0, std::abs(jac(q, k)));
        CHECK(std::abs(fd - jac(q, k)) / scale < 1e-5);
      }
    }
  }
}

TEST_CASE("solver finds the midpoint root") {
  auto p = complexify(a1_problem({Rat(0), Rat(1)}, {1, 1}));
  SolverConfig cfg;
  cfg.seed = 5;
  auto res = solve_bae(p, {0}, cfg);
  REQUIRE(res.solutions.size() == 1);
  CHECK(res.collisions.empty());
  CHECK(std::abs(res.solutions[0].w[0] - Cplx(0.5)) < 1e-10);
  CHECK(res.solutions[0].residual < 1e-12);
  CHECK(!res.solutions[0].possibly_degenerate);
  CHECK(res.converged_starts > 0);
}

TEST_CASE("solver finds both roots of the three-point problem") {
  auto p = complexify(a1_problem({Rat(0), Rat(1), Rat(2)}, {1, 1, 1}));
  auto res = solve_bae(p, {0});
  REQUIRE(res.solutions.size() == 2);
  const double r3 = 1.0 / std::sqrt(3.0);
  CHECK(std::abs(res.solutions[0].w[0] - Cplx(1.0 - r3)) < 1e-9);
  CHECK(std::abs(res.solutions[1].w[0] - Cplx(1.0 + r3)) < 1e-9);
  for (const auto& s : res.solutions) {
    CHECK(s.residual < 1e-12);
    CHECK(s.jacobian_condition >= 1.0);
  }
}

TEST_CASE("solver returns nothing when no root exists") {
  auto p = complexify(a1_problem({Rat(0)}, {2}));
  auto res = solve_bae(p, {0});
  CHECK(res.solutions.empty());
  CHECK(res.collisions.empty());
}

TEST_CASE("solver output is deterministic and thread independent") {
  auto p = complexify(a1_problem({Rat(0), Rat(1), Rat(2)}, {1, 1, 1}));
  SolverConfig one;
  one.seed = 42;
  SolverConfig four = one;
  four.threads = 4;
  auto ra = solve_bae(p, {0}, one);
  auto rb = solve_bae(p, {0}, one);
  auto rc = solve_bae(p, {0}, four);
  REQUIRE(ra.solutions.size() == rb.solutions.size());
  REQUIRE(ra.solutions.size() == rc.solutions.size());
  for (std::size_t i = 0; i < ra.solutions.size(); ++i) {
    CHECK(ra.solutions[i].w[0] == rb.solutions[i].w[0]);
    CHECK(ra.solutions[i].w[0] == rc.solutions[i].w[0]);
    CHECK(ra.solutions[i].residual == rc.solutions[i].residual);
  }
}

TEST_CASE("bethe vector special forms") {
  auto p = a1_problem({Rat(0), Rat(1)}, {1, 1});
  auto t = tensor_irreducibles(p.rd, p.weights);

  // m = 0: the highest vector
  BetheSolution<Rat> s0;
  auto phi0 = bethe_vector(p, s0, t);
  CHECK(phi0[0] == 1);
  for (std::size_t i = 1; i < phi0.size(); ++i) CHECK(phi0[i] == 0);

  // m = 1 at generic rational w: -(v-+ / (w - z1) + v+- / (w - z2))
  BetheSolution<Rat> s1;
  s1.colors = {0};
  s1.w = {Rat(1, 3)};
  auto phi1 = bethe_vector(p, s1, t);
  CHECK(phi1[0] == 0);
  CHECK(phi1[3] == 0);
  CHECK(phi1[2] == -(Rat(1) / (Rat(1, 3) - Rat(0))));  // v- (x) v+
  CHECK(phi1[1] == -(Rat(1) / (Rat(1, 3) - Rat(1))));  // v+ (x) v-

  // at the midpoint the vector is proportional to the singlet
  BetheSolution<Rat> sm;
  sm.colors = {0};
  sm.w = {Rat(1, 2)};
  auto phim = bethe_vector(p, sm, t);
  CHECK(phim[1] == -phim[2]);
  CHECK(phim[1] != 0);
}

TEST_CASE("rank one reduction: product of lowering currents") {
  auto p = a1_problem({Rat(0), Rat(1)}, {2, 2});
  auto t = tensor_irreducibles(p.rd, p.weights);
  BetheSolution<Rat> s;
  s.colors = {0, 0};
  s.w = {Rat(3), Rat(-2)};
  auto phi = bethe_vector(p, s, t);

  // f(w) = sum_i f^{(i)} / (w - z_i), phi should equal f(w1) f(w2) v+ (x) v+
  auto current = [&](const Rat& w) {
    SparseMat<Rat> acc(t.dim(), t.dim());
    for (int i = 0; i < t.sites(); ++i)
      acc = acc +
            t.site_matrix(i, t.factor(i).lowering(0)).scaled(Rat(1) / (w - p.points[i]));
    return acc;
  };
  std::vector<Rat> v(t.dim(), Rat(0));
  v[0] = 1;
  auto expect = current(Rat(3)).apply(current(Rat(-2)).apply(v));
  REQUIRE(phi.size() == expect.size());
  for (std::size_t i = 0; i < phi.size(); ++i) CHECK(phi[i] == expect[i]);

  // permutation invariance in the same color
  BetheSolution<Rat> sw;
  sw.colors = {0, 0};
  sw.w = {Rat(-2), Rat(3)};
  auto phi2 = bethe_vector(p, sw, t);
  for (std::size_t i = 0; i < phi.size(); ++i) CHECK(phi[i] == phi2[i]);
}

TEST_CASE("on-shell bethe vectors are singular, off-shell ones are not") {
  auto pr = a1_problem({Rat(0), Rat(1), Rat(2)}, {1, 1, 1});
  auto p = complexify(pr);
  auto t = tensor_irreducibles(pr.rd, pr.weights);
  auto res = solve_bae(p, {0});
  REQUIRE(res.solutions.size() == 2);
  for (const auto& s : res.solutions) {
    auto phi = bethe_vector(p, s, t);
    const double n = vec_norm(phi);
    REQUIRE(n > 0);
    auto img = total_raising_image(t, 0, phi);
    CHECK(vec_norm(img) / n < 1e-9);

    BetheSolution<Cplx> off = s;
    off.w[0] += 0.1;
    auto phi_off = bethe_vector(p, off, t);
    auto img_off = total_raising_image(t, 0, phi_off);
    CHECK(vec_norm(img_off) / vec_norm(phi_off) > 1e-3);
  }
}

TEST_CASE("on-shell bethe vectors diagonalize the hamiltonians") {
  auto pr = a1_problem({Rat(0), Rat(1), Rat(2)}, {1, 1, 1});
  auto p = complexify(pr);
  auto t = tensor_irreducibles(pr.rd, pr.weights);
  auto res = solve_bae(p, {0});
  REQUIRE(res.solutions.size() == 2);
  for (const auto& s : res.solutions) {
    auto phi = bethe_vector(p, s, t);
    const double n = vec_norm(phi);
    for (int i = 0; i < 3; ++i) {
      auto xi = gaudin_hamiltonian(p, t, i);
      auto img = xi.apply(phi);
      // rayleigh quotient then residual
      Cplx num(0), den(0);
      for (std::size_t q = 0; q < phi.size(); ++q) {
        num += std::conj(phi[q]) * img[q];
        den += std::conj(phi[q]) * phi[q];
      }
      const Cplx theta = num / den;
      double resid = 0.0;
      for (std::size_t q = 0; q < phi.size(); ++q)
        resid += std::norm(img[q] - theta * phi[q]);
      CHECK(std::sqrt(resid) / n < 1e-9);
    }
  }
}

TEST_CASE("canonicalization sorts within colors only") {
  BetheSolution<Cplx> s;
  s.colors = {1, 0, 1};
  s.w = {Cplx(5.0), Cplx(2.0), Cplx(-1.0)};
  canonicalize_solution(s);
  CHECK(s.w[0] == Cplx(-1.0));
  CHECK(s.w[1] == Cplx(2.0));
  CHECK(s.w[2] == Cplx(5.0));
  CHECK(s.colors == ColorAssignment({1, 0, 1}));
}
