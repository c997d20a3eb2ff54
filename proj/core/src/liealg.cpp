#include "gaudin/liealg.hpp"

#include <algorithm>
#include <map>

namespace gaudin {

Weight Weight::operator+(const Weight& o) const {
  std::vector<Rat> c(m_.size());
  for (std::size_t i = 0; i < m_.size(); ++i) c[i] = m_[i] + o.m_[i];
  return Weight(std::move(c));
}

Weight Weight::operator-(const Weight& o) const {
  std::vector<Rat> c(m_.size());
  for (std::size_t i = 0; i < m_.size(); ++i) c[i] = m_[i] - o.m_[i];
  return Weight(std::move(c));
}

Weight Weight::operator*(const Rat& s) const {
  std::vector<Rat> c(m_.size());
  for (std::size_t i = 0; i < m_.size(); ++i) c[i] = m_[i] * s;
  return Weight(std::move(c));
}

bool Weight::is_integral() const {
  return std::all_of(m_.begin(), m_.end(), [](const Rat& x) {
    return boost::multiprecision::denominator(x) == 1;
  });
}

bool Weight::is_dominant_integral() const {
  return is_integral() &&
         std::all_of(m_.begin(), m_.end(), [](const Rat& x) { return x >= 0; });
}

std::string Weight::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < m_.size(); ++i) {
    if (i) s += ",";
    s += rat_to_string(m_[i]);
  }
  return s + ")";
}

RootData RootData::type_a(int rank) {
  if (rank < 1) throw DegenerateInputError("type A rank must be >= 1");
  RootData rd;
  rd.rank = rank;
  rd.cartan.assign(rank, std::vector<int>(rank, 0));
  Matrix<Rat> a(rank, rank);
  for (int i = 0; i < rank; ++i) {
    for (int j = 0; j < rank; ++j) {
      rd.cartan[i][j] = (i == j) ? 2 : (std::abs(i - j) == 1 ? -1 : 0);
      a(i, j) = Rat(rd.cartan[i][j]);
    }
  }
  rd.cartan_inv = solve_exact(a, Matrix<Rat>::identity(rank));
  return rd;
}

Weight RootData::simple_root(int i) const {
  std::vector<Rat> c(rank);
  for (int j = 0; j < rank; ++j) c[j] = Rat(cartan[j][i]);
  return Weight(std::move(c));
}

Weight RootData::fundamental_weight(int i) const {
  std::vector<Rat> c(rank, Rat(0));
  c[i] = 1;
  return Weight(std::move(c));
}

Weight RootData::rho() const { return Weight(std::vector<Rat>(rank, Rat(1))); }

std::vector<Rat> RootData::root_coords(const Weight& w) const {
  Matrix<Rat> b(rank, 1);
  for (int i = 0; i < rank; ++i) b(i, 0) = w[i];
  const Matrix<Rat> c = cartan_inv * b;
  std::vector<Rat> out(rank);
  for (int i = 0; i < rank; ++i) out[i] = c(i, 0);
  return out;
}

Weight RootData::from_root_coords(const std::vector<Rat>& c) const {
  std::vector<Rat> m(rank, Rat(0));
  for (int i = 0; i < rank; ++i) {
    const Weight a = simple_root(i);
    for (int j = 0; j < rank; ++j) m[j] += c[i] * a[j];
  }
  return Weight(std::move(m));
}

Rat RootData::height(const Weight& w) const {
  const auto c = root_coords(w);
  Rat h(0);
  for (const auto& x : c) h += x;
  return h;
}

Weight RootData::reflect(const Weight& w, int i) const {
  return w - simple_root(i) * w[i];
}

std::vector<Rat> RootData::epsilon_coords(const Weight& w) const {
  const int n = rank + 1;
  std::vector<Rat> eps(n, Rat(0));
  for (int k = 0; k < rank; ++k) {
    if (w[k] == 0) continue;
    // omega_{k+1} contributes 1 - (k+1)/n to the first k+1 entries and
    // -(k+1)/n to the rest.
    const Rat shift = Rat(k + 1, n);
    for (int a = 0; a < n; ++a) {
      Rat coord = (a <= k) ? Rat(1) - shift : -shift;
      eps[a] += w[k] * coord;
    }
  }
  return eps;
}

Weight weyl_apply(const RootData& rd, const WeylElement& w, const Weight& lambda) {
  Weight v = lambda;
  for (auto it = w.word.rbegin(); it != w.word.rend(); ++it) v = rd.reflect(v, *it);
  return v;
}

Weight weyl_shifted_apply(const RootData& rd, const WeylElement& w, const Weight& lambda) {
  return weyl_apply(rd, w, lambda + rd.rho()) - rd.rho();
}

WeylElement weyl_inverse(const WeylElement& w) {
  WeylElement inv;
  inv.word.assign(w.word.rbegin(), w.word.rend());
  return inv;
}

std::vector<WeylElement> weyl_group(const RootData& rd) {
  // BFS over right multiplication by simple reflections; elements are
  // identified by their action on rho, which is regular.
  std::map<std::vector<Rat>, WeylElement> seen;
  const Weight rho = rd.rho();
  std::vector<WeylElement> order;
  WeylElement id;
  seen[rho.coords()] = id;
  order.push_back(id);
  std::size_t head = 0;
  while (head < order.size()) {
    const WeylElement w = order[head++];
    for (int i = 0; i < rd.rank; ++i) {
      WeylElement next = w;
      next.word.push_back(i);
      const Weight img = weyl_apply(rd, next, rho);
      if (seen.emplace(img.coords(), next).second) order.push_back(next);
    }
  }
  return order;
}

WeylElement weyl_longest(const RootData& rd) {
  const auto all = weyl_group(rd);
  const WeylElement* best = &all.front();
  for (const auto& w : all)
    if (w.word.size() > best->word.size()) best = &w;
  return *best;
}

Weight dual_weight(const RootData& rd, const Weight& lambda) {
  const WeylElement w0 = weyl_longest(rd);
  return weyl_apply(rd, w0, lambda) * Rat(-1);
}

std::optional<InfinityClass> classify_weight_at_infinity(const RootData& rd,
                                                         const Weight& mu) {
  if (!mu.is_integral()) return std::nullopt;
  const Weight nu = mu + rd.rho();
  for (const auto& w : weyl_group(rd)) {
    const Weight x = weyl_apply(rd, weyl_inverse(w), nu);
    bool strictly_dominant = true;
    for (int i = 0; i < rd.rank; ++i)
      if (x[i] < 1) {
        strictly_dominant = false;
        break;
      }
    if (!strictly_dominant) continue;
    const Weight lambda_star = x - rd.rho();
    InfinityClass out;
    out.lambda_infinity = dual_weight(rd, lambda_star);
    out.w = w;
    return out;
  }
  return std::nullopt;
}

}  // namespace gaudin
