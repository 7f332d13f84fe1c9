#pragma once

// Independent brute-force oracles shared by the unit and acceptance tests.
// None of them call the solver, canon or weight-distribution code under test.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "codeclass/codemodel.hpp"
#include "codeclass/extsys.hpp"
#include "codeclass/geometry.hpp"
#include "codeclass/gf.hpp"
#include "codeclass/linalg.hpp"

namespace oracle {

using namespace codeclass;

inline long row_value(const Row& row, const std::vector<int>& x) {
  long s = 0;
  for (const Term& t : row.terms) s += t.coef * x[t.var];
  return s;
}

inline bool row_holds(const Row& row, const std::vector<int>& x) {
  const long v = row_value(row, x);
  switch (row.sense) {
    case Sense::Eq: return v == row.rhs;
    case Sense::Le: return v <= row.rhs;
    case Sense::Ge: return v >= row.rhs;
  }
  return false;
}

/// Every point of the variable box that satisfies all rows.
inline std::set<std::vector<int>> box_solutions(const LinearSystem& sys) {
  std::set<std::vector<int>> out;
  const std::size_t n = sys.vars.size();
  std::vector<int> x(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (sys.vars[j].lo > sys.vars[j].hi) return out;
    x[j] = sys.vars[j].lo;
  }
  for (;;) {
    bool ok = true;
    for (const Row& row : sys.rows)
      if (!row_holds(row, x)) {
        ok = false;
        break;
      }
    if (ok) out.insert(x);
    std::size_t j = 0;
    while (j < n && x[j] == sys.vars[j].hi) {
      x[j] = sys.vars[j].lo;
      ++j;
    }
    if (j == n) return out;
    ++x[j];
  }
}

/// Random system with at most 12 variables, bounds within [0, 4] and a box
/// of at most `max_box` points. Right-hand sides are taken from a random box
/// point about two thirds of the time, so both outcomes are common.
inline LinearSystem random_system(std::mt19937& rng, long max_box = 60000) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  LinearSystem sys;
  const int n = pick(1, 12);
  std::vector<int> hi(n);
  for (int& h : hi) h = pick(0, 4);
  auto box = [&] {
    long b = 1;
    for (int h : hi) b *= h + 1;
    return b;
  };
  while (box() > max_box) {
    int& h = hi[pick(0, n - 1)];
    if (h > 0) --h;
  }
  for (int j = 0; j < n; ++j) {
    Variable v;
    v.name = "v" + std::to_string(j);
    v.lo = pick(0, 1) && hi[j] > 0 ? pick(0, hi[j]) : 0;
    v.hi = hi[j];
    sys.add_var(v);
  }
  std::vector<int> anchor(n);
  for (int j = 0; j < n; ++j) anchor[j] = pick(sys.vars[j].lo, sys.vars[j].hi);
  const int m = pick(1, 4);
  for (int i = 0; i < m; ++i) {
    Row row;
    row.name = "r" + std::to_string(i);
    for (int j = 0; j < n; ++j)
      if (pick(0, 2) > 0) {
        const int c = pick(-3, 3);
        if (c != 0) row.terms.push_back({j, c});
      }
    if (row.terms.empty()) row.terms.push_back({pick(0, n - 1), 1});
    const int s = pick(0, 4);
    row.sense = s < 3 ? Sense::Eq : (s == 3 ? Sense::Le : Sense::Ge);
    row.rhs = pick(0, 2) > 0 ? row_value(row, anchor) : pick(-6, 12);
    sys.add_row(row);
  }
  return sys;
}

/// Whether c is a sum of q values from {0} u [r, lambda].
inline bool line_sum_reachable(int q, int r, int lambda, int c) {
  std::vector<int> values{0};
  for (int v = r; v <= lambda; ++v) values.push_back(v);
  std::set<int> sums{0};
  for (int i = 0; i < q; ++i) {
    std::set<int> next;
    for (int s : sums)
      for (int v : values)
        if (s + v <= c) next.insert(s + v);
    sums = std::move(next);
  }
  return sums.count(c) > 0;
}

/// Weight distribution by encoding all q^k messages.
inline std::map<int, long> codeword_weights(const Matrix& g, int q) {
  const Field& f = *field(q);
  std::map<int, long> out;
  std::vector<int> msg(g.rows, 0);
  for (;;) {
    int j = 0;
    while (j < g.rows && msg[j] == q - 1) msg[j++] = 0;
    if (j == g.rows) break;
    ++msg[j];
    int w = 0;
    for (int c = 0; c < g.cols; ++c) {
      Elem s = 0;
      for (int i = 0; i < g.rows; ++i) s = f.add(s, f.mul(static_cast<Elem>(msg[i]), g(i, c)));
      w += s != 0;
    }
    ++out[w];
  }
  return out;
}

/// Generator matrix with one column per unit of multiplicity, in point order.
inline Matrix columns_of(const PointMultiset& m) {
  Matrix g(m.k(), m.length());
  int c = 0;
  for (int p = 0; p < m.geometry().num_points(); ++p)
    for (int t = 0; t < m[p]; ++t, ++c) {
      const auto v = m.geometry().point(p);
      for (int i = 0; i < m.k(); ++i) g(i, c) = v[i];
    }
  return g;
}

/// The collineation group of PG(k-1,q) as explicit point permutations,
/// built from every invertible k x k matrix (optionally composed with the
/// field automorphisms). Intended for groups of at most a few 10^5 elements.
class CollineationGroup {
 public:
  CollineationGroup(int k, int q, bool semilinear) : g_(geometry(k, q)) {
    const Field& f = g_->field();
    const int n = g_->num_points();
    const int frob = semilinear ? f.e() : 1;
    std::set<std::vector<int>> perms;
    std::vector<int> entries(k * k, 0);
    std::vector<Elem> v(k), w(k);
    for (;;) {
      Matrix a(k, k);
      for (int i = 0; i < k * k; ++i) a.data[i] = static_cast<Elem>(entries[i]);
      if (rank(f, a) == k) {
        ++matrices_;
        for (int j = 0; j < frob; ++j) {
          std::vector<int> perm(n);
          for (int p = 0; p < n; ++p) {
            const auto c = g_->point(p);
            for (int i = 0; i < k; ++i) {
              Elem s = 0;
              for (int t = 0; t < k; ++t) s = f.add(s, f.mul(a(i, t), c[t]));
              w[i] = f.frobenius(s, j);
            }
            perm[p] = g_->index_of(w);
          }
          perms.insert(std::move(perm));
        }
      }
      int i = 0;
      while (i < k * k && entries[i] == q - 1) entries[i++] = 0;
      if (i == k * k) break;
      ++entries[i];
    }
    perms_.assign(perms.begin(), perms.end());
    order_ = matrices_ * frob;
  }

  /// Order of GL(k,q), times e when semilinear.
  std::uint64_t order() const { return order_; }
  const std::vector<std::vector<int>>& permutations() const { return perms_; }

  std::vector<int> image(const std::vector<int>& mult, const std::vector<int>& perm) const {
    std::vector<int> out(mult.size(), 0);
    for (std::size_t p = 0; p < mult.size(); ++p) out[perm[p]] = mult[p];
    return out;
  }

  /// Lexicographically least image and orbit size.
  std::pair<std::vector<int>, std::uint64_t> orbit(const std::vector<int>& mult) const {
    std::set<std::vector<int>> seen;
    for (const auto& perm : perms_) seen.insert(image(mult, perm));
    return {*seen.begin(), seen.size()};
  }

 private:
  std::shared_ptr<const Geometry> g_;
  std::vector<std::vector<int>> perms_;
  std::uint64_t matrices_ = 0;
  std::uint64_t order_ = 0;
};

/// Random spanning multiset with multiplicities in [0, max_mult].
inline PointMultiset random_spanning(int k, int q, int max_mult, std::mt19937& rng, double density = 0.4) {
  auto g = geometry(k, q);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> mult(1, max_mult);
  for (;;) {
    std::vector<int> m(g->num_points(), 0);
    for (int& x : m)
      if (u(rng) < density) x = mult(rng);
    PointMultiset pm(g, m);
    if (spans(pm)) return pm;
  }
}

}  // namespace oracle
