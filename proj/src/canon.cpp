#include "codeclass/canon.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <mutex>
#include <numeric>

#include "codeclass/error.hpp"

namespace codeclass {

const char* to_string(Equivalence kind) { return kind == Equivalence::Linear ? "linear" : "semilinear"; }

Equivalence parse_equivalence(const std::string& s) {
  if (s == "linear") return Equivalence::Linear;
  if (s == "semilinear") return Equivalence::Semilinear;
  throw Error(ErrorKind::InvalidArgument, "unknown equivalence '" + s + "'");
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorKind::TooLarge, "group order overflows 64 bits");
  return r;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Dense ranks of (previous color, signature) pairs; returns the number of colors.
int rank_keys(const std::vector<std::pair<int, std::uint64_t>>& keys, std::vector<int>& colors,
              std::vector<int>& order) {
  order.resize(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return keys[a] < keys[b]; });
  colors.resize(keys.size());
  int c = -1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || keys[order[i]] != keys[order[i - 1]]) ++c;
    colors[order[i]] = c;
  }
  return c + 1;
}

struct Coloring {
  std::vector<int> points;
  std::vector<int> hyperplanes;
  int point_cells = 0;
  int hyperplane_cells = 0;
};

// Union-find over point indices.
struct Orbits {
  std::vector<int> parent;
  explicit Orbits(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// A leaf fixes a collineation x -> frobenius^power(linear * x).
struct Leaf {
  std::vector<int> path;
  Matrix linear;
  Matrix linear_inverse;
  int power = 0;
};

class FrameSearch {
 public:
  FrameSearch(const PointMultiset& m, Equivalence kind)
      : m_(m), g_(m.geometry()), f_(g_.field()), k_(g_.k()), n_(g_.num_points()),
        powers_(kind == Equivalence::Semilinear ? f_.e() : 1) {
    support_ = m.support();
  }

  void run() {
    Coloring c;
    std::vector<std::pair<int, std::uint64_t>> keys(n_);
    for (int p = 0; p < n_; ++p) keys[p] = {m_[p], 0};
    c.point_cells = rank_keys(keys, c.points, order_);
    auto hm = hyperplane_multiplicities(m_);
    for (int h = 0; h < n_; ++h) keys[h] = {hm[h], 0};
    c.hyperplane_cells = rank_keys(keys, c.hyperplanes, order_);
    refine(c);
    orbit_sizes_.assign(k_ + 1, 1);
    std::vector<std::vector<Elem>> echelon;
    std::vector<int> chosen;
    search(c, echelon, chosen, true);
    group_order_projective = static_cast<std::uint64_t>(first_fixed_powers_);
    for (auto s : orbit_sizes_) group_order_projective = checked_mul(group_order_projective, s);
  }

  std::vector<int> best;
  std::uint64_t group_order_projective = 0;
  std::uint64_t leaves = 0;
  Leaf best_leaf;

 private:
  void refine(Coloring& c) {
    std::vector<std::pair<int, std::uint64_t>> keys(n_);
    while (true) {
      for (int h = 0; h < n_; ++h) {
        std::uint64_t s = 0;
        for (int p : g_.points_on(h)) s += splitmix(static_cast<std::uint64_t>(c.points[p]));
        keys[h] = {c.hyperplanes[h], s};
      }
      const int nh = rank_keys(keys, c.hyperplanes, order_);
      for (int p = 0; p < n_; ++p) {
        std::uint64_t s = 0;
        for (int h : g_.hyperplanes_through(p)) s += splitmix(static_cast<std::uint64_t>(c.hyperplanes[h]) ^ 0x5555ULL);
        keys[p] = {c.points[p], s};
      }
      const int np = rank_keys(keys, c.points, order_);
      const bool stable = np == c.point_cells && nh == c.hyperplane_cells;
      c.point_cells = np;
      c.hyperplane_cells = nh;
      if (stable || np == n_) break;
    }
  }

  void individualize(Coloring& c, int v) {
    std::vector<std::pair<int, std::uint64_t>> keys(n_);
    for (int p = 0; p < n_; ++p) keys[p] = {c.points[p], p == v ? 0 : 1};
    c.point_cells = rank_keys(keys, c.points, order_);
  }

  bool reduces_to_zero(const std::vector<std::vector<Elem>>& echelon, std::vector<Elem>& v) const {
    for (const auto& row : echelon) {
      int piv = 0;
      while (row[piv] == 0) ++piv;
      if (v[piv] == 0) continue;
      const Elem t = v[piv];
      for (int i = 0; i < k_; ++i) v[i] = f_.sub(v[i], f_.mul(t, row[i]));
    }
    return std::all_of(v.begin(), v.end(), [](Elem x) { return x == 0; });
  }

  int index_of(std::vector<Elem>& v) const {
    normalize(f_, v);
    return g_.index_of_normalized(v);
  }

  // Smallest candidate cell (ties: smallest color), points in index order.
  std::vector<int> target_cell(const Coloring& c, const std::vector<char>& candidate) const {
    std::vector<int> count(c.point_cells, 0);
    for (int p = 0; p < n_; ++p)
      if (candidate[p]) ++count[c.points[p]];
    int bestc = -1;
    for (int col = 0; col < c.point_cells; ++col)
      if (count[col] > 0 && (bestc < 0 || count[col] < count[bestc])) bestc = col;
    std::vector<int> cell;
    if (bestc < 0) return cell;
    for (int p = 0; p < n_; ++p)
      if (candidate[p] && c.points[p] == bestc) cell.push_back(p);
    return cell;
  }

  // Orbits of the subgroup generated by the known automorphisms that fix `prefix` pointwise.
  Orbits stabilizer_orbits(const std::vector<int>& prefix) const {
    Orbits o(n_);
    for (const auto& gen : generators_) {
      bool fixes = true;
      for (int p : prefix) fixes = fixes && gen[p] == p;
      if (!fixes) continue;
      for (int p = 0; p < n_; ++p) o.unite(p, gen[p]);
    }
    return o;
  }

  // Point map of x -> frobenius^power(linear * x).
  int image_of(const Leaf& leaf, int p, std::vector<Elem>& v) const {
    apply(f_, leaf.linear, g_.point(p), v);
    return g_.frobenius_permutation(leaf.power)[index_of(v)];
  }

  int preimage_of(const Leaf& leaf, int p, std::vector<Elem>& v) const {
    const int undo = (powers_ == 1 || leaf.power == 0) ? 0 : f_.e() - leaf.power;
    apply(f_, leaf.linear_inverse, g_.point(g_.frobenius_permutation(undo)[p]), v);
    return index_of(v);
  }

  // Automorphism mapping the path of `from` onto the path of `to` (their images agree).
  void add_generator(const Leaf& from, const Leaf& to) {
    std::vector<int> perm(n_);
    std::vector<Elem> v(k_), w(k_);
    for (int p = 0; p < n_; ++p) perm[p] = preimage_of(to, image_of(from, p, v), w);
    generators_.push_back(std::move(perm));
  }

  static int divergence(const std::vector<int>& a, const std::vector<int>& b) {
    int i = 0;
    while (i < static_cast<int>(a.size()) && a[i] == b[i]) ++i;
    return i;
  }

  void evaluate_frame(const std::vector<int>& path, const Matrix& linear) {
    std::vector<int> image(support_.size());
    std::vector<Elem> v(k_);
    for (std::size_t s = 0; s < support_.size(); ++s) {
      apply(f_, linear, g_.point(support_[s]), v);
      image[s] = index_of(v);
    }
    std::vector<int> dense(n_);
    const bool first_leaf = first_image_.empty();
    int abort_level = -1;
    for (int j = 0; j < powers_; ++j) {
      ++leaves;
      std::fill(dense.begin(), dense.end(), 0);
      const auto& frob = g_.frobenius_permutation(j);
      for (std::size_t s = 0; s < support_.size(); ++s) dense[frob[image[s]]] += m_[support_[s]];
      Leaf leaf{path, linear, Matrix(), j};
      auto make_inverse = [&] {
        if (leaf.linear_inverse.rows == 0) leaf.linear_inverse = *inverse(f_, linear);
      };
      if (first_leaf) {
        if (j == 0) {
          first_image_ = dense;
          make_inverse();
          first_leaf_ = leaf;
          first_fixed_powers_ = 1;
        } else if (dense == first_image_) {
          ++first_fixed_powers_;
        }
      } else if (dense == first_image_) {
        make_inverse();
        add_generator(first_leaf_, leaf);
        abort_level = divergence(path, first_leaf_.path);
      }
      if (best.empty() || dense < best) {
        best = dense;
        make_inverse();
        best_leaf = leaf;
      } else if (!first_leaf && dense == best && best_leaf.path != path) {
        make_inverse();
        add_generator(best_leaf, leaf);
        const int d = divergence(path, best_leaf.path);
        if (abort_level < 0 || d < abort_level) abort_level = d;
      }
    }
    if (abort_level >= 0 && abort_level < static_cast<int>(path.size()) - 1) abort_to_ = abort_level;
  }

  void search(const Coloring& c, std::vector<std::vector<Elem>>& echelon, std::vector<int>& chosen,
              bool on_first_path) {
    const int level = static_cast<int>(chosen.size());
    std::vector<char> candidate(n_, 0);
    std::vector<Elem> v(k_);
    Matrix ainv;
    std::vector<std::vector<Elem>> coords;
    if (level < k_) {
      for (int p = 0; p < n_; ++p) {
        auto pt = g_.point(p);
        v.assign(pt.begin(), pt.end());
        candidate[p] = !reduces_to_zero(echelon, v);
      }
    } else {
      // all k basis points chosen: the unit point needs every coordinate nonzero
      Matrix a(k_, k_);
      for (int j = 0; j < k_; ++j) {
        auto pt = g_.point(chosen[j]);
        for (int i = 0; i < k_; ++i) a(i, j) = pt[i];
      }
      ainv = *inverse(f_, a);
      coords.assign(n_, std::vector<Elem>(k_));
      for (int p = 0; p < n_; ++p) {
        apply(f_, ainv, g_.point(p), coords[p]);
        candidate[p] = std::all_of(coords[p].begin(), coords[p].end(), [](Elem x) { return x != 0; });
      }
    }

    const std::vector<int> cell = target_cell(c, candidate);
    std::vector<int> explored;
    std::size_t known_generators = static_cast<std::size_t>(-1);
    Orbits orbits(0);
    for (std::size_t idx = 0; idx < cell.size(); ++idx) {
      const int p = cell[idx];
      if (!explored.empty()) {
        if (known_generators != generators_.size()) {
          orbits = stabilizer_orbits(chosen);
          known_generators = generators_.size();
        }
        bool seen = false;
        for (int e : explored) seen = seen || orbits.find(e) == orbits.find(p);
        if (seen) continue;
      }
      explored.push_back(p);
      const bool first_child = on_first_path && idx == 0;
      chosen.push_back(p);
      if (level < k_) {
        Coloring next = c;
        individualize(next, p);
        refine(next);
        auto pt = g_.point(p);
        v.assign(pt.begin(), pt.end());
        reduces_to_zero(echelon, v);
        int piv = 0;
        while (v[piv] == 0) ++piv;
        const Elem s = f_.inv(v[piv]);
        for (auto& x : v) x = f_.mul(x, s);
        std::vector<std::vector<Elem>> saved = echelon;
        for (auto& row : echelon) {
          if (row[piv] == 0) continue;
          const Elem t = row[piv];
          for (int i = 0; i < k_; ++i) row[i] = f_.sub(row[i], f_.mul(t, v[i]));
        }
        echelon.push_back(v);
        search(next, echelon, chosen, first_child);
        echelon = std::move(saved);
      } else {
        Matrix linear(k_, k_);
        for (int r = 0; r < k_; ++r) {
          const Elem s = f_.inv(coords[p][r]);
          for (int col = 0; col < k_; ++col) linear(r, col) = f_.mul(s, ainv(r, col));
        }
        evaluate_frame(chosen, linear);
      }
      chosen.pop_back();
      if (abort_to_ >= 0) {
        if (abort_to_ < level) return;
        abort_to_ = -1;
      }
    }
    if (on_first_path && !cell.empty()) {
      Orbits o = stabilizer_orbits(chosen);
      std::uint64_t size = 0;
      for (int p : cell)
        if (o.find(p) == o.find(cell[0])) ++size;
      orbit_sizes_[level] = size;
    }
  }

  const PointMultiset& m_;
  const Geometry& g_;
  const Field& f_;
  int k_, n_;
  int powers_;
  std::vector<int> support_;
  std::vector<int> order_;
  std::vector<std::vector<int>> generators_;
  std::vector<int> first_image_;
  Leaf first_leaf_;
  int first_fixed_powers_ = 1;
  std::vector<std::uint64_t> orbit_sizes_;
  int abort_to_ = -1;
};

}  // namespace

std::uint64_t acting_group_order(int k, int q, Equivalence kind) {
  std::uint64_t order = 1;
  std::uint64_t qk = 1;
  for (int i = 0; i < k; ++i) qk = checked_mul(qk, static_cast<std::uint64_t>(q));
  std::uint64_t qi = 1;
  for (int i = 0; i < k; ++i) {
    order = checked_mul(order, qk - qi);
    qi *= static_cast<std::uint64_t>(q);
  }
  if (kind == Equivalence::Semilinear) {
    int p, e;
    prime_power(q, p, e);
    order = checked_mul(order, static_cast<std::uint64_t>(e));
  }
  return order;
}

std::string certificate_of(int k, int q, const std::vector<int>& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  feed(static_cast<std::uint64_t>(k));
  feed(static_cast<std::uint64_t>(q));
  for (int m : canonical) feed(static_cast<std::uint64_t>(m));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CanonicalForm canonical_form(const PointMultiset& m, Equivalence kind) {
  if (!spans(m)) throw Error(ErrorKind::NotSpanning, "canonical form of a non-spanning multiset");
  CanonicalForm out;
  const int q = m.q();
  if (m.k() == 1) {
    out.canonical = m.mult();
    out.aut_order = acting_group_order(1, q, kind);
    out.transform = Matrix::identity(1);
    out.leaves = 1;
  } else {
    FrameSearch search(m, kind);
    search.run();
    out.canonical = std::move(search.best);
    out.aut_order = checked_mul(search.group_order_projective, static_cast<std::uint64_t>(q - 1));
    out.transform = std::move(search.best_leaf.linear);
    out.frobenius_power = search.best_leaf.power;
    out.leaves = search.leaves;
  }
  out.certificate = certificate_of(m.k(), q, out.canonical);
  return out;
}

std::uint64_t automorphism_group_order(const PointMultiset& m, Equivalence kind) {
  return canonical_form(m, kind).aut_order;
}

PointMultiset apply_collineation(const PointMultiset& m, const Matrix& a, int frobenius_power) {
  const Geometry& g = m.geometry();
  const auto& frob = g.frobenius_permutation(frobenius_power);
  std::vector<int> out(g.num_points(), 0);
  std::vector<Elem> v(g.k());
  for (int p : m.support()) {
    apply(g.field(), a, g.point(p), v);
    out[frob[g.index_of(v)]] += m[p];
  }
  return PointMultiset(m.geometry_ptr(), std::move(out));
}

namespace {

// Point permutations of PGL(k,q) (or PGammaL), cached per geometry and kind.
const std::vector<std::vector<int>>& projective_group(const Geometry& g, Equivalence kind) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, std::vector<std::vector<int>>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_tuple(g.k(), g.q(), static_cast<int>(kind));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const Field& f = g.field();
  const int k = g.k();
  const int q = g.q();
  std::vector<std::vector<int>> perms;
  Matrix a(k, k);
  std::vector<Elem> col(k), img(k);
  long space = 1;
  for (int i = 0; i < k; ++i) space *= q;

  auto emit = [&]() {
    std::vector<int> perm(g.num_points());
    for (int p = 0; p < g.num_points(); ++p) {
      apply(f, a, g.point(p), img);
      perm[p] = g.index_of(img);
    }
    const int powers = kind == Equivalence::Semilinear ? f.e() : 1;
    for (int j = 0; j < powers; ++j) {
      const auto& frob = g.frobenius_permutation(j);
      std::vector<int> composed(perm.size());
      for (std::size_t p = 0; p < perm.size(); ++p) composed[p] = frob[perm[p]];
      perms.push_back(std::move(composed));
    }
  };
  auto rec = [&](auto&& self, int c) -> void {
    if (c == k) {
      emit();
      return;
    }
    if (c == 0) {
      // first column up to scalars
      for (int p = 0; p < g.num_points(); ++p) {
        auto pt = g.point(p);
        for (int i = 0; i < k; ++i) a(i, 0) = pt[i];
        self(self, 1);
      }
      return;
    }
    for (long code = 1; code < space; ++code) {
      long rest = code;
      for (int i = k - 1; i >= 0; --i, rest /= q) a(i, c) = static_cast<Elem>(rest % q);
      Matrix sub(k, c + 1);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j <= c; ++j) sub(i, j) = a(i, j);
      if (rank(f, sub) == c + 1) self(self, c + 1);
    }
  };
  rec(rec, 0);
  return cache.emplace(key, std::move(perms)).first->second;
}

}  // namespace

OracleResult orbit_canonical_oracle(const PointMultiset& m, Equivalence kind) {
  const Geometry& g = m.geometry();
  const int q = g.q();
  const std::uint64_t projective = acting_group_order(g.k(), q, kind) / static_cast<std::uint64_t>(q - 1);
  if (projective > 10'000'000ULL)
    throw Error(ErrorKind::GroupTooLarge, std::to_string(projective) + " group elements");
  OracleResult out;
  if (g.k() == 1) {
    out.minimum = m.mult();
    out.orbit_size = 1;
    out.aut_order = acting_group_order(1, q, kind);
    return out;
  }
  const auto& perms = projective_group(g, kind);
  std::vector<int> image(g.num_points());
  std::uint64_t stab = 0;
  for (const auto& perm : perms) {
    std::fill(image.begin(), image.end(), 0);
    for (int p = 0; p < g.num_points(); ++p) image[perm[p]] = m[p];
    if (out.minimum.empty() || image < out.minimum) out.minimum = image;
    if (image == m.mult()) ++stab;
  }
  out.orbit_size = perms.size() / stab;
  out.aut_order = stab * static_cast<std::uint64_t>(q - 1);
  return out;
}

}  // namespace codeclass
