#include "codeclass/geometry.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <string>

#include "codeclass/error.hpp"

namespace codeclass {

long projective_size(int k, int q) {
  long n = 0;
  long pw = 1;
  for (int i = 0; i < k; ++i) {
    n += pw;
    pw *= q;
  }
  return n;
}

Geometry::Geometry(int k, int q) : k_(k), f_(codeclass::field(q)) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 1");
  const long total = projective_size(k, q);
  if (total > kMaxPoints)
    throw Error(ErrorKind::TooLarge, "PG(" + std::to_string(k - 1) + "," + std::to_string(q) + ") has " +
                                         std::to_string(total) + " points");
  const long per_hyperplane = projective_size(k - 1, q);
  if (total * per_hyperplane > kMaxIncidences)
    throw Error(ErrorKind::TooLarge, "incidence structure too large");
  n_ = static_cast<int>(total);

  // Lexicographic order: the leading 1 moves from the last position to the first.
  coords_.reserve(static_cast<std::size_t>(n_) * k_);
  std::vector<Elem> v(k_);
  for (int lead = k_ - 1; lead >= 0; --lead) {
    const int free = k_ - 1 - lead;
    long combos = 1;
    for (int i = 0; i < free; ++i) combos *= q;
    for (long c = 0; c < combos; ++c) {
      std::fill(v.begin(), v.end(), 0);
      v[lead] = 1;
      long rest = c;
      for (int i = k_ - 1; i > lead; --i, rest /= q) v[i] = static_cast<Elem>(rest % q);
      coords_.insert(coords_.end(), v.begin(), v.end());
    }
  }
  codes_.resize(n_);
  for (int i = 0; i < n_; ++i) codes_[i] = encode(point(i));

  long space = 1;
  for (int i = 0; i < k_; ++i) space *= q;
  if (space <= (1L << 24)) {
    lookup_.assign(static_cast<std::size_t>(space), -1);
    for (int i = 0; i < n_; ++i) lookup_[codes_[i]] = i;
  }

  units_.resize(k_);
  for (int i = 0; i < k_; ++i) {
    std::fill(v.begin(), v.end(), 0);
    v[i] = 1;
    units_[i] = index_of_normalized(v);
  }

  points_on_.assign(n_, {});
  hyperplanes_through_.assign(n_, {});
  if (n_ > 1) {
    for (int h = 0; h < n_; ++h) points_on_[h].reserve(per_hyperplane);
    for (int p = 0; p < n_; ++p) hyperplanes_through_[p].reserve(per_hyperplane);
  }
  for (int h = 0; h < n_; ++h) {
    for (int p = 0; p < n_; ++p) {
      if (incident(p, h)) {
        points_on_[h].push_back(p);
        hyperplanes_through_[p].push_back(h);
      }
    }
  }

  const int e = f_->e();
  frobenius_.assign(e, std::vector<int>(n_));
  for (int j = 0; j < e; ++j) {
    for (int p = 0; p < n_; ++p) {
      auto c = point(p);
      for (int i = 0; i < k_; ++i) v[i] = f_->frobenius(c[i], j);
      frobenius_[j][p] = index_of_normalized(v);
    }
  }
}

long Geometry::encode(std::span<const Elem> v) const {
  long code = 0;
  for (int i = 0; i < k_; ++i) code = code * q() + v[i];
  return code;
}

int Geometry::index_of_normalized(std::span<const Elem> v) const {
  const long code = encode(v);
  if (!lookup_.empty()) return lookup_[code];
  auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
  if (it == codes_.end() || *it != code) return -1;
  return static_cast<int>(it - codes_.begin());
}

int Geometry::index_of(std::span<const Elem> v) const {
  std::vector<Elem> w(v.begin(), v.end());
  for (int i = 0; i < k_; ++i) {
    if (w[i] == 0) continue;
    if (w[i] != 1) {
      const Elem s = f_->inv(w[i]);
      for (int j = i; j < k_; ++j) w[j] = f_->mul(w[j], s);
    }
    return index_of_normalized(w);
  }
  return -1;
}

bool Geometry::incident(int p, int h) const {
  auto a = point(p);
  auto b = point(h);
  Elem s = 0;
  for (int i = 0; i < k_; ++i) s = f_->add(s, f_->mul(a[i], b[i]));
  return s == 0;
}

std::vector<std::vector<int>> Geometry::lines_through(int center) const {
  std::vector<std::vector<int>> lines;
  std::vector<char> seen(n_, 0);
  seen[center] = 1;
  auto c = point(center);
  std::vector<Elem> v(k_);
  for (int p = 0; p < n_; ++p) {
    if (seen[p]) continue;
    std::vector<int> line;
    auto a = point(p);
    for (int lam = 0; lam < q(); ++lam) {
      for (int i = 0; i < k_; ++i) v[i] = f_->add(a[i], f_->mul(static_cast<Elem>(lam), c[i]));
      const int idx = index_of(v);
      seen[idx] = 1;
      line.push_back(idx);
    }
    std::sort(line.begin(), line.end());
    lines.push_back(std::move(line));
  }
  return lines;
}

std::shared_ptr<const Geometry> geometry(int k, int q) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const Geometry>> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find({k, q});
    if (it != cache.end()) return it->second;
  }
  auto g = std::make_shared<const Geometry>(k, q);
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(std::make_pair(k, q), g).first->second;
}

int project_point(const Geometry& g, const Geometry& quotient, int point, int center) {
  if (point == center) return -1;
  const Field& f = g.field();
  const int k = g.k();
  auto c = g.point(center);
  int lead = 0;
  while (c[lead] == 0) ++lead;
  auto a = g.point(point);
  std::vector<Elem> w;
  w.reserve(k - 1);
  const Elem t = a[lead];
  for (int i = 0; i < k; ++i) {
    if (i == lead) continue;
    w.push_back(f.sub(a[i], f.mul(t, c[i])));
  }
  return quotient.index_of(w);
}

std::vector<int> project_multiset(const Geometry& g, std::span<const int> mult, int center) {
  if (g.k() < 2) throw Error(ErrorKind::InvalidArgument, "cannot project PG(0,q)");
  auto quotient = geometry(g.k() - 1, g.q());
  std::vector<int> out(quotient->num_points(), 0);
  for (int p = 0; p < g.num_points(); ++p) {
    if (p == center || mult[p] == 0) continue;
    out[project_point(g, *quotient, p, center)] += mult[p];
  }
  return out;
}

}  // namespace codeclass
