#pragma once

#include <memory>
#include <span>
#include <vector>

#include "codeclass/gf.hpp"

namespace codeclass {

/// Number of points of PG(k-1,q), i.e. (q^k-1)/(q-1).
long projective_size(int k, int q);

/// Points and hyperplanes of PG(k-1,q), where k is the vector-space dimension.
///
/// A point is stored as a normalized coordinate vector (first nonzero entry
/// equal to 1); points are indexed in lexicographic order of these vectors,
/// first coordinate most significant. Hyperplanes reuse the same vectors as
/// dual coordinates: point P lies on hyperplane H iff sum P_i H_i = 0.
class Geometry {
 public:
  static constexpr long kMaxPoints = 1'000'000;
  static constexpr long kMaxIncidences = 100'000'000;

  Geometry(int k, int q);

  int k() const noexcept { return k_; }
  int q() const noexcept { return f_->q(); }
  const Field& field() const noexcept { return *f_; }
  int num_points() const noexcept { return n_; }
  /// Points per hyperplane, equal to the number of hyperplanes per point.
  int hyperplane_size() const noexcept { return n_ == 1 ? 0 : static_cast<int>(projective_size(k_ - 1, q())); }

  std::span<const Elem> point(int index) const {
    return {coords_.data() + static_cast<std::size_t>(index) * k_, static_cast<std::size_t>(k_)};
  }
  /// Index of the point spanned by v (any nonzero scalar multiple), or -1 for v = 0.
  int index_of(std::span<const Elem> v) const;
  /// Same, but v must already be normalized.
  int index_of_normalized(std::span<const Elem> v) const;

  /// Index of <e_i>, i is 0-based.
  int unit_point(int i) const { return units_[i]; }

  bool incident(int point, int hyperplane) const;
  const std::vector<int>& points_on(int hyperplane) const { return points_on_[hyperplane]; }
  const std::vector<int>& hyperplanes_through(int point) const { return hyperplanes_through_[point]; }

  /// Partition of all other points into the lines through `point`; each cell
  /// holds the q points of one line other than `point`.
  std::vector<std::vector<int>> lines_through(int point) const;

  /// Point permutation induced by x -> x^(p^j) on every coordinate.
  const std::vector<int>& frobenius_permutation(int j) const { return frobenius_[j % field().e()]; }

 private:
  long encode(std::span<const Elem> v) const;

  int k_;
  std::shared_ptr<const Field> f_;
  int n_;
  std::vector<Elem> coords_;
  std::vector<long> codes_;
  std::vector<int> lookup_;
  std::vector<int> units_;
  std::vector<std::vector<int>> points_on_;
  std::vector<std::vector<int>> hyperplanes_through_;
  std::vector<std::vector<int>> frobenius_;
};

/// Shared instance of PG(k-1,q), cached per (k,q).
std::shared_ptr<const Geometry> geometry(int k, int q);

/// Projection of a multiset on PG(k-1,q) through `center` onto PG(k-2,q).
///
/// Chart: with j the position of the leading 1 of the center P, a point Q
/// maps to Q - Q_j P with coordinate j removed. For P = e_k this simply drops
/// the last coordinate. The center's own multiplicity is discarded.
std::vector<int> project_multiset(const Geometry& g, std::span<const int> mult, int center);

/// Image of `point` of g under the projection chart above, as a point index
/// of PG(k-2,q); -1 for the center itself.
int project_point(const Geometry& g, const Geometry& quotient, int point, int center);

}  // namespace codeclass
