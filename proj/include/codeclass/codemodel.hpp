#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "codeclass/geometry.hpp"
#include "codeclass/linalg.hpp"

namespace codeclass {

/// A linear [n,k]_q code up to monomial equivalence: the multiset of points
/// of PG(k-1,q) spanned by the columns of a generator matrix.
class PointMultiset {
 public:
  PointMultiset() = default;
  PointMultiset(std::shared_ptr<const Geometry> g, std::vector<int> mult);
  /// Zero multiset on PG(k-1,q).
  PointMultiset(int k, int q);

  int k() const noexcept { return geom_->k(); }
  int q() const noexcept { return geom_->q(); }
  const Geometry& geometry() const noexcept { return *geom_; }
  const std::shared_ptr<const Geometry>& geometry_ptr() const noexcept { return geom_; }

  const std::vector<int>& mult() const noexcept { return mult_; }
  int operator[](int point) const { return mult_[point]; }
  void set(int point, int m);
  void add(int point, int m = 1);

  int length() const noexcept { return length_; }
  int max_multiplicity() const;
  /// Smallest positive multiplicity (0 for the empty multiset).
  int min_positive_multiplicity() const;
  std::vector<int> support() const;

  bool operator==(const PointMultiset& o) const { return k() == o.k() && q() == o.q() && mult_ == o.mult_; }

 private:
  std::shared_ptr<const Geometry> geom_;
  std::vector<int> mult_;
  int length_ = 0;
};

/// Nonzero weights w -> number of codewords A_w.
struct WeightDistribution {
  std::map<int, long> counts;

  std::vector<int> weights() const;
  long total() const;
  /// "w^A" tokens joined by spaces, e.g. "36^616 45^112".
  std::string to_string() const;
  bool operator==(const WeightDistribution&) const = default;
};

struct CodeStats {
  int length = 0;
  int dimension = 0;
  int max_multiplicity = 0;
  bool projective = false;
  int divisibility = 0;
  int min_weight = 0;
  int max_weight = 0;
};

/// True iff the support of M spans F_q^k.
bool spans(const PointMultiset& m);

PointMultiset multiset_from_generator(const Matrix& generator, int q);

/// Systematic generator matrix (I_k | R) of a code equivalent to M.
///
/// When all unit points carry positive multiplicity M is used as is;
/// otherwise the first k independent support points (by index) are mapped
/// to the unit vectors. Columns: e_1..e_k first, then the remaining columns
/// in ascending point index of the (transformed) multiset.
Matrix generator_from_multiset(const PointMultiset& m);

/// Equivalent multiset that contains every unit point, obtained with the
/// same basis choice as generator_from_multiset.
PointMultiset systematize(const PointMultiset& m);

/// M(H) for every hyperplane H.
std::vector<int> hyperplane_multiplicities(const PointMultiset& m);

WeightDistribution weight_distribution(const PointMultiset& m);

CodeStats code_stats(const PointMultiset& m);

/// Restriction of M to hyperplane H, as a multiset on PG(k-2,q).
/// Chart: with j the position of the leading 1 of H's dual vector, drop coordinate j.
PointMultiset residual(const PointMultiset& m, int hyperplane);

/// Projection through a point (see project_multiset).
PointMultiset projection(const PointMultiset& m, int center);

/// sum_{i<k} ceil(d / q^i).
long griesmer_bound(int q, int k, long d);

/// Image of M under the linear map x -> A x (A invertible k x k).
PointMultiset transform(const PointMultiset& m, const Matrix& a);

/// Plain text generator matrix: "q k n" then k rows of n digits (0-9, a-z).
Matrix read_generator(std::istream& in, int& q);
Matrix read_generator_file(const std::string& path, int& q);
void write_generator(std::ostream& out, const Matrix& g, int q);

char digit_char(int v);
int digit_value(char c);

}  // namespace codeclass
