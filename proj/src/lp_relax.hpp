#pragma once

#include <cstdint>
#include <vector>

#include "codeclass/extsys.hpp"

namespace codeclass::detail {

/// Continuous relaxation of a LinearSystem under varying variable bounds.
/// Phase-one bounded simplex on [A | -I] with an explicit dense basis
/// inverse; the basis is kept between calls as a warm start.
///
/// feasible() returns false only when a Farkas multiplier vector has been
/// verified against the current box in extended precision, so a false is a
/// proof that no real (hence no integer) point exists. Iteration limits and
/// numerical trouble yield true. When the last relaxed point already lies
/// in the new box no pivoting is done.
class LpRelaxation {
 public:
  explicit LpRelaxation(const LinearSystem& sys);

  bool feasible(const std::vector<int>& lo, const std::vector<int>& hi);

  /// Structural values of the last feasible relaxation.
  const std::vector<double>& point() const { return point_; }
  std::uint64_t pivots() const { return pivots_; }

 private:
  enum class At : std::uint8_t { Basic, Lower, Upper };
  struct Entry {
    int row;
    double coef;
  };

  double value_of_nonbasic(int j) const;
  void refactor();
  void compute_basic_values();
  bool certify(const std::vector<double>& pi) const;
  void column_into(int j, std::vector<double>& alpha) const;
  void pivot(int row, int entering, const std::vector<double>& alpha);

  int m_ = 0;
  int n_ = 0;
  std::vector<std::vector<Entry>> cols_;  // structural columns; logical i is -e_i
  std::vector<double> lower_, upper_;     // over n_ + m_ columns
  std::vector<At> status_;
  std::vector<int> head_;                 // basic column of each row
  std::vector<double> binv_;              // m_ x m_, row major
  std::vector<double> xb_;
  std::vector<double> point_;
  std::vector<std::size_t> scratch_;
  bool point_valid_ = false;  // point_ satisfies every row
  int since_refactor_ = 0;
  std::uint64_t pivots_ = 0;
};

}  // namespace codeclass::detail
