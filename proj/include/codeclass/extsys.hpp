#pragma once

#include <climits>
#include <memory>
#include <string>
#include <vector>

#include "codeclass/codemodel.hpp"

namespace codeclass {

/// Allowed weights {a*delta, (a+1)*delta, ..., b*delta}.
struct SpectrumBlock {
  int delta = 1;
  int a = 0;
  int b = 0;
  bool operator==(const SpectrumBlock&) const = default;
};

/// Ordered, pairwise disjoint weight blocks.
class WeightSpectrum {
 public:
  WeightSpectrum() = default;
  /// Throws SpectrumEmpty for no blocks, BlocksOverlap unless b_{i-1} delta_{i-1} < a_i delta_i.
  explicit WeightSpectrum(std::vector<SpectrumBlock> blocks);

  /// Maximal runs of consecutive multiples of the gcd of the list.
  static WeightSpectrum from_weights(std::vector<int> weights);
  /// Multiples of delta in [lo, hi], lo >= 1, as a single block.
  static WeightSpectrum divisible(int delta, int lo, int hi);
  /// Text form "delta:a:b,delta:a:b".
  static WeightSpectrum parse(const std::string& text);

  const std::vector<SpectrumBlock>& blocks() const noexcept { return blocks_; }
  bool empty() const noexcept { return blocks_.empty(); }
  /// gcd of all block deltas.
  int delta() const;
  int min_weight() const { return blocks_.front().a * blocks_.front().delta; }
  int max_weight() const { return blocks_.back().b * blocks_.back().delta; }
  bool contains(int w) const;
  std::vector<int> weights() const;
  /// One block with the global delta covering min_weight..max_weight.
  SpectrumBlock hull() const;
  std::string to_string() const;
  /// Explicit weight list "w1,w2,...".
  std::string weights_string() const;
  bool operator==(const WeightSpectrum&) const = default;

 private:
  std::vector<SpectrumBlock> blocks_;
};

enum class VarKind { Point, Slack, BlockSlack, BlockChoice, Indicator, Generic };
enum class Sense { Eq, Le, Ge };
enum class RowKind { Line, Hyperplane, BlockLink, BlockChoice, IndicatorUpper, IndicatorLower, Generic };

constexpr int kUnbounded = INT_MAX;

struct Variable {
  std::string name;
  int lo = 0;
  int hi = 0;
  VarKind kind = VarKind::Generic;
  /// Point or hyperplane index for structured variables, -1 otherwise.
  int index = -1;
  /// Block number for BlockSlack/BlockChoice.
  int block = -1;
  /// Original value = stored value + offset.
  int offset = 0;
};

struct Term {
  int var;
  long coef;
};

struct Row {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::Eq;
  long rhs = 0;
  RowKind kind = RowKind::Generic;
  int index = -1;
};

/// Bounded integer linear system; variables may be grouped for branching.
struct LinearSystem {
  std::vector<Variable> vars;
  std::vector<Row> rows;
  /// Disjoint variable groups, each one line equation over point variables.
  std::vector<std::vector<int>> groups;

  int add_var(Variable v);
  int add_row(Row r);
  /// Index of the variable with this name, or -1.
  int find_var(const std::string& name) const;
  /// True iff every row holds and every value lies in its bounds.
  bool satisfied(const std::vector<int>& values) const;
};

/// Lattice system whose solutions are the extensions of M over PG(k-1,q) to
/// multisets M' over PG(k,q) with M'(<e_{k+1}>) = r, projection of M' through
/// <e_{k+1}> equal to M, multiplicities bounded by lambda and all hyperplane
/// weights in the hull block of the spectrum.
///
/// Variables:
///   x_P for every point of PG(k,q); x_{<e_{k+1}>} is fixed to r.
///   y_H in [0, b-a] per hyperplane (single block mode).
/// Rows:
///   sum_lambda x_{<(u|lambda)>} = M(<u>) for every point <u> of PG(k-1,q).
///   sum_{P in H} x_P + delta y_H = (n + r) - a delta for every hyperplane H.
/// With systematic bounds the unit points x_{<e_i>} >= 1 are stored shifted
/// by one (offset 1), the constants of the affected rows reduced accordingly.
struct ExtensionSystem {
  LinearSystem sys;
  std::shared_ptr<const Geometry> geometry;
  std::shared_ptr<const Geometry> base;
  int n = 0;
  int r = 0;
  WeightSpectrum spectrum;
  bool gapped = false;
  bool indicators = false;
  /// Variable of each point of PG(k,q).
  std::vector<int> point_var;
  /// Upper multiplicity bound of each point of PG(k,q).
  std::vector<int> lambda;
  /// Hyperplanes of PG(k,q) that carry a weight equation.
  std::vector<int> hyperplanes;

  /// Decode the point variables of a solution into M'.
  PointMultiset decode(const std::vector<int>& values) const;
};

struct ExtensionOptions {
  /// Uniform bound, or kUnbounded to use only the line totals.
  int lambda = kUnbounded;
  /// Optional per-point bounds over PG(k,q); overrides lambda when nonempty.
  std::vector<int> lambda_per_point;
  bool systematic = true;
  /// Fraction of hyperplane equations kept, in (0, 1].
  double hyperplane_fraction = 1.0;
};

ExtensionSystem build_extension_system(const PointMultiset& m, int r, const WeightSpectrum& spectrum,
                                       const ExtensionOptions& options = {});

/// Adds binary u_P and x_P <= lambda_P u_P, x_P >= r u_P for every free point variable.
ExtensionSystem linearize_min_extension(const ExtensionSystem& e, int r);

/// Restricts to one representative per orbit of the scalings
/// <(u|t)> -> <(u|ct)>, c != 0, which fix M, the apex and the unit points.
/// On the line through the apex and the base point u0 of largest free total,
/// x_{<(u0|1)>} >= x_{<(u0|t)>} for every t != 0.
ExtensionSystem break_scaling_symmetry(const ExtensionSystem& e);

/// True iff c cannot be written as a sum of q values in {0} u [r, lambda].
bool preprocess_line_feasibility(int q, int r, int lambda, int c);

/// Replaces every single-block weight equation by the block form
///   sum_i delta_i y^i + sum_{P in H} x_P + sum_i a_i delta_i z^i = n + r,
///   y^i <= (b_i - a_i) z^i, sum_i z^i = 1, z^i binary.
ExtensionSystem apply_gap_reformulation(const ExtensionSystem& e, const WeightSpectrum& spectrum);

}  // namespace codeclass
