#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codeclass/codemodel.hpp"

namespace codeclass {

enum class Equivalence {
  Linear,      ///< GL(k,q) acting on points
  Semilinear,  ///< GammaL(k,q): linear maps composed with field automorphisms
};

const char* to_string(Equivalence kind);
Equivalence parse_equivalence(const std::string& s);

/// Order of GL(k,q), times e for Semilinear. Automorphism group orders are
/// reported as subgroups of this group, i.e. including the q-1 scalars.
std::uint64_t acting_group_order(int k, int q, Equivalence kind);

struct CanonicalForm {
  /// Distinguished representative of the orbit, over the fixed point order.
  std::vector<int> canonical;
  std::uint64_t aut_order = 0;
  /// Hex digest of (k, q, canonical).
  std::string certificate;
  /// canonical = frobenius^frobenius_power(transform * M).
  Matrix transform;
  int frobenius_power = 0;
  /// Leaves of the pruned search tree that were evaluated.
  std::uint64_t leaves = 0;
};

/// Canonical representative and stabilizer order of M.
///
/// The search walks ordered projective frames (k independent points plus a
/// unit point in general position) chosen by individualization and
/// refinement of the point/hyperplane incidence structure colored by
/// multiplicities. Each frame fixes a collineation onto the standard frame;
/// the canonical vector is the lexicographically smallest image. Subtrees
/// equivalent under automorphisms found along the way are pruned; the
/// stabilizer order is the product of the orbit lengths along the first path.
CanonicalForm canonical_form(const PointMultiset& m, Equivalence kind = Equivalence::Semilinear);

std::uint64_t automorphism_group_order(const PointMultiset& m, Equivalence kind = Equivalence::Semilinear);

std::string certificate_of(int k, int q, const std::vector<int>& canonical);

struct OracleResult {
  std::vector<int> minimum;
  std::uint64_t orbit_size = 0;
  std::uint64_t aut_order = 0;
};

/// Lexicographically minimal image over an explicit enumeration of the
/// acting group. Throws GroupTooLarge above 10^7 projective elements.
OracleResult orbit_canonical_oracle(const PointMultiset& m, Equivalence kind = Equivalence::Semilinear);

/// Image of M under x -> frobenius^j(a x).
PointMultiset apply_collineation(const PointMultiset& m, const Matrix& a, int frobenius_power);

}  // namespace codeclass
