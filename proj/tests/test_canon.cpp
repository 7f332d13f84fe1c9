#include "doctest.h"

#include <map>
#include <random>
#include <set>

#include "codeclass/canon.hpp"
#include "codeclass/error.hpp"
#include "oracles.hpp"

using namespace codeclass;

namespace {

Matrix random_invertible(int k, int q, std::mt19937& rng) {
  const Field& f = *field(q);
  std::uniform_int_distribution<int> d(0, q - 1);
  for (;;) {
    Matrix a(k, k);
    for (auto& x : a.data) x = static_cast<Elem>(d(rng));
    if (rank(f, a) == k) return a;
  }
}

}  // namespace

TEST_CASE("acting group orders") {
  CHECK(acting_group_order(3, 2, Equivalence::Linear) == 168);
  CHECK(acting_group_order(3, 4, Equivalence::Linear) == 181440);
  CHECK(acting_group_order(3, 4, Equivalence::Semilinear) == 362880);
  CHECK(acting_group_order(4, 2, Equivalence::Semilinear) == 20160);
}

TEST_CASE("full plane PG(2,2) is stabilized by the whole group") {
  auto g = geometry(3, 2);
  const PointMultiset m(g, std::vector<int>(7, 1));
  CHECK(automorphism_group_order(m, Equivalence::Linear) == 168);
  CHECK(automorphism_group_order(m, Equivalence::Semilinear) == 168);
  const PointMultiset m4(geometry(3, 4), std::vector<int>(21, 3));
  CHECK(automorphism_group_order(m4) == 362880);
}

TEST_CASE("non-spanning multisets are rejected") {
  PointMultiset m(3, 3);
  m.set(0, 2);
  m.set(1, 1);
  bool thrown = false;
  try {
    canonical_form(m);
  } catch (const Error& e) {
    thrown = e.kind() == ErrorKind::NotSpanning;
  }
  CHECK(thrown);
}

TEST_CASE("canonical form is invariant under random collineations") {
  std::mt19937 rng(17);
  for (auto [k, q] : {std::pair{3, 4}, {3, 8}, {4, 3}, {3, 9}, {5, 2}}) {
    const Field& f = *field(q);
    for (int trial = 0; trial < 6; ++trial) {
      const PointMultiset m = oracle::random_spanning(k, q, 3, rng, 0.3);
      const CanonicalForm c = canonical_form(m);
      CHECK(apply_collineation(m, c.transform, c.frobenius_power).mult() == c.canonical);
      CHECK(acting_group_order(k, q, Equivalence::Semilinear) % c.aut_order == 0);
      for (int j = 0; j < 12; ++j) {
        const PointMultiset img = apply_collineation(m, random_invertible(k, q, rng), j % f.e());
        const CanonicalForm ci = canonical_form(img);
        CHECK(ci.canonical == c.canonical);
        CHECK(ci.certificate == c.certificate);
        CHECK(ci.aut_order == c.aut_order);
        CHECK(weight_distribution(img) == weight_distribution(m));
      }
    }
  }
}

TEST_CASE("coordinate permutations give the same canonical vector") {
  std::mt19937 rng(23);
  const PointMultiset m = oracle::random_spanning(4, 3, 2, rng, 0.4);
  Matrix perm(4, 4);
  perm(0, 2) = perm(1, 0) = perm(2, 3) = perm(3, 1) = 1;
  CHECK(canonical_form(transform(m, perm)).canonical == canonical_form(m).canonical);
}

TEST_CASE("canonical equality matches explicit orbits; orbit times stabilizer is the group order") {
  std::mt19937 rng(31);
  for (auto [k, q] : {std::pair{3, 2}, {3, 3}, {4, 2}, {3, 4}}) {
    for (bool semi : {false, true}) {
      if (semi && q != 4) continue;
      const Equivalence kind = semi ? Equivalence::Semilinear : Equivalence::Linear;
      const oracle::CollineationGroup group(k, q, semi);
      CHECK(group.order() == acting_group_order(k, q, kind));
      std::map<std::vector<int>, std::vector<int>> by_oracle;
      for (int trial = 0; trial < 25; ++trial) {
        CAPTURE(k);
        CAPTURE(q);
        const PointMultiset m = oracle::random_spanning(k, q, 2, rng, trial % 2 ? 0.3 : 0.6);
        const auto [least, orbit] = group.orbit(m.mult());
        const CanonicalForm c = canonical_form(m, kind);
        CHECK(orbit * c.aut_order == group.order());
        auto [it, fresh] = by_oracle.emplace(least, c.canonical);
        if (!fresh) CHECK(it->second == c.canonical);

        // a random image and the library oracle agree as well
        const auto& perm = group.permutations()[rng() % group.permutations().size()];
        const PointMultiset img(m.geometry_ptr(), group.image(m.mult(), perm));
        CHECK(canonical_form(img, kind).canonical == c.canonical);
        if (k == 3 && q <= 3) {
          const OracleResult lib = orbit_canonical_oracle(m, kind);
          CHECK(lib.minimum == least);
          CHECK(lib.orbit_size == orbit);
          CHECK(lib.aut_order == c.aut_order);
        }
      }
      // distinct oracle classes have distinct canonical vectors
      std::set<std::vector<int>> canon;
      for (const auto& [least, cv] : by_oracle) canon.insert(cv);
      CHECK(canon.size() == by_oracle.size());
    }
  }
}

TEST_CASE("linear and semilinear classes differ over GF(4)") {
  // A multiset fixed by no field automorphism still has the same semilinear
  // class as its Frobenius image, but in general a different linear class.
  std::mt19937 rng(41);
  int split = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const PointMultiset m = oracle::random_spanning(3, 4, 2, rng, 0.35);
    const PointMultiset fm = apply_collineation(m, Matrix::identity(3), 1);
    CHECK(canonical_form(fm).canonical == canonical_form(m).canonical);
    split += canonical_form(fm, Equivalence::Linear).canonical != canonical_form(m, Equivalence::Linear).canonical;
  }
  CHECK(split > 0);
}
