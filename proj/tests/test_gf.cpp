#include "doctest.h"

#include "codeclass/error.hpp"
#include "codeclass/gf.hpp"

using namespace codeclass;

namespace {

const int kFields[] = {2, 3, 4, 5, 7, 8, 9};

bool throws_kind(ErrorKind kind, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

}  // namespace

TEST_CASE("field axioms hold exhaustively for q <= 9") {
  for (int q : kFields) {
    CAPTURE(q);
    const Field f(q);
    for (int a = 0; a < q; ++a) {
      CHECK(f.add(a, 0) == a);
      CHECK(f.mul(a, 1) == a);
      CHECK(f.mul(a, 0) == 0);
      CHECK(f.add(a, f.neg(a)) == 0);
      if (a != 0) CHECK(f.mul(a, f.inv(a)) == 1);
      for (int b = 0; b < q; ++b) {
        CHECK(f.add(a, b) == f.add(b, a));
        CHECK(f.mul(a, b) == f.mul(b, a));
        CHECK(f.sub(f.add(a, b), b) == a);
        for (int c = 0; c < q; ++c) {
          REQUIRE(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)));
          REQUIRE(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
          REQUIRE(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
        }
      }
    }
  }
}

TEST_CASE("fermat: x^(q-1) = 1 for nonzero x") {
  for (int q : kFields) {
    const Field f(q);
    for (int a = 1; a < q; ++a) CHECK(f.pow(a, q - 1) == 1);
    CHECK(f.pow(0, 0) == 1);
  }
}

TEST_CASE("frobenius is an automorphism of order e fixing the prime field") {
  for (int q : kFields) {
    CAPTURE(q);
    const Field f(q);
    int fixed = 0;
    for (int a = 0; a < q; ++a) {
      CHECK(f.frobenius(a) == f.pow(a, f.p()));
      CHECK(f.frobenius(a, f.e()) == a);
      fixed += f.frobenius(a) == a;
      for (int b = 0; b < q; ++b) {
        CHECK(f.frobenius(f.add(a, b)) == f.add(f.frobenius(a), f.frobenius(b)));
        CHECK(f.frobenius(f.mul(a, b)) == f.mul(f.frobenius(a), f.frobenius(b)));
      }
    }
    CHECK(fixed == f.p());
  }
}

TEST_CASE("field_make examples") {
  const Field f4(4);
  CHECK(f4.p() == 2);
  CHECK(f4.e() == 2);
  CHECK(throws_kind(ErrorKind::NotPrimePower, [] { Field f(6); }));
  CHECK(throws_kind(ErrorKind::NotPrimePower, [] { field(12); }));

  const Field f9(9);
  int fixed = 0;
  for (int a = 0; a < 9; ++a) fixed += f9.frobenius(a) == a;
  CHECK(fixed == 3);
}

TEST_CASE("field_op examples") {
  const Field f4(4);
  // omega and omega^2 are the two elements outside GF(2).
  CHECK(field_op(f4, FieldOp::Mul, 2, 3) == 1);
  CHECK(f4.mul(2, 2) == 3);

  const Field f5(5);
  CHECK(field_op(f5, FieldOp::Add, 3, 4) == 2);
  CHECK(field_op(f5, parse_field_op("pow"), 2, 4) == 1);
  CHECK(field_op(f5, parse_field_op("neg"), 2) == 3);

  const Field f8(8);
  CHECK(throws_kind(ErrorKind::DivisionByZero, [&] { field_op(f8, FieldOp::Inv, 0); }));
  CHECK(throws_kind(ErrorKind::InvalidArgument, [] { parse_field_op("sqrt"); }));
}

TEST_CASE("encodings are stable: x is primitive") {
  for (int q : {4, 8, 9}) {
    const Field f(q);
    const Elem x = static_cast<Elem>(f.p());
    int order = 1;
    while (f.pow(x, order) != 1) ++order;
    CHECK(order == q - 1);
  }
}
