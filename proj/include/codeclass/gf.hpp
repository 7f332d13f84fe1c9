#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace codeclass {

/// Field element encoding: the integer sum(c_i * p^i) of the coefficient
/// vector of the polynomial representative, so 0 is zero and 1 is one.
using Elem = std::uint8_t;

/// Table-driven arithmetic in GF(q), q = p^e <= 256.
///
/// Extension fields are built as GF(p)[x]/(f) with the Conway polynomial f
/// listed in gf.cpp, so element encodings never change between runs. The
/// element x (encoded as p) is therefore a primitive element.
class Field {
 public:
  explicit Field(int q);

  int q() const noexcept { return q_; }
  int p() const noexcept { return p_; }
  int e() const noexcept { return e_; }

  Elem add(Elem a, Elem b) const { return add_[a * q_ + b]; }
  Elem sub(Elem a, Elem b) const { return add_[a * q_ + neg_[b]]; }
  Elem mul(Elem a, Elem b) const { return mul_[a * q_ + b]; }
  Elem neg(Elem a) const { return neg_[a]; }
  /// Throws DivisionByZero for a == 0.
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  /// a^n for n >= 0 (0^0 = 1).
  Elem pow(Elem a, long n) const;
  /// x -> x^p.
  Elem frobenius(Elem a) const { return frob_[a]; }
  /// x -> x^(p^j).
  Elem frobenius(Elem a, int j) const;

  /// Coefficients of the defining polynomial, constant term first, monic
  /// (size e+1). For prime fields this is {0, 1}.
  const std::vector<int>& modulus() const noexcept { return modulus_; }

 private:
  int q_, p_, e_;
  std::vector<int> modulus_;
  std::vector<Elem> add_, mul_, neg_, inv_, frob_;
};

enum class FieldOp { Add, Mul, Neg, Inv, Pow, Frobenius };

/// Dispatch by name: b is the second operand for add/mul, the exponent for
/// pow (b >= 0), the power j of x -> x^(p^j) for frobenius, ignored otherwise.
Elem field_op(const Field& f, FieldOp op, Elem a, long b = 0);
/// "add", "mul", "neg", "inv", "pow", "frobenius".
FieldOp parse_field_op(const std::string& name);

/// Factor q as p^e; returns false if q is not a prime power.
bool prime_power(int q, int& p, int& e);

/// Shared immutable field instance (cached per q). Throws NotPrimePower.
std::shared_ptr<const Field> field(int q);

}  // namespace codeclass
