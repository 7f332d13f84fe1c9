#include "codeclass/gf.hpp"

#include <map>
#include <mutex>
#include <string>

#include "codeclass/error.hpp"

namespace codeclass {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotPrimePower: return "NotPrimePower";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::ZeroColumn: return "ZeroColumn";
    case ErrorKind::NotSpanning: return "NotSpanning";
    case ErrorKind::SpectrumEmpty: return "SpectrumEmpty";
    case ErrorKind::InconsistentBounds: return "InconsistentBounds";
    case ErrorKind::UnboundedVariable: return "UnboundedVariable";
    case ErrorKind::BlocksOverlap: return "BlocksOverlap";
    case ErrorKind::BlocksRequired: return "BlocksRequired";
    case ErrorKind::GroupTooLarge: return "GroupTooLarge";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

// Conway polynomials C(p,e), coefficients from x^0 up to x^e.
const std::map<std::pair<int, int>, std::vector<int>>& conway_table() {
  static const std::map<std::pair<int, int>, std::vector<int>> table = {
      {{2, 2}, {1, 1, 1}},                    // x^2+x+1
      {{2, 3}, {1, 1, 0, 1}},                 // x^3+x+1
      {{2, 4}, {1, 1, 0, 0, 1}},              // x^4+x+1
      {{2, 5}, {1, 0, 1, 0, 0, 1}},           // x^5+x^2+1
      {{2, 6}, {1, 1, 0, 1, 1, 0, 1}},        // x^6+x^4+x^3+x+1
      {{2, 7}, {1, 1, 0, 0, 0, 0, 0, 1}},     // x^7+x+1
      {{2, 8}, {1, 0, 1, 1, 1, 0, 0, 0, 1}},  // x^8+x^4+x^3+x^2+1
      {{3, 2}, {2, 2, 1}},                    // x^2+2x+2
      {{3, 3}, {1, 2, 0, 1}},                 // x^3+2x+1
      {{3, 4}, {2, 0, 0, 2, 1}},              // x^4+2x^3+2
      {{3, 5}, {1, 2, 0, 0, 0, 1}},           // x^5+2x+1
      {{5, 2}, {2, 4, 1}},                    // x^2+4x+2
      {{5, 3}, {3, 3, 0, 1}},                 // x^3+3x+3
      {{7, 2}, {3, 6, 1}},                    // x^2+6x+3
      {{11, 2}, {2, 7, 1}},                   // x^2+7x+2
      {{13, 2}, {2, 12, 1}},                  // x^2+12x+2
  };
  return table;
}

}  // namespace

bool prime_power(int q, int& p, int& e) {
  if (q < 2) return false;
  int d = 2;
  while (d * d <= q && q % d != 0) ++d;
  if (q % d != 0) d = q;
  p = d;
  e = 0;
  int rest = q;
  while (rest % p == 0) {
    rest /= p;
    ++e;
  }
  return rest == 1;
}

Field::Field(int q) : q_(q) {
  if (!prime_power(q, p_, e_)) throw Error(ErrorKind::NotPrimePower, std::to_string(q));
  if (q > 256) throw Error(ErrorKind::TooLarge, "field size " + std::to_string(q) + " > 256");
  if (e_ == 1) {
    modulus_ = {0, 1};
  } else {
    auto it = conway_table().find({p_, e_});
    if (it == conway_table().end())
      throw Error(ErrorKind::TooLarge, "no defining polynomial for GF(" + std::to_string(q) + ")");
    modulus_ = it->second;
  }

  auto digits = [&](int a) {
    std::vector<int> c(e_, 0);
    for (int i = 0; i < e_; ++i, a /= p_) c[i] = a % p_;
    return c;
  };
  auto encode = [&](const std::vector<int>& c) {
    int a = 0;
    for (int i = e_ - 1; i >= 0; --i) a = a * p_ + c[i];
    return a;
  };

  const auto n = static_cast<std::size_t>(q_);
  add_.assign(n * n, 0);
  mul_.assign(n * n, 0);
  neg_.assign(n, 0);
  inv_.assign(n, 0);
  frob_.assign(n, 0);

  for (int a = 0; a < q_; ++a) {
    auto ca = digits(a);
    std::vector<int> cn(e_);
    for (int i = 0; i < e_; ++i) cn[i] = (p_ - ca[i]) % p_;
    neg_[a] = static_cast<Elem>(encode(cn));
    for (int b = 0; b < q_; ++b) {
      auto cb = digits(b);
      std::vector<int> cs(e_);
      for (int i = 0; i < e_; ++i) cs[i] = (ca[i] + cb[i]) % p_;
      add_[a * q_ + b] = static_cast<Elem>(encode(cs));

      // schoolbook product followed by reduction modulo the monic modulus
      std::vector<int> prod(2 * e_ - 1, 0);
      for (int i = 0; i < e_; ++i)
        for (int j = 0; j < e_; ++j) prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % p_;
      for (int d = 2 * e_ - 2; d >= e_; --d) {
        int c = prod[d];
        if (c == 0) continue;
        for (int i = 0; i <= e_; ++i)
          prod[d - e_ + i] = ((prod[d - e_ + i] - c * modulus_[i]) % p_ + p_) % p_;
      }
      prod.resize(e_);
      mul_[a * q_ + b] = static_cast<Elem>(encode(prod));
    }
  }
  for (int a = 1; a < q_; ++a)
    for (int b = 1; b < q_; ++b)
      if (mul_[a * q_ + b] == 1) inv_[a] = static_cast<Elem>(b);
  for (int a = 0; a < q_; ++a) frob_[a] = pow(static_cast<Elem>(a), p_);
}

Elem Field::inv(Elem a) const {
  if (a == 0) throw Error(ErrorKind::DivisionByZero, "inverse of 0 in GF(" + std::to_string(q_) + ")");
  return inv_[a];
}

Elem Field::pow(Elem a, long n) const {
  Elem result = 1;
  Elem base = a;
  while (n > 0) {
    if (n & 1) result = mul(result, base);
    base = mul(base, base);
    n >>= 1;
  }
  return result;
}

Elem Field::frobenius(Elem a, int j) const {
  for (int i = 0; i < j; ++i) a = frob_[a];
  return a;
}

Elem field_op(const Field& f, FieldOp op, Elem a, long b) {
  switch (op) {
    case FieldOp::Add: return f.add(a, static_cast<Elem>(b));
    case FieldOp::Mul: return f.mul(a, static_cast<Elem>(b));
    case FieldOp::Neg: return f.neg(a);
    case FieldOp::Inv: return f.inv(a);
    case FieldOp::Pow: return f.pow(a, b);
    case FieldOp::Frobenius: return f.frobenius(a, static_cast<int>(b));
  }
  throw Error(ErrorKind::InvalidArgument, "unknown field operation");
}

FieldOp parse_field_op(const std::string& name) {
  static const std::map<std::string, FieldOp> names = {{"add", FieldOp::Add}, {"mul", FieldOp::Mul},
                                                       {"neg", FieldOp::Neg}, {"inv", FieldOp::Inv},
                                                       {"pow", FieldOp::Pow}, {"frobenius", FieldOp::Frobenius}};
  auto it = names.find(name);
  if (it == names.end()) throw Error(ErrorKind::InvalidArgument, "unknown field operation " + name);
  return it->second;
}

std::shared_ptr<const Field> field(int q) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const Field>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;
  auto f = std::make_shared<const Field>(q);
  cache.emplace(q, f);
  return f;
}

}  // namespace codeclass
