#include "codeclass/linalg.hpp"

#include <utility>

namespace codeclass {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

int rank(const Field& f, Matrix m) {
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int pivot = -1;
    for (int i = r; i < m.rows; ++i)
      if (m(i, c) != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    for (int j = 0; j < m.cols; ++j) std::swap(m(r, j), m(pivot, j));
    Elem s = f.inv(m(r, c));
    for (int j = 0; j < m.cols; ++j) m(r, j) = f.mul(m(r, j), s);
    for (int i = 0; i < m.rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      Elem t = m(i, c);
      for (int j = 0; j < m.cols; ++j) m(i, j) = f.sub(m(i, j), f.mul(t, m(r, j)));
    }
    ++r;
  }
  return r;
}

std::optional<Matrix> inverse(const Field& f, const Matrix& m) {
  const int n = m.rows;
  Matrix a = m;
  Matrix inv = Matrix::identity(n);
  for (int c = 0; c < n; ++c) {
    int pivot = -1;
    for (int i = c; i < n; ++i)
      if (a(i, c) != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) return std::nullopt;
    for (int j = 0; j < n; ++j) {
      std::swap(a(c, j), a(pivot, j));
      std::swap(inv(c, j), inv(pivot, j));
    }
    Elem s = f.inv(a(c, c));
    for (int j = 0; j < n; ++j) {
      a(c, j) = f.mul(a(c, j), s);
      inv(c, j) = f.mul(inv(c, j), s);
    }
    for (int i = 0; i < n; ++i) {
      if (i == c || a(i, c) == 0) continue;
      Elem t = a(i, c);
      for (int j = 0; j < n; ++j) {
        a(i, j) = f.sub(a(i, j), f.mul(t, a(c, j)));
        inv(i, j) = f.sub(inv(i, j), f.mul(t, inv(c, j)));
      }
    }
  }
  return inv;
}

Matrix multiply(const Field& f, const Matrix& a, const Matrix& b) {
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.cols; ++j) {
      Elem s = 0;
      for (int t = 0; t < a.cols; ++t) s = f.add(s, f.mul(a(i, t), b(t, j)));
      out(i, j) = s;
    }
  return out;
}

void apply(const Field& f, const Matrix& m, std::span<const Elem> v, std::span<Elem> out) {
  for (int i = 0; i < m.rows; ++i) {
    Elem s = 0;
    for (int j = 0; j < m.cols; ++j) s = f.add(s, f.mul(m(i, j), v[j]));
    out[i] = s;
  }
}

bool normalize(const Field& f, std::span<Elem> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    if (v[i] != 1) {
      Elem s = f.inv(v[i]);
      for (std::size_t j = i; j < v.size(); ++j) v[j] = f.mul(v[j], s);
    }
    return true;
  }
  return false;
}

}  // namespace codeclass
