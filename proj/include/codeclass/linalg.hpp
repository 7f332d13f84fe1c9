#pragma once

#include <optional>
#include <span>
#include <vector>

#include "codeclass/gf.hpp"

namespace codeclass {

/// Dense row-major matrix over a finite field.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<Elem> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0) {}

  Elem& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  Elem operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  static Matrix identity(int n);
  bool operator==(const Matrix&) const = default;
};

int rank(const Field& f, Matrix m);

/// Inverse of a square matrix, or nullopt if singular.
std::optional<Matrix> inverse(const Field& f, const Matrix& m);

Matrix multiply(const Field& f, const Matrix& a, const Matrix& b);

/// out = m * v.
void apply(const Field& f, const Matrix& m, std::span<const Elem> v, std::span<Elem> out);

/// Scale v so its first nonzero entry is 1; returns false if v is zero.
bool normalize(const Field& f, std::span<Elem> v);

}  // namespace codeclass
