#pragma once

// Dense square-or-rectangular matrices over any ring type with + - *.
// Intended for ranks up to 4: determinants use cofactor expansion.

#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace logdecay {

template <class T>
using Matrix = std::vector<std::vector<T>>;

template <class T>
std::size_t rows(const Matrix<T>& a) {
  return a.size();
}
template <class T>
std::size_t cols(const Matrix<T>& a) {
  return a.empty() ? 0 : a.front().size();
}

template <class T>
void check_rectangular(const Matrix<T>& a) {
  if (a.empty()) throw InputError("empty matrix");
  for (const auto& row : a)
    if (row.size() != a.front().size() || row.empty()) throw InputError("ragged matrix");
}

template <class T>
void check_square(const Matrix<T>& a) {
  check_rectangular(a);
  if (rows(a) != cols(a)) throw InputError("matrix is not square");
}

template <class T, class F>
auto mat_map(const Matrix<T>& a, F f) -> Matrix<decltype(f(a[0][0]))> {
  Matrix<decltype(f(a[0][0]))> out;
  for (const auto& row : a) {
    out.emplace_back();
    for (const auto& x : row) out.back().push_back(f(x));
  }
  return out;
}

template <class T>
Matrix<T> mat_add(const Matrix<T>& a, const Matrix<T>& b) {
  if (rows(a) != rows(b) || cols(a) != cols(b)) throw InputError("matrix shapes differ");
  Matrix<T> out = a;
  for (std::size_t i = 0; i < rows(a); ++i)
    for (std::size_t j = 0; j < cols(a); ++j) out[i][j] = a[i][j] + b[i][j];
  return out;
}

template <class T>
Matrix<T> mat_sub(const Matrix<T>& a, const Matrix<T>& b) {
  if (rows(a) != rows(b) || cols(a) != cols(b)) throw InputError("matrix shapes differ");
  Matrix<T> out = a;
  for (std::size_t i = 0; i < rows(a); ++i)
    for (std::size_t j = 0; j < cols(a); ++j) out[i][j] = a[i][j] - b[i][j];
  return out;
}

template <class T>
Matrix<T> mat_mul(const Matrix<T>& a, const Matrix<T>& b) {
  check_rectangular(a);
  check_rectangular(b);
  if (cols(a) != rows(b)) throw InputError("matrix shapes do not compose");
  Matrix<T> out(rows(a));
  for (std::size_t i = 0; i < rows(a); ++i) {
    for (std::size_t j = 0; j < cols(b); ++j) {
      T acc = a[i][0] * b[0][j];
      for (std::size_t k = 1; k < cols(a); ++k) acc = acc + a[i][k] * b[k][j];
      out[i].push_back(acc);
    }
  }
  return out;
}

/// Matrix with every entry multiplied on the right by s.
template <class T>
Matrix<T> mat_scale(const Matrix<T>& a, const T& s) {
  return mat_map(a, [&](const T& x) { return x * s; });
}

template <class T>
Matrix<T> minor_of(const Matrix<T>& a, std::size_t skip_r, std::size_t skip_c) {
  Matrix<T> m;
  for (std::size_t i = 0; i < rows(a); ++i) {
    if (i == skip_r) continue;
    m.emplace_back();
    for (std::size_t j = 0; j < cols(a); ++j)
      if (j != skip_c) m.back().push_back(a[i][j]);
  }
  return m;
}

template <class T>
T det(const Matrix<T>& a) {
  check_square(a);
  if (rows(a) == 1) return a[0][0];
  T acc = a[0][0] * det(minor_of(a, 0, 0));
  for (std::size_t j = 1; j < cols(a); ++j) {
    T term = a[0][j] * det(minor_of(a, 0, j));
    acc = j % 2 ? acc - term : acc + term;
  }
  return acc;
}

/// adj(a) with a * adj(a) = det(a) * I. For rank 1 the caller supplies one.
template <class T>
Matrix<T> adjugate(const Matrix<T>& a, const T& one) {
  check_square(a);
  const std::size_t d = rows(a);
  if (d == 1) return {{one}};
  Matrix<T> out(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      T c = det(minor_of(a, j, i));
      out[i].push_back((i + j) % 2 ? -c : c);
    }
  }
  return out;
}

}  // namespace logdecay
