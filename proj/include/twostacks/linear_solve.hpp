#pragma once

#include "twostacks/numeric.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace twostacks {

/// Dense integer matrix, row-major.
class IntegerMatrix {
 public:
  IntegerMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Integer& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  void swap_rows(std::size_t a, std::size_t b) {
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }

 private:
  std::size_t rows_, cols_;
  std::vector<Integer> data_;
};

/// Solves A x = b exactly for square integer A using fraction-free (Bareiss)
/// elimination; every intermediate division is exact. Returns nullopt when A
/// is singular.
inline std::optional<std::vector<Rational>> solve_exact(IntegerMatrix a, std::vector<Integer> b) {
  const std::size_t n = a.rows();
  IntegerMatrix m(n, n + 1);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) m(r, c) = std::move(a(r, c));
    m(r, n) = std::move(b[r]);
  }

  Integer prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && m(pivot, k) == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    if (pivot != k) m.swap_rows(pivot, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j <= n; ++j) {
        m(i, j) = (m(k, k) * m(i, j) - m(i, k) * m(k, j)) / prev;
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }

  std::vector<Rational> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Rational acc(m(i, n));
    for (std::size_t j = i + 1; j < n; ++j) acc -= Rational(m(i, j)) * x[j];
    x[i] = acc / Rational(m(i, i));
  }
  return x;
}

/// Some solution of A x = b when A is singular but the system is consistent:
/// reduced row echelon form over the rationals, with every free unknown set
/// to 0. Returns nullopt when the system is inconsistent.
inline std::optional<std::vector<Rational>> solve_consistent(const IntegerMatrix& a, const std::vector<Integer>& b) {
  const std::size_t rows = a.rows(), cols = a.cols();
  std::vector<std::vector<Rational>> m(rows, std::vector<Rational>(cols + 1));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m[r][c] = a(r, c);
    m[r][cols] = b[r];
  }
  std::vector<std::size_t> pivot_cols;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[rank]);
    const Rational inv = 1 / m[rank][c];
    for (std::size_t j = c; j <= cols; ++j) m[rank][j] *= inv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || m[r][c] == 0) continue;
      const Rational f = m[r][c];
      for (std::size_t j = c; j <= cols; ++j) m[r][j] -= f * m[rank][j];
    }
    pivot_cols.push_back(c);
    ++rank;
  }
  for (std::size_t r = rank; r < rows; ++r)
    if (m[r][cols] != 0) return std::nullopt;
  std::vector<Rational> x(cols);
  for (std::size_t r = 0; r < rank; ++r) x[pivot_cols[r]] = m[r][cols];
  return x;
}

}  // namespace twostacks
