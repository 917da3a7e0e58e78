#pragma once

// Exact determinants and positivity tests for small Gaussian-integer matrices.

#include <array>
#include <cstddef>
#include <vector>

#include "hsl/exactnum.hpp"
#include "hsl/matrix.hpp"

namespace hsl {

/// Determinant by Gaussian elimination over Q(i).
inline GaussRat determinant(const Matrix<GaussRat>& m) {
  if (!m.square()) throw DimensionMismatch("determinant of a non-square matrix");
  Matrix<GaussRat> a = m;
  const std::size_t n = a.rows();
  GaussRat det(GaussInt(1));
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a(pivot, col).is_zero()) ++pivot;
    if (pivot == n) return GaussRat();
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      det = -det;
    }
    det *= a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a(r, col).is_zero()) continue;
      const GaussRat f = a(r, col) / a(col, col);
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
    }
  }
  return det;
}

inline GaussInt determinant(const Matrix<GaussInt>& m) {
  const GaussRat d = determinant(m.map([](const GaussInt& z) { return GaussRat(z); }));
  return d.num();  // integral: the determinant of an integral matrix is integral
}

template <class Int>
Matrix<BasicGaussInt<Int>> principal_submatrix(const Matrix<BasicGaussInt<Int>>& m,
                                               const std::vector<std::size_t>& idx) {
  Matrix<BasicGaussInt<Int>> out(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c) out(r, c) = m(idx[r], idx[c]);
  return out;
}

template <class Int>
bool is_hermitian(const Matrix<BasicGaussInt<Int>>& m) {
  if (!m.square()) return false;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = r; c < m.cols(); ++c)
      if (m(r, c) != conj(m(c, r))) return false;
  return true;
}

/// Positive semidefiniteness of a Hermitian matrix: every principal minor is >= 0.
inline bool is_psd(const Matrix<GaussInt>& m) {
  const std::size_t n = m.rows();
  for (unsigned mask = 1; mask < (1U << n); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (1U << k)) idx.push_back(k);
    if (determinant(principal_submatrix(m, idx)).re < 0) return false;
  }
  return true;
}

/// Leading principal minors det(m[0..k, 0..k]) for k = 0..n-1 (real for Hermitian input).
inline std::vector<BigInt> leading_minors(const Matrix<GaussInt>& m) {
  std::vector<BigInt> out;
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < m.rows(); ++k) {
    idx.push_back(k);
    out.push_back(determinant(principal_submatrix(m, idx)).re);
  }
  return out;
}

namespace detail {

// Determinant of the principal submatrix on the index set `cols`, by Laplace
// expansion over column subsets in checked 128-bit arithmetic.
// minors[mask] = det of (first popcount(mask) indices of cols as rows) x (mask as columns).
inline GaussInt128 principal_det_small(const Matrix<GaussInt64>& m, unsigned cols) {
  std::array<std::size_t, 6> idx{};
  std::size_t k = 0;
  for (std::size_t c = 0; c < m.rows(); ++c)
    if (cols & (1U << c)) idx[k++] = c;
  std::array<GaussInt128, 64> minors{};
  minors[0] = GaussInt128{1, 0};
  for (unsigned mask = 1; mask < (1U << k); ++mask) {
    const std::size_t row = idx[static_cast<std::size_t>(__builtin_popcount(mask)) - 1];
    GaussInt128 acc;
    bool plus = true;
    for (std::size_t c = k; c-- > 0;) {
      if (!(mask & (1U << c))) continue;
      // expansion along the last used row; the rightmost selected column carries '+'
      const GaussInt128 term = gauss_cast<int128>(m(row, idx[c])) * minors[mask & ~(1U << c)];
      acc = plus ? acc + term : acc - term;
      plus = !plus;
    }
    minors[mask] = acc;
  }
  return minors[(1U << k) - 1];
}

}  // namespace detail

/// Exact determinant in checked 128-bit arithmetic, for the small (n <= 6)
/// index matrices scanned in bulk.
inline GaussInt128 determinant_small(const Matrix<GaussInt64>& m) {
  if (!m.square()) throw DimensionMismatch("determinant of a non-square matrix");
  if (m.rows() > 6) throw DimensionMismatch("determinant_small supports n <= 6");
  if (m.rows() == 0) return {1, 0};
  return detail::principal_det_small(m, (1U << m.rows()) - 1);
}

/// Positive semidefiniteness of a small Hermitian matrix: every principal minor >= 0.
inline bool is_psd_small(const Matrix<GaussInt64>& m) {
  if (m.rows() > 6) throw DimensionMismatch("is_psd_small supports n <= 6");
  for (unsigned mask = 1; mask < (1U << m.rows()); ++mask)
    if (detail::principal_det_small(m, mask).re < 0) return false;
  return true;
}

}  // namespace hsl
