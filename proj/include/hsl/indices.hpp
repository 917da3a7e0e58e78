#pragma once

// Canonical enumeration of doubled indices T (n x n, Hermitian, even
// nonnegative diagonal) with bounded trace.
//
// Order: diagonals in descending lexicographic order; then the strictly lower
// entries T[1][0], T[2][0], T[2][1], T[3][0], ... with the first one varying
// slowest, each over the Gaussian integers allowed by Cauchy-Schwarz,
// |T[k][j]|^2 <= T[j][j] T[k][k], in (re, im) order. The upper triangle is the
// conjugate.

#include <cstdint>
#include <utility>
#include <vector>

#include "hsl/error.hpp"
#include "hsl/exactnum.hpp"
#include "hsl/matrix.hpp"

namespace hsl {

/// Even diagonals d with d_k <= max_diag and sum <= trace_bound, descending-lex.
inline std::vector<std::vector<std::int64_t>> index_diagonals(std::size_t n, std::int64_t trace_bound,
                                                              std::int64_t max_diag) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> d(n, 0);
  auto rec = [&](auto&& self, std::size_t k, std::int64_t left) -> void {
    if (k == n) {
      out.push_back(d);
      return;
    }
    const std::int64_t top = std::min(left, max_diag);
    for (std::int64_t v = top - (top % 2); v >= 0; v -= 2) {
      d[k] = v;
      self(self, k + 1, left - v);
    }
  };
  if (trace_bound >= 0 && max_diag >= 0) rec(rec, 0, trace_bound);
  return out;
}

/// Lower-triangle positions in enumeration order.
inline std::vector<std::pair<std::size_t, std::size_t>> lower_positions(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t k = 1; k < n; ++k)
    for (std::size_t j = 0; j < k; ++j) out.emplace_back(k, j);
  return out;
}

/// Calls visit(T) for every index on one diagonal, in canonical order.
/// visit returns false to stop; the function then returns false as well.
template <class Visit>
bool for_each_index_with_diagonal(const std::vector<std::int64_t>& d, Visit&& visit) {
  const std::size_t n = d.size();
  Matrix<GaussInt64> t(n, n);
  for (std::size_t k = 0; k < n; ++k) t(k, k) = GaussInt64(d[k]);
  const auto pos = lower_positions(n);
  std::vector<std::vector<GaussInt64>> ranges;
  for (const auto& [k, j] : pos) {
    std::vector<GaussInt64> r;
    const std::int64_t bound = d[k] * d[j];
    const std::int64_t s = isqrt(bound);
    for (std::int64_t a = -s; a <= s; ++a)
      for (std::int64_t b = -s; b <= s; ++b)
        if (a * a + b * b <= bound) r.emplace_back(a, b);
    ranges.push_back(std::move(r));
  }
  auto rec = [&](auto&& self, std::size_t p) -> bool {
    if (p == pos.size()) return visit(static_cast<const Matrix<GaussInt64>&>(t));
    const auto [k, j] = pos[p];
    for (const auto& c : ranges[p]) {
      t(k, j) = c;
      t(j, k) = conj(c);
      if (!self(self, p + 1)) return false;
    }
    return true;
  };
  return rec(rec, 0);
}

/// Every index with trace <= trace_bound and diagonal entries <= max_diag
/// (negative max_diag: no per-entry limit).
template <class Visit>
bool for_each_index(std::size_t n, std::int64_t trace_bound, std::int64_t max_diag, Visit&& visit) {
  if (max_diag < 0) max_diag = trace_bound;
  for (const auto& d : index_diagonals(n, trace_bound, max_diag))
    if (!for_each_index_with_diagonal(d, visit)) return false;
  return true;
}

}  // namespace hsl
