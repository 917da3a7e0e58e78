#pragma once

// Gram matrices of the three rank-8 even unimodular Gaussian lattices, their
// exact LDL* factorizations, and enumeration of all lattice vectors of a given
// Hermitian norm.
//
// Convention: G = L^* diag(D) L with L unit upper triangular, so that
//   v^* G v = sum_k D_k |(L v)_k|^2,   (L v)_k = v_k + sum_{j>k} L_kj v_j.
// Enumeration fixes the last coordinate first and walks down to v_0; at every
// level the remaining budget confines the next coordinate to an exact disk in
// the Gaussian plane.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "hsl/error.hpp"
#include "hsl/exactnum.hpp"
#include "hsl/linalg.hpp"
#include "hsl/matrix.hpp"
#include "hsl/parallel.hpp"

namespace hsl {

struct GramMatrix {
  int id = 0;  // 1..3 for the built-in lattices, 0 otherwise
  Matrix<GaussInt> entries;

  [[nodiscard]] std::size_t rank() const { return entries.rows(); }
};

namespace detail {

struct Entry {
  int re;
  int im;
};
using Gram8 = std::array<std::array<Entry, 8>, 8>;

// clang-format off
inline constexpr Gram8 kS1 = {{
  {{{2,0},{0,0},{0,0},{0,0},{1,0},{1,0},{0,0},{1,0}}},
  {{{0,0},{2,0},{0,0},{0,0},{-1,0},{1,0},{-1,0},{0,0}}},
  {{{0,0},{0,0},{2,0},{0,0},{0,0},{1,0},{1,0},{-1,0}}},
  {{{0,0},{0,0},{0,0},{2,0},{-1,0},{0,0},{1,0},{1,0}}},
  {{{1,0},{-1,0},{0,0},{-1,0},{2,0},{0,0},{0,0},{0,0}}},
  {{{1,0},{1,0},{1,0},{0,0},{0,0},{2,0},{0,0},{0,0}}},
  {{{0,0},{-1,0},{1,0},{1,0},{0,0},{0,0},{2,0},{0,0}}},
  {{{1,0},{0,0},{-1,0},{1,0},{0,0},{0,0},{0,0},{2,0}}},
}};

inline constexpr Gram8 kS2 = {{
  {{{2,0},{-1,0},{0,0},{-1,0},{-1,0},{-1,0},{0,-1},{1,1}}},
  {{{-1,0},{2,0},{1,-1},{0,0},{0,0},{0,0},{0,0},{0,-1}}},
  {{{0,0},{1,1},{2,0},{0,0},{0,0},{0,0},{0,0},{1,0}}},
  {{{-1,0},{0,0},{0,0},{2,0},{1,0},{1,0},{0,1},{-1,0}}},
  {{{-1,0},{0,0},{0,0},{1,0},{2,0},{1,0},{0,1},{-1,0}}},
  {{{-1,0},{0,0},{0,0},{1,0},{1,0},{2,0},{0,1},{-1,0}}},
  {{{0,1},{0,0},{0,0},{0,-1},{0,-1},{0,-1},{2,0},{0,1}}},
  {{{1,-1},{0,1},{1,0},{-1,0},{-1,0},{-1,0},{0,-1},{4,0}}},
}};

inline constexpr Gram8 kS3 = {{
  {{{2,0},{0,0},{1,1},{0,1},{0,0},{0,0},{0,0},{0,0}}},
  {{{0,0},{2,0},{0,1},{1,-1},{0,0},{0,0},{0,0},{0,0}}},
  {{{1,-1},{0,-1},{2,0},{0,0},{0,0},{0,0},{0,0},{0,0}}},
  {{{0,-1},{1,1},{0,0},{2,0},{0,0},{0,0},{0,0},{0,0}}},
  {{{0,0},{0,0},{0,0},{0,0},{2,0},{0,0},{1,1},{0,1}}},
  {{{0,0},{0,0},{0,0},{0,0},{0,0},{2,0},{0,1},{1,-1}}},
  {{{0,0},{0,0},{0,0},{0,0},{1,-1},{0,-1},{2,0},{0,0}}},
  {{{0,0},{0,0},{0,0},{0,0},{0,-1},{1,1},{0,0},{2,0}}},
}};
// clang-format on

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

}  // namespace detail

/// The built-in Gram matrices S_1, S_2, S_3.
inline GramMatrix load_gram(int id) {
  const detail::Gram8* src = nullptr;
  switch (id) {
    case 1: src = &detail::kS1; break;
    case 2: src = &detail::kS2; break;
    case 3: src = &detail::kS3; break;
    default: throw UnknownLattice(id);
  }
  GramMatrix g{id, Matrix<GaussInt>(8, 8)};
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) g.entries(r, c) = GaussInt((*src)[r][c].re, (*src)[r][c].im);
  return g;
}

struct LatticeVector {
  std::vector<GaussInt> coords;

  [[nodiscard]] std::size_t size() const { return coords.size(); }
  const GaussInt& operator[](std::size_t k) const { return coords[k]; }
  GaussInt& operator[](std::size_t k) { return coords[k]; }

  friend bool operator==(const LatticeVector&, const LatticeVector&) = default;
  friend std::strong_ordering operator<=>(const LatticeVector& a, const LatticeVector& b) {
    return std::lexicographical_compare_three_way(a.coords.begin(), a.coords.end(), b.coords.begin(),
                                                  b.coords.end());
  }
};

inline LatticeVector zero_vector(std::size_t n) { return {std::vector<GaussInt>(n)}; }

inline LatticeVector unit_vector(std::size_t n, std::size_t k) {
  LatticeVector v = zero_vector(n);
  v[k] = GaussInt(1, 0);
  return v;
}

inline LatticeVector times_unit(const LatticeVector& v, unsigned k) {
  LatticeVector out = v;
  for (auto& z : out.coords) z = times_unit(z, k);
  return out;
}

/// <v, w> = w^* G v.
inline GaussInt herm_ip(const GramMatrix& g, const LatticeVector& v, const LatticeVector& w) {
  const std::size_t n = g.rank();
  if (v.size() != n || w.size() != n) throw DimensionMismatch("vector length does not match Gram rank");
  GaussInt acc;
  for (std::size_t j = 0; j < n; ++j) {
    if (w[j].is_zero()) continue;
    GaussInt row;
    for (std::size_t k = 0; k < n; ++k) row += g.entries(j, k) * v[k];
    acc += conj(w[j]) * row;
  }
  return acc;
}

struct LdlFactors {
  Matrix<GaussRat> L;     // unit upper triangular
  std::vector<BigRat> D;  // positive pivots

  [[nodiscard]] std::size_t rank() const { return D.size(); }
};

/// Exact G = L^* diag(D) L. Throws NotPositiveDefinite on a non-positive pivot.
inline LdlFactors ldl(const GramMatrix& g) {
  const std::size_t n = g.rank();
  if (!g.entries.square()) throw DimensionMismatch("Gram matrix must be square");
  if (!is_hermitian(g.entries)) throw NotPositiveDefinite("Gram matrix is not Hermitian");
  LdlFactors f{Matrix<GaussRat>::identity(n, GaussRat(GaussInt(1)), GaussRat()), std::vector<BigRat>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    GaussRat pivot(g.entries(k, k));
    for (std::size_t l = 0; l < k; ++l) pivot -= GaussRat(f.D[l]) * GaussRat(norm(f.L(l, k)));
    if (!pivot.is_real()) throw NotPositiveDefinite("complex pivot");
    const BigRat d = pivot.real();
    if (d <= 0) throw NotPositiveDefinite("pivot " + std::to_string(k) + " is not positive");
    f.D[k] = d;
    for (std::size_t j = k + 1; j < n; ++j) {
      GaussRat s(g.entries(k, j));
      for (std::size_t l = 0; l < k; ++l) s -= conj(f.L(l, k)) * GaussRat(f.D[l]) * f.L(l, j);
      f.L(k, j) = s / GaussRat(d);
    }
  }
  return f;
}

/// L^* diag(D) L, for checking the factorization.
inline Matrix<GaussRat> reconstruct(const LdlFactors& f) {
  const std::size_t n = f.rank();
  Matrix<GaussRat> dl = f.L;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) dl(r, c) = GaussRat(f.D[r]) * f.L(r, c);
  return adjoint(f.L) * dl;
}

struct GramDiagnostics {
  bool square = false;
  bool hermitian = false;
  bool even = false;
  bool positive_definite = false;
  BigRat determinant = 0;
  bool unimodular = false;

  [[nodiscard]] bool ok() const { return square && hermitian && even && positive_definite; }
};

inline GramDiagnostics validate_gram(const GramMatrix& g) {
  GramDiagnostics d;
  d.square = g.entries.square();
  if (!d.square) return d;
  d.hermitian = is_hermitian(g.entries);
  d.even = true;
  for (std::size_t k = 0; k < g.rank(); ++k) {
    const GaussInt& e = g.entries(k, k);
    if (e.im != 0 || (e.re % 2) != 0) d.even = false;
  }
  if (!d.hermitian) return d;
  try {
    const LdlFactors f = ldl(g);
    d.positive_definite = true;
    d.determinant = std::accumulate(f.D.begin(), f.D.end(), BigRat(1), std::multiplies<>());
  } catch (const NotPositiveDefinite&) {
    d.positive_definite = false;
    d.determinant = determinant(g.entries.map([](const GaussInt& z) { return GaussRat(z); })).real();
  }
  d.unimodular = d.determinant == 1;
  return d;
}

/// Every vector of one Hermitian norm, sorted in the canonical order
/// (lexicographic over coordinates, each compared by (re, im)).
///
/// Storage is packed: vector k occupies raw(k) = [re_0, im_0, re_1, im_1, ...].
class VectorShell {
 public:
  VectorShell() = default;
  VectorShell(int lattice_id, std::int64_t norm_target, std::size_t rank, std::vector<std::int16_t> packed)
      : lattice_id_(lattice_id), norm_(norm_target), rank_(rank), packed_(std::move(packed)) {
    if (rank_ == 0 || packed_.size() % (2 * rank_) != 0) throw DimensionMismatch("packed shell size");
    canonicalize();
  }

  [[nodiscard]] int lattice_id() const { return lattice_id_; }
  [[nodiscard]] std::int64_t norm_target() const { return norm_; }
  [[nodiscard]] std::size_t rank() const { return rank_; }
  [[nodiscard]] std::size_t size() const { return rank_ == 0 ? 0 : packed_.size() / (2 * rank_); }
  [[nodiscard]] bool empty() const { return size() == 0; }

  [[nodiscard]] std::span<const std::int16_t> raw(std::size_t k) const {
    return {packed_.data() + 2 * rank_ * k, 2 * rank_};
  }
  [[nodiscard]] std::span<const std::int16_t> packed() const { return packed_; }

  [[nodiscard]] LatticeVector vector(std::size_t k) const {
    LatticeVector v = zero_vector(rank_);
    const auto r = raw(k);
    for (std::size_t j = 0; j < rank_; ++j) v[j] = GaussInt(r[2 * j], r[2 * j + 1]);
    return v;
  }

  /// Index of v in the shell, or size() when absent.
  [[nodiscard]] std::size_t find(std::span<const std::int16_t> v) const {
    std::size_t lo = 0;
    std::size_t hi = size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const auto r = raw(mid);
      if (std::lexicographical_compare(r.begin(), r.end(), v.begin(), v.end()))
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo < size() && std::ranges::equal(raw(lo), v)) return lo;
    return size();
  }

 private:
  void canonicalize() {
    const std::size_t n = size();
    const std::size_t stride = 2 * rank_;
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0U);
    auto row = [&](std::uint32_t k) { return packed_.data() + stride * k; };
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return std::lexicographical_compare(row(a), row(a) + stride, row(b), row(b) + stride);
    });
    std::vector<std::int16_t> sorted;
    sorted.reserve(packed_.size());
    for (std::size_t k = 0; k < n; ++k) {
      const auto* r = row(order[k]);
      if (k > 0 && std::equal(r, r + stride, row(order[k - 1]))) continue;  // drop duplicates
      sorted.insert(sorted.end(), r, r + stride);
    }
    packed_ = std::move(sorted);
  }

  int lattice_id_ = 0;
  std::int64_t norm_ = 0;
  std::size_t rank_ = 0;
  std::vector<std::int16_t> packed_;
};

/// Integer rescaling of an LDL* factorization:
///   Q * v^* G v = sum_k w_k |d_k v_k + sum_{j>k} R_kj v_j|^2
/// with positive integers Q, w_k, d_k and Gaussian integers R_kj. All
/// enumeration arithmetic happens in this exact 64-bit form.
class ScaledForm {
 public:
  explicit ScaledForm(const LdlFactors& f) : n_(f.rank()) {
    using boost::multiprecision::lcm;
    std::vector<BigInt> dens(n_, 1);
    std::vector<BigRat> ratio(n_);
    BigInt q = 1;
    for (std::size_t k = 0; k < n_; ++k) {
      for (std::size_t j = k + 1; j < n_; ++j) dens[k] = lcm(dens[k], f.L(k, j).den());
      ratio[k] = f.D[k] / BigRat(dens[k] * dens[k]);
      q = lcm(q, denominator(ratio[k]));
    }
    scale_ = narrow<std::int64_t>(q);
    weight_.resize(n_);
    den_.resize(n_);
    rows_.assign(n_ * n_, GaussInt64{});
    for (std::size_t k = 0; k < n_; ++k) {
      const BigRat w = ratio[k] * BigRat(q);
      weight_[k] = narrow<std::int64_t>(numerator(w));
      den_[k] = narrow<std::int64_t>(dens[k]);
      for (std::size_t j = k + 1; j < n_; ++j) {
        const GaussRat r = f.L(k, j) * GaussRat(GaussInt(dens[k]));
        rows_[k * n_ + j] = gauss_cast<std::int64_t>(r.num());
      }
    }
    // Diagonal of G^{-1} = L^{-1} D^{-1} L^{-*}, used for coordinate bounds.
    Matrix<GaussRat> inv = Matrix<GaussRat>::identity(n_, GaussRat(GaussInt(1)), GaussRat());
    for (std::size_t c = 0; c < n_; ++c)
      for (std::size_t r = c; r-- > 0;) {
        GaussRat s;
        for (std::size_t k = r + 1; k <= c; ++k) s -= f.L(r, k) * inv(k, c);
        inv(r, c) = s;
      }
    inv_diag_.assign(n_, BigRat(0));
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t k = j; k < n_; ++k) inv_diag_[j] += norm(inv(j, k)) / f.D[k];
  }

  [[nodiscard]] std::size_t rank() const { return n_; }
  [[nodiscard]] std::int64_t scale() const { return scale_; }
  [[nodiscard]] std::int64_t weight(std::size_t k) const { return weight_[k]; }
  [[nodiscard]] std::int64_t den(std::size_t k) const { return den_[k]; }
  [[nodiscard]] const GaussInt64& coeff(std::size_t k, std::size_t j) const { return rows_[k * n_ + j]; }

  /// Largest |v_j| over vectors of norm <= t: sqrt(t * (G^{-1})_jj), rounded up.
  [[nodiscard]] std::int64_t coordinate_bound(std::size_t j, std::int64_t t) const {
    const BigRat x = inv_diag_[j] * BigRat(t);
    const BigInt fl = numerator(x) / denominator(x);
    return narrow<std::int64_t>(boost::multiprecision::sqrt(fl)) + 1;
  }

  /// Throws OverflowError unless every intermediate of an enumeration up to
  /// norm t_max fits comfortably in 64 bits and coordinates fit in 16 bits.
  void require_range(std::int64_t t_max) const {
    constexpr std::int64_t kLimit = std::int64_t{1} << 60;
    if (t_max < 0) return;
    if (t_max > 0 && scale_ > kLimit / t_max) throw OverflowError("norm bound too large for 64-bit enumeration");
    for (std::size_t k = 0; k < n_; ++k) {
      const std::int64_t bk = coordinate_bound(k, t_max);
      if (bk > 32767) throw OverflowError("coordinates exceed 16-bit storage");
      std::int64_t c = den_[k] * bk;
      for (std::size_t j = k + 1; j < n_; ++j) {
        const auto& r = coeff(k, j);
        c += (std::abs(r.re) + std::abs(r.im)) * coordinate_bound(j, t_max);
      }
      if (c > (std::int64_t{1} << 30)) throw OverflowError("enumeration centers exceed 30 bits");
    }
  }

  /// Exact enumeration of all v with v^* G v = t, unsorted, packed.
  [[nodiscard]] std::vector<std::int16_t> collect(std::int64_t t, unsigned threads = 1) const;

  /// counts[m] = #{v : v^* G v = m} for 0 <= m <= t_max.
  [[nodiscard]] std::vector<std::uint64_t> count_up_to(std::int64_t t_max, unsigned threads = 1) const;

 private:
  template <class Bottom>
  friend class BallWalker;

  std::size_t n_;
  std::int64_t scale_ = 1;
  std::vector<std::int64_t> weight_;
  std::vector<std::int64_t> den_;
  std::vector<GaussInt64> rows_;
  std::vector<BigRat> inv_diag_;
};

/// Depth-first walk over the lattice points of the ball Q*v^*Gv <= budget.
/// Levels n-1 .. 1 are handled here; the bottom level (coordinate 0) is
/// delegated to `Bottom`, which sees the center C_0 and the remaining budget.
///
/// With `reduce_units` only one vector per orbit {v, iv, -v, -iv} is visited:
/// the last nonzero coordinate is restricted to re > 0, im >= 0, and
/// unit_weight() reports the orbit size a leaf stands for.
template <class Bottom>
class BallWalker {
 public:
  struct TopChoice {
    std::int64_t re;
    std::int64_t im;
  };

  BallWalker(const ScaledForm& f, std::int64_t budget, Bottom& bottom, bool reduce_units = false)
      : f_(f), budget_(budget), bottom_(bottom), reduce_(reduce_units), vr_(f.rank(), 0), vi_(f.rank(), 0) {}

  /// Number of vectors represented by choosing (a, b) at the current level.
  [[nodiscard]] int unit_weight(std::int64_t a, std::int64_t b) const {
    if (!reduce_) return 1;
    if (!leading_zero_) return 4;
    if (a == 0 && b == 0) return 1;
    return (a > 0 && b >= 0) ? 4 : 0;
  }

  [[nodiscard]] std::int64_t budget() const { return budget_; }
  [[nodiscard]] const std::vector<std::int64_t>& re() const { return vr_; }
  [[nodiscard]] const std::vector<std::int64_t>& im() const { return vi_; }
  std::vector<std::int64_t>& re() { return vr_; }
  std::vector<std::int64_t>& im() { return vi_; }

  /// All admissible values of the top coordinate; one unit of parallel work each.
  [[nodiscard]] std::vector<TopChoice> top_choices() const {
    std::vector<TopChoice> out;
    const std::size_t k = f_.rank() - 1;
    if (k == 0) return {TopChoice{0, 0}};  // rank 1: the bottom level is the top
    for_each_disk_point(k, 0, 0, budget_, [&](std::int64_t a, std::int64_t b, std::int64_t) {
      if (unit_weight(a, b) != 0) out.push_back({a, b});
    });
    return out;
  }

  void run(const TopChoice& c) {
    const std::size_t k = f_.rank() - 1;
    if (k == 0) {
      bottom_(*this, 0, 0, budget_);
      return;
    }
    const std::int64_t xr = f_.den(k) * c.re;
    const std::int64_t xi = f_.den(k) * c.im;
    vr_[k] = c.re;
    vi_[k] = c.im;
    leading_zero_ = c.re == 0 && c.im == 0;
    descend(k - 1, budget_ - f_.weight(k) * (xr * xr + xi * xi));
    vr_[k] = vi_[k] = 0;
    leading_zero_ = true;
  }

 private:
  template <class F>
  void for_each_disk_point(std::size_t k, std::int64_t cr, std::int64_t ci, std::int64_t rem, F&& f) const {
    const std::int64_t w = f_.weight(k);
    const std::int64_t d = f_.den(k);
    const std::int64_t bound = rem / w;
    const std::int64_t s = isqrt(bound);
    const std::int64_t a_lo = detail::ceil_div(-s - cr, d);
    const std::int64_t a_hi = detail::floor_div(s - cr, d);
    for (std::int64_t a = a_lo; a <= a_hi; ++a) {
      const std::int64_t xr = d * a + cr;
      const std::int64_t s2 = isqrt(bound - xr * xr);
      const std::int64_t b_lo = detail::ceil_div(-s2 - ci, d);
      const std::int64_t b_hi = detail::floor_div(s2 - ci, d);
      for (std::int64_t b = b_lo; b <= b_hi; ++b) {
        const std::int64_t xi = d * b + ci;
        f(a, b, rem - w * (xr * xr + xi * xi));
      }
    }
  }

  void center(std::size_t k, std::int64_t& cr, std::int64_t& ci) const {
    cr = 0;
    ci = 0;
    for (std::size_t j = k + 1; j < f_.rank(); ++j) {
      const auto& r = f_.coeff(k, j);
      cr += r.re * vr_[j] - r.im * vi_[j];
      ci += r.re * vi_[j] + r.im * vr_[j];
    }
  }

  void descend(std::size_t k, std::int64_t rem) {
    std::int64_t cr = 0;
    std::int64_t ci = 0;
    center(k, cr, ci);
    if (k == 0) {
      bottom_(*this, cr, ci, rem);
      return;
    }
    if (reduce_ && leading_zero_) {
      for_each_disk_point(k, cr, ci, rem, [&](std::int64_t a, std::int64_t b, std::int64_t next) {
        if (unit_weight(a, b) == 0) return;
        vr_[k] = a;
        vi_[k] = b;
        leading_zero_ = a == 0 && b == 0;
        descend(k - 1, next);
        leading_zero_ = true;
      });
    } else {
      for_each_disk_point(k, cr, ci, rem, [&](std::int64_t a, std::int64_t b, std::int64_t next) {
        vr_[k] = a;
        vi_[k] = b;
        descend(k - 1, next);
      });
    }
    vr_[k] = vi_[k] = 0;
  }

  const ScaledForm& f_;
  std::int64_t budget_;
  Bottom& bottom_;
  bool reduce_;
  bool leading_zero_ = true;
  std::vector<std::int64_t> vr_;
  std::vector<std::int64_t> vi_;
};

namespace detail {

/// Emits the vectors whose norm hits the budget exactly.
struct ExactBottom {
  const ScaledForm* form;
  std::vector<std::int16_t>* out;

  template <class Walker>
  void operator()(Walker& w, std::int64_t cr, std::int64_t ci, std::int64_t rem) {
    const std::int64_t wt = form->weight(0);
    const std::int64_t d = form->den(0);
    if (rem < 0 || rem % wt != 0) return;
    const std::int64_t target = rem / wt;  // |d*v_0 + C|^2 must equal this
    const std::int64_t s = isqrt(target);
    const std::int64_t a_lo = ceil_div(-s - cr, d);
    const std::int64_t a_hi = floor_div(s - cr, d);
    for (std::int64_t a = a_lo; a <= a_hi; ++a) {
      const std::int64_t xr = d * a + cr;
      const std::int64_t r2 = target - xr * xr;
      const std::int64_t xi = isqrt(r2);
      if (xi * xi != r2) continue;
      for (const std::int64_t y : {xi, -xi}) {
        if ((y - ci) % d == 0) emit(w, a, (y - ci) / d);
        if (xi == 0) break;  // both signs coincide
      }
    }
  }

  template <class Walker>
  void emit(Walker& w, std::int64_t a, std::int64_t b) {
    const std::size_t n = w.re().size();
    out->push_back(static_cast<std::int16_t>(a));
    out->push_back(static_cast<std::int16_t>(b));
    for (std::size_t j = 1; j < n; ++j) {
      out->push_back(static_cast<std::int16_t>(w.re()[j]));
      out->push_back(static_cast<std::int16_t>(w.im()[j]));
    }
  }
};

/// Histograms every leaf of the ball by its scaled norm Q * v^* G v.
struct CountBottom {
  const ScaledForm* form;
  std::vector<std::uint64_t>* counts;

  template <class Walker>
  void operator()(Walker& w, std::int64_t cr, std::int64_t ci, std::int64_t rem) {
    const std::int64_t wt = form->weight(0);
    const std::int64_t d = form->den(0);
    const std::int64_t used = w.budget() - rem;
    const std::int64_t bound = rem / wt;
    const std::int64_t s = isqrt(bound);
    const std::int64_t a_lo = ceil_div(-s - cr, d);
    const std::int64_t a_hi = floor_div(s - cr, d);
    auto& hist = *counts;
    for (std::int64_t a = a_lo; a <= a_hi; ++a) {
      const std::int64_t xr = d * a + cr;
      const std::int64_t s2 = isqrt(bound - xr * xr);
      const std::int64_t b_lo = ceil_div(-s2 - ci, d);
      const std::int64_t b_hi = floor_div(s2 - ci, d);
      const std::int64_t base = used + wt * xr * xr;
      if (w.unit_weight(1, 0) == 4 && w.unit_weight(-1, 0) == 4) {
        for (std::int64_t b = b_lo; b <= b_hi; ++b) {
          const std::int64_t xi = d * b + ci;
          hist[static_cast<std::size_t>(base + wt * xi * xi)] += 4;
        }
      } else {
        for (std::int64_t b = b_lo; b <= b_hi; ++b) {
          const std::int64_t xi = d * b + ci;
          hist[static_cast<std::size_t>(base + wt * xi * xi)] += static_cast<std::uint64_t>(w.unit_weight(a, b));
        }
      }
    }
  }
};

}  // namespace detail

inline std::vector<std::int16_t> ScaledForm::collect(std::int64_t t, unsigned threads) const {
  if (t < 0) return {};
  require_range(t);
  const std::int64_t budget = scale_ * t;
  std::vector<std::int16_t> scratch;
  detail::ExactBottom probe{this, &scratch};
  const auto tops = BallWalker<detail::ExactBottom>(*this, budget, probe).top_choices();
  auto parts = parallel_map<std::vector<std::int16_t>>(tops.size(), threads, [&](std::size_t k) {
    std::vector<std::int16_t> out;
    detail::ExactBottom bottom{this, &out};
    BallWalker<detail::ExactBottom> walker(*this, budget, bottom);
    walker.run(tops[k]);
    return out;
  });
  std::vector<std::int16_t> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

inline std::vector<std::uint64_t> ScaledForm::count_up_to(std::int64_t t_max, unsigned threads) const {
  if (t_max < 0) return {};
  require_range(t_max);
  const std::int64_t budget = scale_ * t_max;
  const auto slots = static_cast<std::size_t>(budget) + 1;
  std::vector<std::uint64_t> scratch(slots, 0);
  detail::CountBottom probe{this, &scratch};
  const auto tops = BallWalker<detail::CountBottom>(*this, budget, probe, true).top_choices();
  auto parts = parallel_map<std::vector<std::uint64_t>>(tops.size(), threads, [&](std::size_t k) {
    std::vector<std::uint64_t> hist(slots, 0);
    detail::CountBottom bottom{this, &hist};
    BallWalker<detail::CountBottom> walker(*this, budget, bottom, true);
    walker.run(tops[k]);
    return hist;
  });
  std::vector<std::uint64_t> total(static_cast<std::size_t>(t_max) + 1, 0);
  for (const auto& h : parts)
    for (std::size_t m = 0; m < h.size(); ++m) total[m / static_cast<std::size_t>(scale_)] += h[m];
  return total;
}

/// All v in Z[i]^n with v^* G v = t, canonically sorted. Odd or negative t gives
/// an empty shell for even lattices.
inline VectorShell enumerate_shell(const GramMatrix& g, std::int64_t t, unsigned threads = 1) {
  const LdlFactors f = ldl(g);
  const ScaledForm form(f);
  return VectorShell(g.id, t, g.rank(), form.collect(t, threads));
}

}  // namespace hsl
