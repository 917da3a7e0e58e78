#pragma once

// Floating-point checks of the transformation machinery for n = 1 and n = 2:
// slash invariance of theta series (weight det^0 (x) det^8), the differential
// of tau -> gamma tau, and a finite-difference check of the derivative of a
// Fourier expansion in an off-diagonal coordinate.
//
// Theta series are evaluated on the Fourier side from exact coefficients:
// Theta(tau) = sum_T a(T) exp(pi i tr(T tau)) over PSD doubled indices T with
// trace <= B.

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "hsl/elliptic.hpp"
#include "hsl/engine.hpp"
#include "hsl/forms.hpp"
#include "hsl/indices.hpp"
#include "hsl/json_io.hpp"
#include "hsl/theta.hpp"

namespace hsl {

using Cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

struct Mat2 {
  Cplx a, b, c, d;  // [[a, b], [c, d]]

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 zero() { return {0.0, 0.0, 0.0, 0.0}; }
  static Mat2 diag(Cplx x, Cplx y) { return {x, 0.0, 0.0, y}; }

  [[nodiscard]] Cplx det() const { return a * d - b * c; }
  [[nodiscard]] Mat2 transpose() const { return {a, c, b, d}; }
  [[nodiscard]] Mat2 conj() const { return {std::conj(a), std::conj(b), std::conj(c), std::conj(d)}; }
  [[nodiscard]] Mat2 adjoint() const { return transpose().conj(); }
  [[nodiscard]] Mat2 inverse() const {
    const Cplx dt = det();
    if (std::abs(dt) < 1e-300) throw DomainError("singular 2x2 matrix");
    return {d / dt, -b / dt, -c / dt, a / dt};
  }
  [[nodiscard]] double max_abs() const {
    return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  }

  friend Mat2 operator+(const Mat2& x, const Mat2& y) { return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d}; }
  friend Mat2 operator-(const Mat2& x, const Mat2& y) { return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d}; }
  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend Mat2 operator*(Cplx s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }

  [[nodiscard]] Json to_json() const {
    auto z = [](Cplx v) { return Json::array({v.real(), v.imag()}); };
    return Json::array({Json::array({z(a), z(b)}), Json::array({z(c), z(d)})});
  }
};

/// tau = X + iY with X, Y Hermitian and Y positive definite.
inline bool in_h2(const Mat2& tau) {
  const Mat2 y = Cplx(0, -0.5) * (tau - tau.adjoint());  // (tau - tau^*) / 2i
  return y.a.real() > 0 && y.det().real() > 0;
}

/// Block matrix [[A, B], [C, D]] acting by tau -> (A tau + B)(C tau + D)^{-1}.
struct Gamma2 {
  Mat2 A, B, C, D;

  [[nodiscard]] Mat2 mu(const Mat2& tau) const { return C * tau + D; }
  [[nodiscard]] Mat2 lambda(const Mat2& tau) const { return C.conj() * tau.transpose() + D.conj(); }
  [[nodiscard]] Mat2 apply(const Mat2& tau) const { return (A * tau + B) * mu(tau).inverse(); }

  friend Gamma2 operator*(const Gamma2& g, const Gamma2& h) {
    return {g.A * h.A + g.B * h.C, g.A * h.B + g.B * h.D, g.C * h.A + g.D * h.C, g.C * h.B + g.D * h.D};
  }

  static Gamma2 identity() { return {Mat2::identity(), Mat2::zero(), Mat2::zero(), Mat2::identity()}; }
  static Gamma2 inversion() { return {Mat2::zero(), -1.0 * Mat2::identity(), Mat2::identity(), Mat2::zero()}; }
  /// tau -> tau + s, s Hermitian with Gaussian-integer entries.
  static Gamma2 translation(const Mat2& s) {
    auto integral = [](Cplx z) {
      return z.real() == std::round(z.real()) && z.imag() == std::round(z.imag());
    };
    if (!integral(s.a) || !integral(s.b) || !integral(s.c) || !integral(s.d) || s.a.imag() != 0 ||
        s.d.imag() != 0 || s.c != std::conj(s.b))
      throw DomainError("translation needs a Hermitian Gaussian-integer matrix");
    return {Mat2::identity(), s, Mat2::zero(), Mat2::identity()};
  }
  /// tau -> u tau u^* for u in GL_2(Z[i]).
  static Gamma2 unit_block(const Mat2& u) {
    const Cplx dt = u.det();
    const double n = std::norm(dt);
    if (std::abs(n - 1.0) > 1e-12) throw DomainError("unit block needs det(u) a unit");
    return {u, Mat2::zero(), Mat2::zero(), u.adjoint().inverse()};
  }
};

struct Gamma1 {
  std::int64_t a, b, c, d;

  [[nodiscard]] Cplx apply(Cplx tau) const { return (double(a) * tau + double(b)) / (double(c) * tau + double(d)); }
  [[nodiscard]] Cplx mu(Cplx tau) const { return double(c) * tau + double(d); }
};

struct NumericCheck {
  std::string check;
  Json params = Json::object();
  double residual = 0;
  double tolerance = 0;

  [[nodiscard]] bool pass() const { return std::isfinite(residual) && residual < tolerance; }
  [[nodiscard]] Json to_json() const {
    return Json::object(
        {{"check", check}, {"params", params}, {"residual", residual}, {"pass", pass()}, {"tolerance", tolerance}});
  }
};

inline Json cplx_json(Cplx z) { return Json::array({z.real(), z.imag()}); }

/// a^(1)(m), m = 0..B: exact enumeration up to enumerated_max, the rank-16
/// oracle 480 sigma_7(m) above it.
struct ThetaN1Coeffs {
  std::vector<double> a;
  std::int64_t enumerated_max = 0;
};

inline ThetaN1Coeffs theta_n1_coeffs(LatticeContext& ctx, std::int64_t B, std::int64_t enumerated_max = 8) {
  if (B < 0) throw DomainError("negative truncation");
  ThetaN1Coeffs out;
  out.enumerated_max = std::min(B, enumerated_max);
  const auto exact = theta_qcoeffs(ctx, out.enumerated_max);
  const QSeries oracle = rank16_theta_oracle(std::max<std::int64_t>(B, 1));
  for (std::int64_t m = 0; m <= B; ++m) {
    const BigInt& v = m <= out.enumerated_max ? exact[static_cast<std::size_t>(m)] : oracle[static_cast<std::size_t>(m)];
    out.a.push_back(v.convert_to<double>());
  }
  return out;
}

inline Cplx eval_series_n1(const ThetaN1Coeffs& c, Cplx tau) {
  if (!(tau.imag() > 0)) throw DomainError("tau must lie in the upper half-plane");
  const Cplx q = std::exp(Cplx(0, 2 * kPi) * tau);
  Cplx s = 0;
  Cplx p = 1;
  for (const double a : c.a) {
    s += a * p;
    p *= q;
  }
  return s;
}

/// sum_{m <= B} a_i^(1)(m) exp(2 pi i m tau)
inline Cplx eval_theta_n1(Engine& engine, int lattice, Cplx tau, std::int64_t B, std::int64_t enumerated_max = 8) {
  if (!(tau.imag() > 0)) throw DomainError("tau must lie in the upper half-plane");
  return eval_series_n1(theta_n1_coeffs(engine.lattice(lattice), B, enumerated_max), tau);
}

inline NumericCheck slash_check_n1(Engine& engine, int lattice, const Gamma1& g, Cplx tau, std::int64_t B,
                                   double tolerance = 1e-6, std::int64_t enumerated_max = 8) {
  if (g.a * g.d - g.b * g.c != 1) throw DomainError("gamma must lie in SL_2(Z)");
  if (!(tau.imag() > 0)) throw DomainError("tau must lie in the upper half-plane");
  const Cplx gt = g.apply(tau);
  if (!(gt.imag() > 0)) throw DomainError("image point left the upper half-plane");
  const ThetaN1Coeffs c = theta_n1_coeffs(engine.lattice(lattice), B, enumerated_max);
  const Cplx lhs = eval_series_n1(c, gt);
  const Cplx rhs = std::pow(g.mu(tau), 8) * eval_series_n1(c, tau);
  NumericCheck out;
  out.check = "slash_n1";
  out.residual = std::abs(lhs - rhs);
  out.tolerance = tolerance;
  const double im = std::min(tau.imag(), gt.imag());
  const double tail = rank16_theta_oracle(B + 1)[static_cast<std::size_t>(B + 1)].convert_to<double>() *
                      std::exp(-2 * kPi * double(B + 1) * im);
  out.params = Json::object({{"lattice", lattice},
                             {"gamma", Json::array({g.a, g.b, g.c, g.d})},
                             {"tau", cplx_json(tau)},
                             {"B", B},
                             {"enumerated_max", c.enumerated_max},
                             {"coefficients_above", "rank16-oracle"},
                             {"tail_estimate", tail}});
  return out;
}

/// Exact 2x2 Fourier coefficients with trace <= B, as doubles.
struct FourierTable2 {
  struct Term {
    double t00, t11;
    Cplx t10;  // T[1][0]; T[0][1] is its conjugate
    double coeff;
  };
  std::vector<Term> terms;
  std::int64_t bound = 0;
};

inline FourierTable2 fourier_table_n2(Engine& engine, const Combo& combo, std::int64_t B) {
  FourierTable2 out;
  out.bound = B;
  for_each_index(2, B, -1, [&](const Matrix<GaussInt64>& m) {
    if (!is_psd_small(m)) return true;
    const BigInt v = combo_coeff(engine, combo, DoubledIndex::from_small(m));
    if (v != 0)
      out.terms.push_back({double(m(0, 0).re), double(m(1, 1).re), Cplx(double(m(1, 0).re), double(m(1, 0).im)),
                           v.convert_to<double>()});
    return true;
  });
  return out;
}

/// Single theta series i as the combination e_i.
inline Combo single(int lattice) {
  if (lattice < 1 || lattice > 3) throw UnknownLattice(lattice);
  Combo c;
  c.c[static_cast<std::size_t>(lattice - 1)] = 1;
  return c;
}

/// tr(T tau) = T00 tau00 + T01 tau10 + T10 tau01 + T11 tau11
inline Cplx trace_pair(const FourierTable2::Term& t, const Mat2& tau) {
  return t.t00 * tau.a + std::conj(t.t10) * tau.c + t.t10 * tau.b + t.t11 * tau.d;
}

inline Cplx eval_fourier_n2(const FourierTable2& f, const Mat2& tau) {
  Cplx s = 0;
  for (const auto& t : f.terms) s += t.coeff * std::exp(Cplx(0, kPi) * trace_pair(t, tau));
  return s;
}

/// Heuristic size of the first omitted trace layer: the number of pairs of
/// vectors with total norm B + 2 times exp(-pi (B + 2) lambda_min(Y)).
inline double tail_estimate_n2(Engine& engine, int lattice, const Mat2& tau, std::int64_t B) {
  const Mat2 y = Cplx(0, -0.5) * (tau - tau.adjoint());
  const double tr = y.a.real() + y.d.real();
  const double det = y.det().real();
  const double lmin = tr / 2 - std::sqrt(std::max(0.0, tr * tr / 4 - det));
  const std::int64_t next = B + 2 - (B % 2);
  const auto counts = engine.lattice(lattice).norm_counts(next);
  double pairs = 0;
  for (std::int64_t s = 0; s <= next; s += 2)
    pairs += double(counts[static_cast<std::size_t>(s)]) * double(counts[static_cast<std::size_t>(next - s)]);
  return pairs * std::exp(-kPi * double(next) * lmin);
}

/// |f(gamma tau) - det(mu)^8 f(tau)| on the Fourier side with trace <= B.
inline NumericCheck slash_check_n2(Engine& engine, const Combo& combo, const Gamma2& g, const std::string& gamma_name,
                                   const Mat2& tau, std::int64_t B, double tolerance) {
  if (!in_h2(tau)) throw DomainError("tau must lie in H_2");
  const Mat2 gt = g.apply(tau);
  if (!in_h2(gt)) throw DomainError("image point left H_2");
  const FourierTable2 f = fourier_table_n2(engine, combo, B);
  const Cplx lhs = eval_fourier_n2(f, gt);
  const Cplx rhs = std::pow(g.mu(tau).det(), 8) * eval_fourier_n2(f, tau);
  NumericCheck out;
  out.check = "slash_n2";
  out.residual = std::abs(lhs - rhs);
  out.tolerance = tolerance;
  out.params = Json::object({{"combo", combo.to_json()},
                             {"gamma", gamma_name},
                             {"tau", tau.to_json()},
                             {"B", B},
                             {"terms", f.terms.size()}});
  return out;
}

/// Max deviation between the central finite-difference Jacobian of
/// tau -> gamma tau and lambda^T^{-1} E mu^{-1}, over the four entry
/// directions E.
inline NumericCheck shimura_lemma_check(const Gamma2& g, const std::string& gamma_name, const Mat2& tau, double step,
                                        double tolerance = 1e-4) {
  if (!in_h2(tau)) throw DomainError("tau must lie in H_2");
  if (!(step >= 1e-6 && step <= 1e-4)) throw DomainError("step must lie in [1e-6, 1e-4]");
  const Mat2 left = g.lambda(tau).transpose().inverse();
  const Mat2 right = g.mu(tau).inverse();
  double worst = 0;
  for (int e = 0; e < 4; ++e) {
    Mat2 dir = Mat2::zero();
    (e == 0 ? dir.a : e == 1 ? dir.b : e == 2 ? dir.c : dir.d) = 1.0;
    const Mat2 fd = Cplx(1.0 / (2 * step)) * (g.apply(tau + Cplx(step) * dir) - g.apply(tau - Cplx(step) * dir));
    const Mat2 closed = left * dir * right;
    worst = std::max(worst, (fd - closed).max_abs());
  }
  NumericCheck out;
  out.check = "shimura_lemma";
  out.residual = worst;
  out.tolerance = tolerance;
  out.params = Json::object({{"gamma", gamma_name}, {"tau", tau.to_json()}, {"step", step}});
  return out;
}

enum class OffDiagonal { x, y };

/// Central difference of Theta_i^(2) in the off-diagonal coordinate x = tau[0][1]
/// (or y = tau[1][0]), against the term-wise derivative
/// sum (2 pi i) h3 a(T) exp(...), h3 = T[1][0] / 2 (or its conjugate).
/// A nonzero base (x0, y0) moves the expansion point off the diagonal; at
/// x0 = y0 = 0 the derivative vanishes by the symmetry T[1][0] -> -T[1][0].
inline NumericCheck fd_vs_fourier_n2(Engine& engine, int lattice, Cplx tau1, Cplx tau2, std::int64_t B, double step,
                                     OffDiagonal coord = OffDiagonal::x, double tolerance = 1e-6, Cplx x0 = 0,
                                     Cplx y0 = 0) {
  if (tau1.imag() < 1 || tau2.imag() < 1) throw DomainError("fd_vs_fourier_n2 needs Im(tau1), Im(tau2) >= 1");
  const FourierTable2 f = fourier_table_n2(engine, single(lattice), B);
  const Mat2 base{tau1, x0, y0, tau2};
  Mat2 dir = Mat2::zero();
  (coord == OffDiagonal::x ? dir.b : dir.c) = 1.0;
  const Cplx fd =
      (eval_fourier_n2(f, base + Cplx(step) * dir) - eval_fourier_n2(f, base - Cplx(step) * dir)) / (2 * step);
  Cplx series = 0;
  for (const auto& t : f.terms) {
    const Cplx h3 = (coord == OffDiagonal::x ? t.t10 : std::conj(t.t10)) / 2.0;
    series += Cplx(0, 2 * kPi) * h3 * t.coeff * std::exp(Cplx(0, kPi) * trace_pair(t, base));
  }
  NumericCheck out;
  out.check = "fd_vs_fourier_n2";
  out.residual = std::abs(fd - series);
  out.tolerance = tolerance;
  out.params = Json::object({{"lattice", lattice},
                             {"tau1", cplx_json(tau1)},
                             {"tau2", cplx_json(tau2)},
                             {"B", B},
                             {"step", step},
                             {"x0", cplx_json(x0)},
                             {"y0", cplx_json(y0)},
                             {"coordinate", coord == OffDiagonal::x ? "x" : "y"},
                             {"derivative", cplx_json(series)}});
  return out;
}

}  // namespace hsl
