#pragma once

// Integer combinations of the three theta series: the Schottky combination
// F^(n) = 8 Theta_1 - 15 Theta_2 + 7 Theta_3, low-degree vanishing scans, cusp
// scans over singular indices, and the search for a nonvanishing product
// coefficient of F^(4) restricted to H_2 x H_2.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hsl/engine.hpp"
#include "hsl/indices.hpp"
#include "hsl/json_io.hpp"
#include "hsl/linalg.hpp"
#include "hsl/theta.hpp"

namespace hsl {

struct Combo {
  std::array<std::int64_t, 3> c{};

  static constexpr Combo schottky() { return {{8, -15, 7}}; }
  static constexpr Combo cusp2() { return {{-8, 3, 5}}; }

  [[nodiscard]] std::string tag() const {
    return "F(" + std::to_string(c[0]) + "," + std::to_string(c[1]) + "," + std::to_string(c[2]) + ")";
  }
  [[nodiscard]] Json to_json() const { return Json::array({c[0], c[1], c[2]}); }
  friend bool operator==(const Combo&, const Combo&) = default;
};

/// Weight det^k (x) det^l of a Hermitian form; records only.
struct Weight {
  int k = 0;
  int l = 0;
};
inline constexpr Weight kSchottkyWeight{0, 8};
// d_x^4 F^(4) on H_3 x H_1 and its y analogue.
inline constexpr Weight kDx4Weight{4, 8};
inline constexpr Weight kDy4Weight{0, 12};

/// sum_i c_i a_i^(n)(T/2)
inline BigInt combo_coeff(Engine& engine, const Combo& c, const DoubledIndex& t) {
  BigInt s = 0;
  for (int i = 1; i <= 3; ++i) {
    if (c.c[static_cast<std::size_t>(i - 1)] == 0) continue;
    s += BigInt(c.c[static_cast<std::size_t>(i - 1)]) * rep_count(engine.lattice(i), t);
  }
  return s;
}

struct ScanReport {
  std::string scan;
  std::int64_t bound = 0;
  std::uint64_t checked = 0;
  Json violations = Json::array();
  Json witness = nullptr;
  Json extra = Json::object();

  [[nodiscard]] bool clean() const { return violations.empty(); }

  [[nodiscard]] Json to_json() const {
    Json j;
    j["scan"] = scan;
    j["bound"] = bound;
    j["checked"] = checked;
    j["violations"] = violations;
    j["witness"] = witness;
    for (const auto& [k, v] : extra.items()) j[k] = v;
    return j;
  }
};

inline Json index_value_record(const DoubledIndex& t, const BigInt& v) {
  Json j;
  j["T"] = t.to_json();
  j["value"] = v.str();
  return j;
}

/// Every index of size n with trace <= trace_bound must have F^(n) coefficient 0.
inline ScanReport lowdeg_scan(Engine& engine, std::size_t n, std::int64_t trace_bound) {
  if (n < 1 || n > 3) throw InvalidIndex("lowdeg_scan covers n = 1..3");
  ScanReport r{"lowdeg", trace_bound};
  r.extra["n"] = n;
  BigInt max_abs = 0;
  for_each_index(n, trace_bound, -1, [&](const Matrix<GaussInt64>& m) {
    const DoubledIndex t = DoubledIndex::from_small(m);
    const BigInt v = combo_coeff(engine, Combo::schottky(), t);
    ++r.checked;
    if (v != 0) r.violations.push_back(index_value_record(t, v));
    if (abs(v) > max_abs) max_abs = abs(v);
    return true;
  });
  r.extra["max_abs"] = max_abs.str();
  return r;
}

/// Over PSD singular indices the combination must vanish. Also records the
/// first positive-definite index with a nonzero coefficient as the witness
/// that the form is not identically zero.
inline ScanReport cusp_scan(Engine& engine, const Combo& c, std::size_t n, std::int64_t trace_bound,
                            std::int64_t max_diag = -1, bool find_witness = true) {
  if (n < 2 || n > 4) throw InvalidIndex("cusp_scan covers n = 2..4");
  ScanReport r{"cusp", trace_bound};
  r.extra["n"] = n;
  r.extra["combo"] = c.to_json();
  if (max_diag >= 0) r.extra["max_diag"] = max_diag;
  std::uint64_t candidates = 0;
  std::uint64_t definite_checked = 0;
  for_each_index(n, trace_bound, max_diag, [&](const Matrix<GaussInt64>& m) {
    ++candidates;
    if (!is_psd_small(m)) return true;
    const bool singular = determinant_small(m).re == 0;
    if (!singular && (!find_witness || !r.witness.is_null())) return true;
    const DoubledIndex t = DoubledIndex::from_small(m);
    const BigInt v = combo_coeff(engine, c, t);
    if (singular) {
      ++r.checked;
      if (v != 0) r.violations.push_back(index_value_record(t, v));
    } else {
      ++definite_checked;
      if (v != 0) r.witness = index_value_record(t, v);
    }
    return true;
  });
  r.extra["candidates"] = candidates;
  r.extra["definite_checked"] = definite_checked;
  return r;
}

/// First pair (T1, T2) of 2x2 indices in canonical order with
/// sum_i c_i a_i^(2)(T1) a_i^(2)(T2) != 0, c = (8, -15, 7).
inline ScanReport h2h2_scan(Engine& engine, std::int64_t trace_bound) {
  ScanReport r{"h2h2", trace_bound};
  struct Row {
    DoubledIndex t;
    std::array<BigInt, 3> a;
  };
  std::vector<Row> rows;
  for_each_index(2, trace_bound, -1, [&](const Matrix<GaussInt64>& m) {
    if (!is_psd_small(m)) return true;
    Row row{DoubledIndex::from_small(m), {}};
    for (int i = 1; i <= 3; ++i) row.a[static_cast<std::size_t>(i - 1)] = rep_count(engine.lattice(i), row.t);
    rows.push_back(std::move(row));
    return true;
  });
  r.extra["indices"] = rows.size();
  const Combo c = Combo::schottky();
  for (const auto& x : rows)
    for (const auto& y : rows) {
      ++r.checked;
      BigInt v = 0;
      for (std::size_t i = 0; i < 3; ++i) v += BigInt(c.c[i]) * x.a[i] * y.a[i];
      if (v != 0) {
        r.witness = Json::object({{"T1", x.t.to_json()}, {"T2", y.t.to_json()}, {"value", v.str()}});
        return r;
      }
    }
  return r;
}

}  // namespace hsl
