#pragma once

// Verification suites. Each suite yields a Report of check records in a fixed
// order; "all" concatenates the suites.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hsl/deriv.hpp"
#include "hsl/elliptic.hpp"
#include "hsl/engine.hpp"
#include "hsl/forms.hpp"
#include "hsl/numeric.hpp"
#include "hsl/report.hpp"
#include "hsl/theta.hpp"

namespace hsl {

struct VerifyBounds {
  std::int64_t theta_m_max = 8;        // a^(1)(m) against 480 sigma_7(m)
  std::int64_t lowdeg_n1_m_max = 8;    // F^(1)
  std::int64_t lowdeg_n2_trace = 8;    // F^(2)
  std::int64_t lowdeg_n3_trace = 6;    // F^(3)
  std::int64_t cusp_trace = 8;         // F^(4), singular indices
  std::int64_t cusp_max_diag = 2;
  std::int64_t relations_trace = 8;    // (8,-15,7) and (-8,3,5) at n = 2
  std::int64_t h2h2_trace = 8;
  std::int64_t numeric_n1_B = 40;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"shells", "relations", "lowdeg", "cusp",    "schottky",
                                              "mod4",   "delta-factor", "h2h2", "numeric"};
  return names;
}

namespace detail {

inline CheckRecord scan_record(const std::string& id, const ScanReport& s, bool want_witness) {
  CheckRecord c;
  c.id = id;
  c.inputs = Json::object({{"bound", s.bound}});
  for (const auto& [k, v] : s.extra.items())
    if (k == "n" || k == "combo" || k == "max_diag") c.inputs[k] = v;
  c.expected = Json::object({{"violations", 0}});
  if (want_witness) c.expected["witness"] = "nonzero";
  c.got = s.to_json();
  c.pass = s.clean() && (!want_witness || !s.witness.is_null());
  return c;
}

inline CheckRecord numeric_record(const NumericCheck& n) {
  CheckRecord c;
  c.id = n.check;
  c.inputs = n.params;
  c.expected = Json::object({{"residual_below", n.tolerance}});
  c.got = Json::object({{"residual", n.residual}});
  c.pass = n.pass();
  return c;
}

inline CheckRecord value_record(const std::string& id, Json inputs, const GaussInt& expected, const GaussInt& got) {
  CheckRecord c;
  c.id = id;
  c.inputs = std::move(inputs);
  c.expected = to_json(expected);
  c.got = to_json(got);
  c.pass = expected == got;
  return c;
}

}  // namespace detail

inline Report verify_shells(Engine& engine) {
  Report r{"shells"};
  for (int i = 1; i <= 3; ++i) {
    CheckRecord c;
    c.id = "shell L" + std::to_string(i) + " norm 2";
    c.inputs = Json::object({{"lattice", i}, {"norm", 2}});
    c.expected = "480";
    c.got = std::to_string(engine.lattice(i).shell(2).size());
    c.pass = c.got == c.expected;
    r.checks.push_back(std::move(c));
  }
  return r;
}

inline Report verify_relations(Engine& engine, const VerifyBounds& b) {
  Report r{"relations"};
  const QSeries oracle = rank16_theta_oracle(std::max<std::int64_t>(b.theta_m_max, 1));
  for (int i = 1; i <= 3; ++i) {
    const auto a = theta_qcoeffs(engine.lattice(i), b.theta_m_max);
    for (std::int64_t m = 0; m <= b.theta_m_max; ++m) {
      CheckRecord c;
      c.id = "theta-oracle L" + std::to_string(i) + " m=" + std::to_string(m);
      c.inputs = Json::object({{"lattice", i}, {"m", m}, {"oracle", "advisory: 480 sigma_7(m)"}});
      c.expected = oracle[static_cast<std::size_t>(m)].str();
      c.got = a[static_cast<std::size_t>(m)].str();
      c.pass = c.got == c.expected;
      r.checks.push_back(std::move(c));
    }
  }
  r.checks.push_back(detail::scan_record("relation (8,-15,7) n=2", lowdeg_scan(engine, 2, b.relations_trace), false));
  r.checks.push_back(
      detail::scan_record("cusp (-8,3,5) n=2", cusp_scan(engine, Combo::cusp2(), 2, b.relations_trace), true));
  return r;
}

inline Report verify_lowdeg(Engine& engine, const VerifyBounds& b) {
  Report r{"lowdeg"};
  r.checks.push_back(detail::scan_record("lowdeg n=1", lowdeg_scan(engine, 1, 2 * b.lowdeg_n1_m_max), false));
  r.checks.push_back(detail::scan_record("lowdeg n=2", lowdeg_scan(engine, 2, b.lowdeg_n2_trace), false));
  r.checks.push_back(detail::scan_record("lowdeg n=3", lowdeg_scan(engine, 3, b.lowdeg_n3_trace), false));
  return r;
}

inline Report verify_cusp(Engine& engine, const VerifyBounds& b) {
  Report r{"cusp"};
  r.checks.push_back(detail::scan_record(
      "cusp (8,-15,7) n=4", cusp_scan(engine, Combo::schottky(), 4, b.cusp_trace, b.cusp_max_diag), true));
  return r;
}

inline Report verify_schottky(DerivEngine& d) {
  Report r{"schottky"};
  const DoubledIndex t1 = DoubledIndex::diagonal({2, 2, 2});
  const MultiIndex a{{4, 0, 0}};
  const Json in = Json::object({{"T1", t1.to_json()}, {"m", 1}, {"alpha", a.to_json()}});
  const GaussInt x = tuple_sum_x(d, t1, 1, a);
  r.checks.push_back(detail::value_record("tuple_sum_x 2I3 m=1 (4,0,0)", in, GaussInt(1981808640), x));
  r.checks.push_back(
      detail::value_record("tuple_sum_y 2I3 m=1 (4,0,0)", in, GaussInt(1981808640), tuple_sum_y(d, t1, 1, a)));
  CheckRecord c;
  c.id = "fourier_deriv_coeff 2I3 m=1 (4,0,0)";
  c.inputs = in;
  c.expected = "123863040";
  c.got = to_string(fourier_deriv_coeff(d, t1, 1, a));
  c.pass = c.got == c.expected;
  r.checks.push_back(std::move(c));
  return r;
}

inline Report verify_mod4(DerivEngine& d) {
  Report r = mod4_vanish_suite(d, {DoubledIndex::diagonal({2, 2, 2})}, {1, 2}, 5);
  r.suite = "mod4";
  return r;
}

inline Report verify_delta_factor(DerivEngine& d) {
  Report r{"delta-factor"};
  for (const auto& t1 : {DoubledIndex::diagonal({2, 2, 2}), DoubledIndex::diagonal({2, 2, 4})})
    for (const MultiIndex a : {MultiIndex{{4, 0, 0}}, MultiIndex{{2, 2, 0}}}) r.append(delta_factor_check(d, t1, a, 3));
  return r;
}

inline Report verify_h2h2(Engine& engine, const VerifyBounds& b) {
  Report r{"h2h2"};
  r.checks.push_back(detail::scan_record("h2h2", h2h2_scan(engine, b.h2h2_trace), true));
  return r;
}

inline Report verify_numeric(Engine& engine, const VerifyBounds& b) {
  Report r{"numeric"};
  const Cplx tau(0.3, 1.1);
  for (int i = 1; i <= 3; ++i)
    for (const auto& g : {Gamma1{1, 1, 0, 1}, Gamma1{0, -1, 1, 0}, Gamma1{2, 1, 1, 1}})
      r.checks.push_back(detail::numeric_record(slash_check_n1(engine, i, g, tau, b.numeric_n1_B, 1e-6)));
  const Mat2 s{1.0, Cplx(1, 1), Cplx(1, -1), 0.0};
  for (int i = 1; i <= 3; ++i) {
    r.checks.push_back(detail::numeric_record(slash_check_n2(engine, single(i), Gamma2::translation(s), "translation",
                                                             Mat2::diag(Cplx(0.1, 1.2), Cplx(0, 1.4)), 6, 1e-4)));
    r.checks.push_back(detail::numeric_record(slash_check_n2(engine, single(i),
                                                             Gamma2::unit_block(Mat2::diag(Cplx(0, 1), 1.0)),
                                                             "unit-block", Mat2::diag(Cplx(0, 1.2), Cplx(0, 1.4)), 6, 1e-4)));
    r.checks.push_back(detail::numeric_record(slash_check_n2(engine, single(i), Gamma2::inversion(), "inversion",
                                                             Mat2::diag(Cplx(0, 1), Cplx(0, 1)), 8, 1e-4)));
  }
  const Mat2 tau2{Cplx(0, 1.1), 0.0, 0.0, Cplx(0.1, 0.9)};
  const std::vector<std::pair<Gamma2, std::string>> gammas{
      {Gamma2::identity(), "identity"},
      {Gamma2::translation(s), "translation"},
      {Gamma2::inversion(), "inversion"},
      {Gamma2::unit_block(Mat2{1.0, Cplx(0, 1), 0.0, 1.0}), "unit-block"},
      {Gamma2::inversion() * Gamma2::translation(s), "inversion*translation"}};
  for (const auto& [g, name] : gammas)
    r.checks.push_back(detail::numeric_record(shimura_lemma_check(g, name, tau2, 1e-5, 1e-4)));
  for (int i = 1; i <= 3; ++i)
    for (const auto coord : {OffDiagonal::x, OffDiagonal::y})
      r.checks.push_back(
          detail::numeric_record(fd_vs_fourier_n2(engine, i, Cplx(0, 1.2), Cplx(0, 1.2), 8, 1e-4, coord, 1e-6,
                                                  Cplx(0.1, 0.05), Cplx(-0.05, 0.1))));
  return r;
}

/// Runs one suite by name, or every suite for "all". Throws InvalidIndex for
/// an unknown name.
inline Report run_suite(Engine& engine, const std::string& name, const VerifyBounds& b = {}) {
  DerivEngine d(engine);
  const std::map<std::string, std::function<Report()>> table{
      {"shells", [&] { return verify_shells(engine); }},
      {"relations", [&] { return verify_relations(engine, b); }},
      {"lowdeg", [&] { return verify_lowdeg(engine, b); }},
      {"cusp", [&] { return verify_cusp(engine, b); }},
      {"schottky", [&] { return verify_schottky(d); }},
      {"mod4", [&] { return verify_mod4(d); }},
      {"delta-factor", [&] { return verify_delta_factor(d); }},
      {"h2h2", [&] { return verify_h2h2(engine, b); }},
      {"numeric", [&] { return verify_numeric(engine, b); }},
  };
  if (name == "all") {
    Report all{"all"};
    for (const auto& s : suite_names()) all.append(table.at(s)());
    return all;
  }
  auto it = table.find(name);
  if (it == table.end()) throw InvalidIndex("unknown suite " + name);
  return it->second();
}

}  // namespace hsl
