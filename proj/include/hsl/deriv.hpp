#pragma once

// Coefficients of the restricted derivatives d_x^r F^(4) and d_y^r F^(4) on
// H_3 x H_1, as exact tuple sums
//
//   sum_i c_i sum_{(v1,v2,v3): Gram T1} sum_{|v4|^2 = 2m} prod_j <v_j, v4>^{alpha_j},
//
// with c = (8, -15, 7).
//
// Evaluation: the slots touched by alpha are moved to the front, a TupleSearch
// yields each touched prefix with its number of completions, and the inner sum
// over v4 is the dot product of the coefficients of prod_j L_j(z)^{alpha_j},
// L_j(z) = sum_k (S v_j)_k z_k, with the shell moments sum_{v4} z^beta taken at
// z = conj(v4) (x side) or z = v4 (y side).

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "hsl/elliptic.hpp"
#include "hsl/engine.hpp"
#include "hsl/forms.hpp"
#include "hsl/indices.hpp"
#include "hsl/json_io.hpp"
#include "hsl/report.hpp"
#include "hsl/theta.hpp"

namespace hsl {

struct MultiIndex {
  std::array<unsigned, 3> a{};

  [[nodiscard]] unsigned r() const { return a[0] + a[1] + a[2]; }
  [[nodiscard]] Json to_json() const { return Json::array({a[0], a[1], a[2]}); }
  static MultiIndex from_json(const Json& j) {
    if (!j.is_array() || j.size() != 3) throw FormatError("multi-index must be an array of 3 integers");
    MultiIndex m;
    for (std::size_t k = 0; k < 3; ++k) {
      if (!j[k].is_number_integer() || j[k].get<std::int64_t>() < 0)
        throw FormatError("multi-index entries must be nonnegative integers");
      m.a[k] = j[k].get<unsigned>();
    }
    return m;
  }
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

inline std::string to_string(const MultiIndex& m) { return m.to_json().dump(); }

/// Every alpha with |alpha| = r, in lexicographically descending order.
inline std::vector<MultiIndex> multi_indices(unsigned r) {
  std::vector<MultiIndex> out;
  for (unsigned a = r + 1; a-- > 0;)
    for (unsigned b = r - a + 1; b-- > 0;) out.push_back({{a, b, r - a - b}});
  return out;
}

struct TupleSumOptions {
  bool conjugate = false;  // y side
  // Return 0 without searching when every degree-r shell moment vanishes.
  bool shortcut = true;
  // Koecher: non-PSD T1 gives 0 without searching.
  bool prune = true;
};

/// Degree-graded monomials in kRank variables up to a fixed degree.
class MonomialBasis {
 public:
  explicit MonomialBasis(unsigned max_degree) : max_degree_(max_degree) {
    std::map<std::array<unsigned, kRank>, std::uint32_t> index;
    std::array<unsigned, kRank> zero{};
    exps_.push_back(zero);
    index[zero] = 0;
    start_.push_back(0);
    start_.push_back(1);
    for (unsigned d = 1; d <= max_degree; ++d) {
      for (std::uint32_t p = start_[d - 1]; p < start_[d]; ++p)
        for (std::size_t k = 0; k < kRank; ++k) {
          auto e = exps_[p];
          ++e[k];
          if (index.emplace(e, static_cast<std::uint32_t>(exps_.size())).second) {
            exps_.push_back(e);
            parent_.push_back(p);
            var_.push_back(static_cast<std::uint8_t>(k));
          }
        }
      start_.push_back(static_cast<std::uint32_t>(exps_.size()));
    }
    child_.assign(exps_.size() * kRank, 0);
    for (std::uint32_t p = 0; p < start_[max_degree]; ++p)
      for (std::size_t k = 0; k < kRank; ++k) {
        auto e = exps_[p];
        ++e[k];
        child_[p * kRank + k] = index.at(e);
      }
  }

  [[nodiscard]] unsigned max_degree() const { return max_degree_; }
  [[nodiscard]] std::size_t size() const { return exps_.size(); }
  // Monomials of degree d occupy [begin(d), end(d)).
  [[nodiscard]] std::uint32_t begin(unsigned d) const { return start_[d]; }
  [[nodiscard]] std::uint32_t end(unsigned d) const { return start_[d + 1]; }
  // For monomials of degree >= 1: the monomial is parent * z_var.
  [[nodiscard]] std::uint32_t parent(std::uint32_t m) const { return parent_[m - 1]; }
  [[nodiscard]] std::size_t var(std::uint32_t m) const { return var_[m - 1]; }
  [[nodiscard]] std::uint32_t child(std::uint32_t m, std::size_t k) const { return child_[m * kRank + k]; }

 private:
  unsigned max_degree_;
  std::vector<std::array<unsigned, kRank>> exps_;
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> var_;
  std::vector<std::uint32_t> child_;
};

struct TupleSumResult {
  GaussInt value;
  std::array<GaussInt, 3> per_lattice;
  // "sum", "moments-vanish", "koecher" or "empty" per lattice
  std::array<std::string, 3> method;
};

class DerivEngine {
 public:
  static constexpr std::array<std::int64_t, 3> kCombo{8, -15, 7};

  explicit DerivEngine(Engine& engine) : engine_(engine) {}

  [[nodiscard]] Engine& engine() { return engine_; }

  /// One lattice's summand (without the c_i factor). method receives how the
  /// value was obtained.
  GaussInt lattice_sum(int lattice, const DoubledIndex& t1, std::int64_t m, const MultiIndex& alpha,
                       const TupleSumOptions& opt = {}, std::string* method = nullptr) {
    check_args(t1, m, alpha);
    auto note = [&](const char* s) {
      if (method != nullptr) *method = s;
    };
    LatticeContext& ctx = engine_.lattice(lattice);
    const Matrix<GaussInt64> full = t1.small();

    // Zero slots: the vector is 0, so a touched slot kills every term and an
    // untouched one drops out.
    std::vector<std::size_t> touched;
    std::vector<std::size_t> untouched;
    for (std::size_t j = 0; j < 3; ++j) {
      const std::int64_t d = full(j, j).re;
      if (d < 0) return note("empty"), GaussInt(0);
      if (d == 0) {
        for (std::size_t k = 0; k < 3; ++k)
          if (!full(j, k).is_zero()) return note("empty"), GaussInt(0);
        if (alpha.a[j] > 0) return note("empty"), GaussInt(0);
        continue;
      }
      (alpha.a[j] > 0 ? touched : untouched).push_back(j);
    }
    auto by_diag = [&](std::size_t a, std::size_t b) { return full(a, a).re < full(b, b).re; };
    std::stable_sort(touched.begin(), touched.end(), by_diag);
    std::stable_sort(untouched.begin(), untouched.end(), by_diag);
    std::vector<std::size_t> order = touched;
    order.insert(order.end(), untouched.begin(), untouched.end());
    const Matrix<GaussInt64> t = permute_index(full, order);
    if (opt.prune && (!cauchy_schwarz_ok(t) || !is_psd_small(t))) return note("koecher"), GaussInt(0);

    const unsigned r = alpha.r();
    const std::vector<GaussInt64>& mu = moments(ctx, 2 * m, r, opt.conjugate);
    const bool vanish = std::all_of(mu.begin(), mu.end(), [](const GaussInt64& z) { return z.is_zero(); });
    if (opt.shortcut && vanish) return note("moments-vanish"), GaussInt(0);
    note("sum");

    std::vector<unsigned> exps;
    for (const std::size_t j : touched) exps.push_back(alpha.a[j]);
    const bool reps = r % 4 == 0;
    const Prefixes& pre = prefixes(ctx, t, touched.size(), reps);
    const MonomialBasis& basis = this->basis(r);
    const std::size_t depth = touched.size();

    const auto chunks = split_range(pre.counts.size(), std::min<std::size_t>(pre.counts.size(), 64));
    auto parts = parallel_map<GaussAccumulator>(chunks.size(), ctx.threads(), [&](std::size_t c) {
      GaussAccumulator acc;
      std::vector<GaussInt64> poly(basis.size());
      std::array<std::array<GaussInt64, kRank>, 3> forms{};
      for (std::size_t p = chunks[c].first; p < chunks[c].second; ++p) {
        for (std::size_t l = 0; l < depth; ++l) {
          const DualVec d = ctx.dual(level_shell(ctx, t, l).raw(pre.vectors[p * depth + l]).data());
          for (std::size_t k = 0; k < kRank; ++k) {
            const GaussInt64 x(d.x[2 * k], d.x[2 * k + 1]);
            forms[l][k] = opt.conjugate ? conj(x) : x;
          }
        }
        const GaussInt64 w = power_sum(basis, poly, forms, exps, mu, r);
        acc.add(GaussInt128(int128(w.re), int128(w.im)) * GaussInt128(int128(pre.counts[p]), int128(0)));
      }
      return acc;
    });
    GaussAccumulator total;
    for (const auto& part : parts) total.add(part.value());
    GaussInt v = total.value();
    if (reps) v = v * GaussInt(4);
    return v;
  }

  TupleSumResult tuple_sum(const DoubledIndex& t1, std::int64_t m, const MultiIndex& alpha,
                           const TupleSumOptions& opt = {}) {
    TupleSumResult res;
    res.value = GaussInt(0);
    for (int i = 1; i <= 3; ++i) {
      const auto k = static_cast<std::size_t>(i - 1);
      res.per_lattice[k] = lattice_sum(i, t1, m, alpha, opt, &res.method[k]);
      res.value += GaussInt(kCombo[k]) * res.per_lattice[k];
    }
    return res;
  }

  /// sum_{v4} z^beta over the shell of norm t for every monomial of degree r,
  /// z = conj(v4) (x side) or v4 (y side).
  const std::vector<GaussInt64>& moments(LatticeContext& ctx, std::int64_t t, unsigned r, bool conjugate) {
    const auto key = std::make_tuple(ctx.id(), t, r, conjugate);
    {
      std::lock_guard lock(mutex_);
      auto it = moments_.find(key);
      if (it != moments_.end()) return it->second;
    }
    const MonomialBasis& b = basis(r);
    const VectorShell& s = ctx.shell(t);
    const auto chunks = split_range(s.size(), std::min<std::size_t>(s.size(), 64));
    auto parts = parallel_map<std::vector<GaussInt64>>(chunks.size(), ctx.threads(), [&](std::size_t c) {
      std::vector<GaussInt64> acc(b.end(r) - b.begin(r));
      std::vector<GaussInt64> val(b.end(r));
      val[0] = GaussInt64(1);
      for (std::size_t k = chunks[c].first; k < chunks[c].second; ++k) {
        const auto v = s.raw(k);
        for (std::uint32_t q = 1; q < b.end(r); ++q) {
          const std::size_t j = b.var(q);
          const GaussInt64 z(v[2 * j], conjugate ? v[2 * j + 1] : -v[2 * j + 1]);
          val[q] = val[b.parent(q)] * z;
        }
        for (std::uint32_t q = b.begin(r); q < b.end(r); ++q) acc[q - b.begin(r)] += val[q];
      }
      return acc;
    });
    std::vector<GaussInt64> mu(b.end(r) - b.begin(r));
    for (const auto& p : parts)
      for (std::size_t q = 0; q < mu.size(); ++q) mu[q] += p[q];
    std::lock_guard lock(mutex_);
    return moments_.emplace(key, std::move(mu)).first->second;
  }

 private:
  struct Prefixes {
    std::vector<std::uint32_t> vectors;  // depth entries per prefix
    std::vector<std::uint64_t> counts;   // completions per prefix
  };

  static void check_args(const DoubledIndex& t1, std::int64_t m, const MultiIndex& alpha) {
    if (t1.n() != 3) throw InvalidIndex("derivative coefficients need a 3x3 index T1");
    if (m < 0) throw InvalidIndex("m must be nonnegative");
    if (alpha.r() == 0) throw InvalidOrder("order 0: use combo_coeff");
  }

  // Shell of level l of the permuted index t.
  static const VectorShell& level_shell(LatticeContext& ctx, const Matrix<GaussInt64>& t, std::size_t l) {
    return ctx.shell(t(l, l).re);
  }

  const MonomialBasis& basis(unsigned r) {
    std::lock_guard lock(mutex_);
    auto& slot = bases_[r];
    if (!slot) slot = std::make_unique<MonomialBasis>(r);
    return *slot;
  }

  const Prefixes& prefixes(LatticeContext& ctx, const Matrix<GaussInt64>& t, std::size_t depth, bool reps) {
    std::string key = std::to_string(ctx.id()) + "|" + std::to_string(depth) + "|" + (reps ? "r" : "a");
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) key += "|" + std::to_string(t(a, b).re) + "," + std::to_string(t(a, b).im);
    {
      std::lock_guard lock(mutex_);
      auto it = prefixes_.find(key);
      if (it != prefixes_.end()) return it->second;
    }
    TupleSearch search(ctx, t);
    auto parts = search.search<Prefixes>(
        depth, reps, [&](Prefixes& acc, std::span<const std::uint32_t> prefix, std::uint64_t completions) {
          acc.vectors.insert(acc.vectors.end(), prefix.begin(), prefix.end());
          acc.counts.push_back(completions);
        });
    Prefixes all;
    for (auto& p : parts) {
      all.vectors.insert(all.vectors.end(), p.vectors.begin(), p.vectors.end());
      all.counts.insert(all.counts.end(), p.counts.begin(), p.counts.end());
    }
    std::lock_guard lock(mutex_);
    return prefixes_.emplace(std::move(key), std::move(all)).first->second;
  }

  // sum_beta coeff_beta(prod_l L_l^{e_l}) mu_beta
  static GaussInt64 power_sum(const MonomialBasis& b, std::vector<GaussInt64>& poly,
                              const std::array<std::array<GaussInt64, kRank>, 3>& forms,
                              const std::vector<unsigned>& exps, const std::vector<GaussInt64>& mu, unsigned r) {
    poly[0] = GaussInt64(1);
    unsigned deg = 0;
    for (std::size_t l = 0; l < exps.size(); ++l)
      for (unsigned rep = 0; rep < exps[l]; ++rep) {
        for (std::uint32_t q = b.begin(deg + 1); q < b.end(deg + 1); ++q) poly[q] = GaussInt64(0);
        for (std::uint32_t q = b.begin(deg); q < b.end(deg); ++q) {
          if (poly[q].is_zero()) continue;
          for (std::size_t k = 0; k < kRank; ++k)
            if (!forms[l][k].is_zero()) poly[b.child(q, k)] += poly[q] * forms[l][k];
        }
        ++deg;
      }
    GaussInt64 s(0);
    for (std::uint32_t q = b.begin(r); q < b.end(r); ++q) s += poly[q] * mu[q - b.begin(r)];
    return s;
  }

  Engine& engine_;
  std::mutex mutex_;
  std::map<unsigned, std::unique_ptr<MonomialBasis>> bases_;
  std::map<std::tuple<int, std::int64_t, unsigned, bool>, std::vector<GaussInt64>> moments_;
  std::map<std::string, Prefixes> prefixes_;
};

inline GaussInt tuple_sum_x(DerivEngine& d, const DoubledIndex& t1, std::int64_t m, const MultiIndex& alpha,
                            TupleSumOptions opt = {}) {
  opt.conjugate = false;
  return d.tuple_sum(t1, m, alpha, opt).value;
}

inline GaussInt tuple_sum_y(DerivEngine& d, const DoubledIndex& t1, std::int64_t m, const MultiIndex& alpha,
                            TupleSumOptions opt = {}) {
  opt.conjugate = true;
  return d.tuple_sum(t1, m, alpha, opt).value;
}

/// 2^(-r) tuple_sum_x: the coefficient in the sum_{h3} h3^alpha a(...) convention,
/// without the symbolic (2 pi i)^r.
inline GaussRat fourier_deriv_coeff(DerivEngine& d, const DoubledIndex& t1, std::int64_t m, const MultiIndex& alpha,
                                    TupleSumOptions opt = {}) {
  const GaussInt s = tuple_sum_x(d, t1, m, alpha, opt);
  return GaussRat(s, BigInt(1) << alpha.r());
}

struct Mod4Options {
  // Prefixes with at most this many touched slots are summed in full even
  // when the shell moments vanish; wider ones rely on the vanishing moments.
  std::size_t exhaustive_max_touched = 2;
};

/// tuple_sum_x(T1, m, alpha) = 0 for every alpha with 1 <= r <= r_max, r != 0 mod 4.
inline Report mod4_vanish_suite(DerivEngine& d, const std::vector<DoubledIndex>& t1_list,
                                     const std::vector<std::int64_t>& m_list, unsigned r_max, Mod4Options mopt = {}) {
  Report rep{"mod4"};
  for (const auto& t1 : t1_list)
    for (const std::int64_t m : m_list)
      for (unsigned r = 1; r <= r_max; ++r) {
        if (r % 4 == 0) continue;
        for (const auto& alpha : multi_indices(r)) {
          const std::size_t touched =
              static_cast<std::size_t>(std::count_if(alpha.a.begin(), alpha.a.end(), [](unsigned x) { return x > 0; }));
          TupleSumOptions opt;
          opt.shortcut = touched > mopt.exhaustive_max_touched;
          const TupleSumResult res = d.tuple_sum(t1, m, alpha, opt);
          CheckRecord c;
          c.id = "mod4 " + to_string(t1) + " m=" + std::to_string(m) + " alpha=" + to_string(alpha);
          c.inputs = Json::object({{"T1", t1.to_json()}, {"m", m}, {"alpha", alpha.to_json()}});
          c.expected = to_json(GaussInt(0));
          c.got = Json::object({{"value", to_json(res.value)},
                                {"method", Json::array({res.method[0], res.method[1], res.method[2]})}});
          c.pass = res.value.is_zero();
          rep.checks.push_back(std::move(c));
        }
      }
  return rep;
}

/// No constant term in the H_1 variable, and tuple_sum_x(T1, m, alpha) =
/// tau(m) tuple_sum_x(T1, 1, alpha) for m = 2..m_max.
inline Report delta_factor_check(DerivEngine& d, const DoubledIndex& t1, const MultiIndex& alpha,
                                      std::int64_t m_max) {
  if (alpha.r() != 4) throw InvalidOrder("delta_factor_check needs |alpha| = 4");
  Report rep{"delta-factor"};
  const QSeries tau = delta_coeffs(std::max<std::int64_t>(m_max, 1));
  const Json base_inputs = Json::object({{"T1", t1.to_json()}, {"alpha", alpha.to_json()}});

  const GaussInt b0 = tuple_sum_x(d, t1, 0, alpha);
  CheckRecord c0;
  c0.id = "delta-factor " + to_string(t1) + " alpha=" + to_string(alpha) + " m=0";
  c0.inputs = base_inputs;
  c0.inputs["m"] = 0;
  c0.expected = to_json(GaussInt(0));
  c0.got = to_json(b0);
  c0.pass = b0.is_zero();
  rep.checks.push_back(std::move(c0));

  const GaussInt b1 = tuple_sum_x(d, t1, 1, alpha);
  for (std::int64_t m = 2; m <= m_max; ++m) {
    const GaussInt bm = tuple_sum_x(d, t1, m, alpha);
    const GaussInt want = GaussInt(tau[static_cast<std::size_t>(m)]) * b1;
    CheckRecord c;
    c.id = "delta-factor " + to_string(t1) + " alpha=" + to_string(alpha) + " m=" + std::to_string(m);
    c.inputs = base_inputs;
    c.inputs["m"] = m;
    c.inputs["tau"] = tau[static_cast<std::size_t>(m)].str();
    c.inputs["b1"] = to_json(b1);
    c.expected = to_json(want);
    c.got = to_json(bm);
    c.pass = bm == want;
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

/// b(T1, alpha) = tuple_sum_x(T1, 1, alpha), |alpha| = 4.
class MCoeffTable {
 public:
  struct Entry {
    DoubledIndex t1;
    MultiIndex alpha;
    GaussInt b;
  };

  void put(Entry e) {
    const auto key = std::make_pair(to_string(e.t1), e.alpha);
    if (!index_.emplace(key, entries_.size()).second) throw Error("duplicate m-table entry " + key.first);
    entries_.push_back(std::move(e));
  }
  [[nodiscard]] std::optional<GaussInt> get(const DoubledIndex& t1, const MultiIndex& alpha) const {
    auto it = index_.find({to_string(t1), alpha});
    if (it == index_.end()) return std::nullopt;
    return entries_[it->second].b;
  }
  [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }

  [[nodiscard]] static Json record(const Entry& e) {
    return Json::object(
        {{"T1", e.t1.to_json()}, {"alpha", e.alpha.to_json()}, {"b", to_json(e.b)}, {"normalization", "tuple-sum"}});
  }

  void write(std::ostream& os) const {
    for (const auto& e : entries_) os << record(e).dump() << '\n';
  }

  static MCoeffTable read(std::istream& is) {
    MCoeffTable t;
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      Json j;
      try {
        j = Json::parse(line);
      } catch (const Json::parse_error& e) {
        throw FormatError(std::string("m-table line: ") + e.what());
      }
      if (!j.contains("normalization") || j["normalization"] != "tuple-sum")
        throw FormatError("m-table line has an unexpected normalization");
      t.put({DoubledIndex::from_json(j.at("T1")), MultiIndex::from_json(j.at("alpha")), gauss_from_json(j.at("b"))});
    }
    return t;
  }

 private:
  std::vector<Entry> entries_;
  std::map<std::pair<std::string, MultiIndex>, std::size_t> index_;
};

/// Every 3x3 index with trace <= trace_bound (non-PSD ones give 0) against
/// every alpha in the list.
inline MCoeffTable m_table(DerivEngine& d, std::int64_t trace_bound, const std::vector<MultiIndex>& alphas) {
  for (const auto& a : alphas)
    if (a.r() != 4) throw InvalidOrder("m_table entries need |alpha| = 4");
  MCoeffTable table;
  for_each_index(3, trace_bound, -1, [&](const Matrix<GaussInt64>& m) {
    const DoubledIndex t1 = DoubledIndex::from_small(m);
    for (const auto& a : alphas) table.put({t1, a, tuple_sum_x(d, t1, 1, a)});
    return true;
  });
  return table;
}

}  // namespace hsl
