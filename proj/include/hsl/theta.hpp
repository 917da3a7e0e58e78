#pragma once

// Representation numbers of the Hermitian theta series:
//
//   a_i^(n)(T/2) = #{ (v_1, ..., v_n) : <v_j, v_k> = T[k][j] for all j, k }
//
// with <v, w> = w^* S_i v. Note the transposition: T[k][j] records <v_j, v_k>,
// so the lower triangle T[k][j] (k > j) holds the inner product of the earlier
// vector v_j against the later vector v_k.
//
// Counting runs over orbits of simultaneous unit scaling (v_j -> u v_j keeps
// every <v_j, v_k>), so the first vector is taken from orbit representatives
// and each hit is worth 4. Later vectors are drawn from candidate lists that
// are filtered as soon as each earlier vector is fixed.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hsl/engine.hpp"
#include "hsl/error.hpp"
#include "hsl/exactnum.hpp"
#include "hsl/json_io.hpp"
#include "hsl/linalg.hpp"
#include "hsl/matrix.hpp"

namespace hsl {

/// A Fourier index h stored doubled: T = 2h, Hermitian over Z[i] with even
/// real diagonal.
class DoubledIndex {
 public:
  explicit DoubledIndex(Matrix<GaussInt> t) : t_(std::move(t)) {
    if (!t_.square()) throw InvalidIndex("index matrix must be square");
    for (std::size_t k = 0; k < t_.rows(); ++k) {
      const GaussInt& d = t_(k, k);
      if (d.im != 0) throw InvalidIndex("diagonal entries must be real");
      if (d.re % 2 != 0) throw InvalidIndex("diagonal entries must be even");
    }
    if (!is_hermitian(t_)) throw InvalidIndex("index matrix must be Hermitian");
  }

  static DoubledIndex diagonal(const std::vector<std::int64_t>& d) {
    Matrix<GaussInt> t(d.size(), d.size());
    for (std::size_t k = 0; k < d.size(); ++k) t(k, k) = GaussInt(d[k]);
    return DoubledIndex(std::move(t));
  }
  static DoubledIndex from_small(const Matrix<GaussInt64>& m) {
    return DoubledIndex(m.map([](const GaussInt64& z) { return gauss_cast<BigInt>(z); }));
  }
  static DoubledIndex from_json(const Json& j) { return DoubledIndex(matrix_from_json(j)); }

  [[nodiscard]] std::size_t n() const { return t_.rows(); }
  [[nodiscard]] const Matrix<GaussInt>& matrix() const { return t_; }
  const GaussInt& operator()(std::size_t r, std::size_t c) const { return t_(r, c); }
  [[nodiscard]] Matrix<GaussInt64> small() const {
    return t_.map([](const GaussInt& z) { return gauss_cast<std::int64_t>(z); });
  }
  [[nodiscard]] Json to_json() const { return hsl::to_json(t_); }
  [[nodiscard]] DoubledIndex conjugate() const {
    return DoubledIndex(t_.map([](const GaussInt& z) { return conj(z); }));
  }

  friend bool operator==(const DoubledIndex&, const DoubledIndex&) = default;

 private:
  Matrix<GaussInt> t_;
};

inline std::string to_string(const DoubledIndex& t) { return t.to_json().dump(); }

struct RepCountOptions {
  // Answer 0 for non-PSD indices without searching. Turn off to observe the
  // vanishing instead of assuming it.
  bool prune = true;
};

/// Cauchy-Schwarz on every off-diagonal pair.
inline bool cauchy_schwarz_ok(const Matrix<GaussInt64>& t) {
  for (std::size_t j = 0; j < t.rows(); ++j)
    for (std::size_t k = j + 1; k < t.rows(); ++k)
      if (norm(t(k, j)) > t(j, j).re * t(k, k).re) return false;
  return true;
}

/// Simultaneous permutation P^T T P: out(a, b) = t(perm[a], perm[b]).
template <class Z>
Matrix<Z> permute_index(const Matrix<Z>& t, const std::vector<std::size_t>& perm) {
  Matrix<Z> out(perm.size(), perm.size());
  for (std::size_t a = 0; a < perm.size(); ++a)
    for (std::size_t b = 0; b < perm.size(); ++b) out(a, b) = t(perm[a], perm[b]);
  return out;
}

/// Depth-first search over vector tuples with a fixed Gram matrix, one list of
/// surviving candidates per later level. Levels are used in the given order.
class TupleSearch {
 public:
  TupleSearch(LatticeContext& ctx, Matrix<GaussInt64> t) : ctx_(ctx), t_(std::move(t)), n_(t_.rows()) {
    for (std::size_t k = 0; k < n_; ++k) {
      if (t_(k, k).re <= 0) throw InvalidIndex("tuple search needs positive diagonal entries");
      shells_.push_back(&ctx_.shell(t_(k, k).re));
    }
  }

  [[nodiscard]] std::size_t levels() const { return n_; }
  [[nodiscard]] const VectorShell& shell(std::size_t k) const { return *shells_[k]; }

  /// Enumerates every admissible prefix (v_0 .. v_{depth-1}) and hands
  /// visit(acc, prefix, completions) the shell indices of the prefix and the
  /// number of ways to finish the tuple. With reps_only, v_0 ranges over unit
  /// orbit representatives. Work is split over v_0; one accumulator per task,
  /// returned in task order.
  template <class Acc, class Visit>
  std::vector<Acc> search(std::size_t depth, bool reps_only, Visit&& visit) {
    if (depth == 0 || depth > n_) throw InvalidIndex("prefix depth out of range");
    std::vector<std::uint32_t> firsts;
    if (reps_only) {
      firsts = ctx_.orbit_reps(t_(0, 0).re);
    } else {
      firsts.resize(shells_[0]->size());
      std::iota(firsts.begin(), firsts.end(), 0U);
    }
    std::vector<const BucketLists*> buckets(n_, nullptr);
    for (std::size_t k = 1; k < n_; ++k) buckets[k] = ctx_.buckets(t_(0, 0).re, t_(k, k).re);

    const auto chunks = split_range(firsts.size(), std::min<std::size_t>(firsts.size(), 256));
    return parallel_map<Acc>(chunks.size(), ctx_.threads(), [&](std::size_t c) {
      Acc acc{};
      Frame frame(n_);
      for (std::size_t r = chunks[c].first; r < chunks[c].second; ++r) {
        const std::uint32_t v0 = firsts[r];
        frame.prefix[0] = v0;
        const DualVec d = ctx_.dual(shells_[0]->raw(v0).data());
        bool alive = true;
        for (std::size_t k = 1; k < n_ && alive; ++k) {
          auto& list = frame.lists[1][k];
          list.clear();
          if (buckets[k] != nullptr) {
            const auto b = buckets[k]->get(v0, t_(k, 0));
            list.assign(b.begin(), b.end());
          } else {
            const VectorShell& s = *shells_[k];
            for (std::size_t w = 0; w < s.size(); ++w)
              if (ip(s.raw(w).data(), d) == t_(k, 0)) list.push_back(static_cast<std::uint32_t>(w));
          }
          alive = !list.empty();
        }
        if (!alive) continue;
        walk(1, depth, frame, acc, visit);
      }
      return acc;
    });
  }

  /// Total number of tuples, counted with v_0 over orbit representatives.
  std::uint64_t count() {
    auto parts = search<std::uint64_t>(1, true, [](std::uint64_t& acc, std::span<const std::uint32_t>,
                                                   std::uint64_t completions) { acc += completions; });
    std::uint64_t total = 0;
    for (auto p : parts) total += p;
    return 4 * total;
  }

 private:
  struct Frame {
    explicit Frame(std::size_t n) : prefix(n, 0), lists(n + 1, std::vector<std::vector<std::uint32_t>>(n)) {}
    std::vector<std::uint32_t> prefix;
    // lists[l][k]: candidates for level k once levels < l are fixed
    std::vector<std::vector<std::vector<std::uint32_t>>> lists;
  };

  // Number of completions of levels >= l given lists[l].
  std::uint64_t count_rest(std::size_t l, Frame& f) {
    if (l >= n_) return 1;
    if (l == n_ - 1) return f.lists[l][l].size();
    std::uint64_t total = 0;
    for (const std::uint32_t w : f.lists[l][l]) {
      if (!narrow_lists(l, w, f)) continue;
      total += count_rest(l + 1, f);
    }
    return total;
  }

  // Fixes level l to w and filters later lists into lists[l+1]; false if one empties.
  bool narrow_lists(std::size_t l, std::uint32_t w, Frame& f) {
    const DualVec d = ctx_.dual(shells_[l]->raw(w).data());
    for (std::size_t k = l + 1; k < n_; ++k) {
      const auto& src = f.lists[l][k];
      auto& dst = f.lists[l + 1][k];
      dst.clear();
      const GaussInt64 want = t_(k, l);
      const VectorShell& s = *shells_[k];
      for (const std::uint32_t x : src)
        if (ip(s.raw(x).data(), d) == want) dst.push_back(x);
      if (dst.empty()) return false;
    }
    return true;
  }

  template <class Acc, class Visit>
  void walk(std::size_t l, std::size_t depth, Frame& f, Acc& acc, Visit& visit) {
    if (l == depth) {
      const std::uint64_t completions = count_rest(l, f);
      if (completions != 0) visit(acc, std::span<const std::uint32_t>(f.prefix.data(), depth), completions);
      return;
    }
    for (const std::uint32_t w : f.lists[l][l]) {
      f.prefix[l] = w;
      if (l + 1 < n_ && !narrow_lists(l, w, f)) continue;
      walk(l + 1, depth, f, acc, visit);
    }
  }

  LatticeContext& ctx_;
  Matrix<GaussInt64> t_;
  std::size_t n_;
  std::vector<const VectorShell*> shells_;
};

namespace detail {

// All diagonal entries 2: candidate sets are 480-bit masks over the norm-2 shell.
inline std::uint64_t count_norm2_tuples(LatticeContext& ctx, const Matrix<GaussInt64>& t) {
  const std::size_t n = t.rows();
  const Norm2Table& table = ctx.norm2_table();
  std::vector<int> code(n * n, -1);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < k; ++j) {
      code[k * n + j] = Norm2Table::code(t(k, j));
      if (code[k * n + j] < 0) return 0;
    }
  const std::size_t words = table.words();
  const auto& reps = ctx.orbit_reps(2);
  const auto chunks = split_range(reps.size(), reps.size());

  // masks[l * n + k]: candidates of level k after levels < l are fixed
  auto rec = [&](auto&& self, std::size_t l, std::vector<std::uint64_t>& masks) -> std::uint64_t {
    const std::uint64_t* cur = masks.data() + (l * n + l) * words;
    if (l == n - 1) {
      std::uint64_t c = 0;
      for (std::size_t w = 0; w < words; ++w) c += static_cast<std::uint64_t>(std::popcount(cur[w]));
      return c;
    }
    std::uint64_t total = 0;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t bitsw = cur[w];
      while (bitsw != 0) {
        const std::size_t v = w * 64 + static_cast<std::size_t>(std::countr_zero(bitsw));
        bitsw &= bitsw - 1;
        bool alive = true;
        for (std::size_t k = l + 1; k < n && alive; ++k) {
          const std::uint64_t* src = masks.data() + (l * n + k) * words;
          const std::uint64_t* by = table.bits(v, code[k * n + l]);
          std::uint64_t* dst = masks.data() + ((l + 1) * n + k) * words;
          std::uint64_t any = 0;
          for (std::size_t q = 0; q < words; ++q) any |= (dst[q] = src[q] & by[q]);
          alive = any != 0;
        }
        if (alive) total += self(self, l + 1, masks);
      }
    }
    return total;
  };

  auto parts = parallel_map<std::uint64_t>(chunks.size(), ctx.threads(), [&](std::size_t c) {
    std::vector<std::uint64_t> masks(n * n * words, 0);
    std::uint64_t acc = 0;
    for (std::size_t r = chunks[c].first; r < chunks[c].second; ++r) {
      const std::size_t v0 = reps[r];
      bool alive = true;
      for (std::size_t k = 1; k < n && alive; ++k) {
        const std::uint64_t* by = table.bits(v0, code[k * n]);
        std::uint64_t* dst = masks.data() + (1 * n + k) * words;
        std::uint64_t any = 0;
        for (std::size_t q = 0; q < words; ++q) any |= (dst[q] = by[q]);
        alive = any != 0;
      }
      if (alive) acc += rec(rec, 1, masks);
    }
    return acc;
  });
  std::uint64_t total = 0;
  for (auto p : parts) total += p;
  return 4 * total;
}

}  // namespace detail

/// Drops zero-diagonal rows (their vectors must vanish). Returns false when the
/// count is zero for a reason independent of positivity: a zero diagonal entry
/// with a nonzero row, or a negative diagonal entry.
inline bool strip_zero_rows(const Matrix<GaussInt64>& t, Matrix<GaussInt64>& out) {
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < t.rows(); ++k) {
    const std::int64_t d = t(k, k).re;
    if (d < 0) return false;
    if (d == 0) {
      for (std::size_t j = 0; j < t.rows(); ++j)
        if (!t(k, j).is_zero()) return false;
      continue;
    }
    keep.push_back(k);
  }
  out = permute_index(t, keep);
  return true;
}

/// a_i^(n)(T/2) for one lattice.
inline BigInt rep_count(LatticeContext& ctx, const DoubledIndex& index, RepCountOptions opt = {}) {
  Matrix<GaussInt64> t;
  if (!strip_zero_rows(index.small(), t)) return 0;
  const std::size_t n = t.rows();
  if (n == 0) return 1;
  if (opt.prune && (!cauchy_schwarz_ok(t) || !is_psd_small(t))) return 0;

  // Smallest shells first; a simultaneous permutation of the tuple is a bijection.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return t(a, a).re < t(b, b).re; });
  t = permute_index(t, order);

  if (n == 1) return BigInt(ctx.shell_size(t(0, 0).re));
  if (n == 2) return BigInt(ctx.pair_hist(t(0, 0).re, t(1, 1).re).at(t(1, 0)));
  bool all_two = true;
  for (std::size_t k = 0; k < n; ++k) all_two = all_two && t(k, k).re == 2;
  if (all_two) return BigInt(detail::count_norm2_tuples(ctx, t));
  return BigInt(TupleSearch(ctx, t).count());
}

inline BigInt rep_count(Engine& engine, int lattice, const DoubledIndex& index, RepCountOptions opt = {}) {
  return rep_count(engine.lattice(lattice), index, opt);
}

/// [a^(1)(0), a^(1)(1), ..., a^(1)(N)]: shell sizes for norms 0, 2, ..., 2N.
inline std::vector<BigInt> theta_qcoeffs(LatticeContext& ctx, std::int64_t N) {
  if (N < 0) throw InvalidIndex("negative truncation");
  std::vector<BigInt> out;
  if (N <= 3) {
    for (std::int64_t m = 0; m <= N; ++m) out.emplace_back(ctx.shell(2 * m).size());
    return out;
  }
  const auto counts = ctx.norm_counts(2 * N);
  for (std::int64_t m = 0; m <= N; ++m) out.emplace_back(counts[static_cast<std::size_t>(2 * m)]);
  return out;
}

/// The 4x4 index [[T1, c], [c^*, 2m]] with T[3][j] = c_j = <v_j, v_4>.
inline Matrix<GaussInt64> assemble_block(const Matrix<GaussInt64>& t1, const std::vector<GaussInt64>& c,
                                          std::int64_t m) {
  const std::size_t n = t1.rows();
  Matrix<GaussInt64> t(n + 1, n + 1);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = 0; s < n; ++s) t(r, s) = t1(r, s);
  for (std::size_t j = 0; j < n; ++j) {
    t(n, j) = c[j];
    t(j, n) = conj(c[j]);
  }
  t(n, n) = GaussInt64(2 * m);
  return t;
}

/// Gaussian integers z with |z|^2 <= bound, in canonical (re, im) order.
inline std::vector<GaussInt64> gaussian_disk(std::int64_t bound) {
  std::vector<GaussInt64> out;
  if (bound < 0) return out;
  const std::int64_t r = isqrt(bound);
  for (std::int64_t a = -r; a <= r; ++a)
    for (std::int64_t b = -r; b <= r; ++b)
      if (a * a + b * b <= bound) out.emplace_back(a, b);
  return out;
}

struct BlockSum {
  BigInt lhs;
  BigInt rhs;
  std::uint64_t blocks = 0;  // admissible h_3 visited
};

/// Sum over the last row block of a^(4) against a^(3)(T1) * a^(1)(2m): every
/// triple with Gram T1 pairs with every v_4 of norm 2m exactly once.
inline BlockSum blocksum_check(LatticeContext& ctx, const DoubledIndex& t1, std::int64_t m) {
  if (t1.n() != 3) throw InvalidIndex("blocksum_check expects a 3x3 index");
  if (m < 0) throw InvalidIndex("negative norm");
  const Matrix<GaussInt64> s = t1.small();
  std::vector<std::vector<GaussInt64>> ranges;
  for (std::size_t j = 0; j < 3; ++j) ranges.push_back(gaussian_disk(s(j, j).re * 2 * m));
  BlockSum out;
  std::vector<GaussInt64> c(3);
  for (const auto& c0 : ranges[0])
    for (const auto& c1 : ranges[1])
      for (const auto& c2 : ranges[2]) {
        c = {c0, c1, c2};
        out.lhs += rep_count(ctx, DoubledIndex::from_small(assemble_block(s, c, m)));
        ++out.blocks;
      }
  out.rhs = rep_count(ctx, t1) * rep_count(ctx, DoubledIndex::diagonal({2 * m}));
  return out;
}

/// Coefficient store keyed by (tag, index). Tags are "1", "2", "3" for the
/// lattices or a combination label such as "F(8,-15,7)".
class CoeffTable {
 public:
  struct Key {
    std::string tag;
    std::string index;  // canonical JSON of T
    friend auto operator<=>(const Key&, const Key&) = default;
  };
  struct Entry {
    std::string tag;
    std::size_t n = 0;
    Json t;
    BigInt value;
  };

  /// Inserts a value; recomputing a stored key must reproduce it.
  void put(const std::string& tag, const DoubledIndex& t, const BigInt& value) {
    Key key{tag, t.to_json().dump()};
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      if (it->second.value != value)
        throw Error("coefficient table conflict for " + tag + " " + key.index + ": stored " +
                    it->second.value.str() + ", recomputed " + value.str());
      return;
    }
    entries_.emplace(std::move(key), Entry{tag, t.n(), t.to_json(), value});
  }

  [[nodiscard]] std::optional<BigInt> get(const std::string& tag, const DoubledIndex& t) const {
    auto it = entries_.find(Key{tag, t.to_json().dump()});
    if (it == entries_.end()) return std::nullopt;
    return it->second.value;
  }

  [[nodiscard]] std::size_t size() const { return entries_.size(); }

  [[nodiscard]] static Json record(const Entry& e) {
    Json j;
    if (e.tag.size() == 1 && e.tag[0] >= '1' && e.tag[0] <= '3')
      j["lattice"] = e.tag[0] - '0';
    else
      j["lattice"] = e.tag;
    j["n"] = e.n;
    j["T"] = e.t;
    j["value"] = e.value.str();
    return j;
  }

  void save(const std::filesystem::path& file, const Json& provenance) const {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream os(file);
    if (!os) throw Error("cannot write " + file.string());
    for (const auto& [k, e] : entries_) os << record(e).dump() << '\n';
    std::ofstream meta(file.string() + ".meta.json");
    meta << provenance.dump(2) << '\n';
  }

  void load(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw Error("cannot read " + file.string());
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      Json j;
      try {
        j = Json::parse(line);
      } catch (const Json::exception& e) {
        throw FormatError(std::string("bad coefficient record: ") + e.what());
      }
      const std::string tag = j.at("lattice").is_string() ? j["lattice"].get<std::string>()
                                                           : std::to_string(j["lattice"].get<int>());
      const DoubledIndex t = DoubledIndex::from_json(j.at("T"));
      if (t.n() != j.at("n").get<std::size_t>()) throw FormatError("record size does not match its index");
      put(tag, t, json_to_bigint(j.at("value")));
    }
  }

 private:
  std::map<Key, Entry> entries_;
};

}  // namespace hsl
