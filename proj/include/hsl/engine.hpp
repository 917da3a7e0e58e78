#pragma once

// Per-lattice caches shared by the coefficient routines: shells, unit-orbit
// representatives, pair histograms and the bitset tables of the norm-2 shell.
// Everything is built lazily under a mutex and immutable afterwards.
//
// Inner products run in 16-bit storage with 32-bit accumulation. For a vector v
// we keep its dual x = S v twice, once as (xr, xi) pairs and once rotated to
// (xi, -xr), so that for any w
//   <v, w> = w^* S v = sum_k conj(w_k) x_k
// is two 16-lane integer dot products.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#if defined(__AVX2__)
#include <immintrin.h>
#endif

#include "hsl/error.hpp"
#include "hsl/exactnum.hpp"
#include "hsl/lattice.hpp"
#include "hsl/parallel.hpp"
#include "hsl/shell_cache.hpp"

namespace hsl {

inline constexpr std::size_t kRank = 8;
inline constexpr std::size_t kLanes = 2 * kRank;
// Keeps every 16-lane product sum inside int32.
inline constexpr std::int32_t kLaneLimit = 8191;
// Largest norm whose shell is materialised just to learn its size.
inline constexpr std::int64_t kShellSizeEnumerate = 6;

struct EngineConfig {
  unsigned threads = 0;  // 0 = all hardware threads
  std::optional<std::filesystem::path> cache_dir;
};

struct DualVec {
  alignas(32) std::array<std::int16_t, kLanes> x{};
  alignas(32) std::array<std::int16_t, kLanes> xrot{};
};

/// <v, w> where d is the dual of v and w is a packed shell vector.
inline GaussInt64 ip(const std::int16_t* w, const DualVec& d) {
#if defined(__AVX2__)
  const __m256i wv = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(w));
  const __m256i p = _mm256_madd_epi16(wv, _mm256_load_si256(reinterpret_cast<const __m256i*>(d.x.data())));
  const __m256i q = _mm256_madd_epi16(wv, _mm256_load_si256(reinterpret_cast<const __m256i*>(d.xrot.data())));
  __m256i h = _mm256_hadd_epi32(p, q);
  h = _mm256_hadd_epi32(h, h);
  const __m128i s = _mm_add_epi32(_mm256_castsi256_si128(h), _mm256_extracti128_si256(h, 1));
  return {_mm_extract_epi32(s, 0), _mm_extract_epi32(s, 1)};
#else
  std::int32_t re = 0;
  std::int32_t im = 0;
  for (std::size_t k = 0; k < kLanes; ++k) {
    re += static_cast<std::int32_t>(w[k]) * d.x[k];
    im += static_cast<std::int32_t>(w[k]) * d.xrot[k];
  }
  return {re, im};
#endif
}

/// Dense histogram of Gaussian integers c with |re|, |im| <= radius.
class CodeHistogram {
 public:
  CodeHistogram() = default;
  explicit CodeHistogram(std::int64_t radius)
      : radius_(radius), side_(2 * radius + 1), counts_(static_cast<std::size_t>(side_ * side_), 0) {}

  [[nodiscard]] std::int64_t radius() const { return radius_; }
  [[nodiscard]] bool contains(const GaussInt64& c) const {
    return c.re >= -radius_ && c.re <= radius_ && c.im >= -radius_ && c.im <= radius_;
  }
  [[nodiscard]] std::uint64_t at(const GaussInt64& c) const { return contains(c) ? counts_[slot(c)] : 0; }
  void add(const GaussInt64& c, std::uint64_t k) { counts_[slot(c)] += k; }
  void merge(const CodeHistogram& o) {
    for (std::size_t s = 0; s < counts_.size(); ++s) counts_[s] += o.counts_[s];
  }
  [[nodiscard]] std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
  }

 private:
  [[nodiscard]] std::size_t slot(const GaussInt64& c) const {
    return static_cast<std::size_t>((c.re + radius_) * side_ + (c.im + radius_));
  }
  std::int64_t radius_ = 0;
  std::int64_t side_ = 1;
  std::vector<std::uint64_t> counts_;
};

/// Bitsets over the norm-2 shell: bits(v, c) = { w : <v, w> = c }.
class Norm2Table {
 public:
  static constexpr std::int64_t kRadius = 2;  // |<v,w>|^2 <= 2*2

  Norm2Table() = default;
  Norm2Table(std::size_t size, std::size_t words) : size_(size), words_(words) {}

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] std::size_t words() const { return words_; }

  /// Code slot of c, or -1 when no pair of norm-2 vectors has inner product c.
  static int code(const GaussInt64& c) {
    if (c.re < -kRadius || c.re > kRadius || c.im < -kRadius || c.im > kRadius) return -1;
    if (c.re * c.re + c.im * c.im > 4) return -1;
    return static_cast<int>((c.re + kRadius) * 5 + (c.im + kRadius));
  }
  static constexpr int kCodes = 25;

  [[nodiscard]] const std::uint64_t* bits(std::size_t v, int code) const {
    return data_.data() + (v * kCodes + static_cast<std::size_t>(code)) * words_;
  }
  std::uint64_t* bits(std::size_t v, int code) {
    return data_.data() + (v * kCodes + static_cast<std::size_t>(code)) * words_;
  }
  [[nodiscard]] int pair_code(std::size_t v, std::size_t w) const { return codes_[v * size_ + w]; }

  void allocate() {
    data_.assign(size_ * kCodes * words_, 0);
    codes_.assign(size_ * size_, -1);
  }
  void set(std::size_t v, std::size_t w, int code) {
    codes_[v * size_ + w] = static_cast<std::int8_t>(code);
    bits(v, code)[w / 64] |= std::uint64_t{1} << (w % 64);
  }

 private:
  std::size_t size_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> data_;
  std::vector<std::int8_t> codes_;
};

/// For every vector u of a small shell and every code c, the indices of the
/// vectors w of a target shell with <u, w> = c, concatenated.
class BucketLists {
 public:
  BucketLists() = default;
  BucketLists(std::int64_t radius, std::size_t anchors)
      : radius_(radius), side_(2 * radius + 1), anchors_(anchors) {}

  [[nodiscard]] std::span<const std::uint32_t> get(std::size_t u, const GaussInt64& c) const {
    if (c.re < -radius_ || c.re > radius_ || c.im < -radius_ || c.im > radius_) return {};
    const std::size_t s = u * static_cast<std::size_t>(side_ * side_) +
                          static_cast<std::size_t>((c.re + radius_) * side_ + (c.im + radius_));
    return {items_.data() + offsets_[s], items_.data() + offsets_[s + 1]};
  }

  std::int64_t radius_ = 0;
  std::int64_t side_ = 1;
  std::size_t anchors_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> items_;
};

class LatticeContext {
 public:
  LatticeContext(int id, EngineConfig config)
      : gram_(load_gram(id)), form_(ldl(gram_)), config_(std::move(config)) {
    for (std::size_t r = 0; r < kRank; ++r)
      for (std::size_t c = 0; c < kRank; ++c) {
        const auto e = gauss_cast<std::int64_t>(gram_.entries(r, c));
        g64_[2 * (r * kRank + c)] = e.re;
        g64_[2 * (r * kRank + c) + 1] = e.im;
      }
  }

  LatticeContext(const LatticeContext&) = delete;
  LatticeContext& operator=(const LatticeContext&) = delete;

  [[nodiscard]] int id() const { return gram_.id; }
  [[nodiscard]] const GramMatrix& gram() const { return gram_; }
  [[nodiscard]] const ScaledForm& form() const { return form_; }
  [[nodiscard]] unsigned threads() const { return resolve_threads(config_.threads); }
  [[nodiscard]] const EngineConfig& config() const { return config_; }

  DualVec dual(const std::int16_t* v) const {
    DualVec d;
    for (std::size_t r = 0; r < kRank; ++r) {
      std::int64_t xr = 0;
      std::int64_t xi = 0;
      for (std::size_t c = 0; c < kRank; ++c) {
        const std::int64_t gr = g64_[2 * (r * kRank + c)];
        const std::int64_t gi = g64_[2 * (r * kRank + c) + 1];
        xr += gr * v[2 * c] - gi * v[2 * c + 1];
        xi += gr * v[2 * c + 1] + gi * v[2 * c];
      }
      if (std::abs(xr) > kLaneLimit || std::abs(xi) > kLaneLimit)
        throw OverflowError("dual vector exceeds the 16-bit inner-product range");
      d.x[2 * r] = static_cast<std::int16_t>(xr);
      d.x[2 * r + 1] = static_cast<std::int16_t>(xi);
      d.xrot[2 * r] = static_cast<std::int16_t>(xi);
      d.xrot[2 * r + 1] = static_cast<std::int16_t>(-xr);
    }
    return d;
  }

  /// Full shell of norm t; odd or negative t gives an empty shell.
  const VectorShell& shell(std::int64_t t) {
    std::lock_guard lock(mutex_);
    return shell_locked(t);
  }

  /// |shell(t)|. Norms above kShellSizeEnumerate are counted without storing
  /// the shell unless it is already resident.
  std::uint64_t shell_size(std::int64_t t) {
    {
      std::lock_guard lock(mutex_);
      auto it = shells_.find(t);
      if (it != shells_.end()) return it->second.size();
    }
    if (t < 0 || t % 2 != 0) return 0;
    if (t <= kShellSizeEnumerate) return shell(t).size();
    return norm_counts(t)[static_cast<std::size_t>(t)];
  }

  /// Indices of one representative per unit orbit {v, iv, -v, -iv} (the
  /// canonically smallest member).
  const std::vector<std::uint32_t>& orbit_reps(std::int64_t t) {
    std::lock_guard lock(mutex_);
    auto it = reps_.find(t);
    if (it != reps_.end()) return it->second;
    const VectorShell& s = shell_locked(t);
    std::vector<std::uint32_t> reps;
    std::array<std::int16_t, kLanes> img{};
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto v = s.raw(k);
      bool smallest = true;
      for (unsigned u = 1; u < 4 && smallest; ++u) {
        for (std::size_t j = 0; j < kRank; ++j) {
          const auto z = times_unit(GaussInt64(v[2 * j], v[2 * j + 1]), u);
          img[2 * j] = static_cast<std::int16_t>(z.re);
          img[2 * j + 1] = static_cast<std::int16_t>(z.im);
        }
        if (std::lexicographical_compare(img.begin(), img.end(), v.begin(), v.end())) smallest = false;
      }
      if (smallest) reps.push_back(static_cast<std::uint32_t>(k));
    }
    return reps_.emplace(t, std::move(reps)).first->second;
  }

  /// hist[c] = #{(v1, v2) : |v1|^2 = t1, |v2|^2 = t2, <v1, v2> = c}.
  const CodeHistogram& pair_hist(std::int64_t t1, std::int64_t t2) {
    {
      std::lock_guard lock(mutex_);
      auto it = pair_.find({t1, t2});
      if (it != pair_.end()) return it->second;
    }
    CodeHistogram h = compute_pair_hist(t1, t2);
    std::lock_guard lock(mutex_);
    return pair_.emplace(std::make_pair(t1, t2), std::move(h)).first->second;
  }

  const Norm2Table& norm2_table() {
    std::lock_guard lock(mutex_);
    if (norm2_) return *norm2_;
    const VectorShell& s = shell_locked(2);
    auto table = std::make_unique<Norm2Table>(s.size(), (s.size() + 63) / 64);
    table->allocate();
    for (std::size_t v = 0; v < s.size(); ++v) {
      const DualVec d = dual(s.raw(v).data());
      for (std::size_t w = 0; w < s.size(); ++w) {
        const int code = Norm2Table::code(ip(s.raw(w).data(), d));
        if (code < 0) throw Error("norm-2 inner product outside the Cauchy-Schwarz range");
        table->set(v, w, code);
      }
    }
    norm2_ = std::move(table);
    return *norm2_;
  }

  /// Bucket lists from the shell of norm s (anchors) into the shell of norm t,
  /// or nullptr when the table would be too large.
  const BucketLists* buckets(std::int64_t s, std::int64_t t) {
    constexpr std::size_t kMaxEntries = std::size_t{40'000'000};
    {
      std::lock_guard lock(mutex_);
      auto it = buckets_.find({s, t});
      if (it != buckets_.end()) return it->second.get();
    }
    const VectorShell& a = shell(s);
    const VectorShell& b = shell(t);
    if (a.size() * b.size() > kMaxEntries || a.empty() || b.empty()) return nullptr;
    const std::int64_t radius = isqrt(s * t);
    auto lists = std::make_unique<BucketLists>(radius, a.size());
    const auto cells = static_cast<std::size_t>(lists->side_ * lists->side_);
    std::vector<std::vector<std::uint32_t>> per_anchor =
        parallel_map<std::vector<std::uint32_t>>(a.size(), threads(), [&](std::size_t u) {
          const DualVec d = dual(a.raw(u).data());
          std::vector<std::uint32_t> code_of(b.size());
          std::vector<std::size_t> fill(cells + 1, 0);
          for (std::size_t w = 0; w < b.size(); ++w) {
            const GaussInt64 c = ip(b.raw(w).data(), d);
            code_of[w] = static_cast<std::uint32_t>((c.re + radius) * lists->side_ + (c.im + radius));
            ++fill[code_of[w] + 1];
          }
          for (std::size_t k = 0; k < cells; ++k) fill[k + 1] += fill[k];
          // [cells+1 prefix sums][b.size() sorted items]
          std::vector<std::uint32_t> out(cells + 1 + b.size());
          for (std::size_t k = 0; k <= cells; ++k) out[k] = static_cast<std::uint32_t>(fill[k]);
          for (std::size_t w = 0; w < b.size(); ++w)
            out[cells + 1 + fill[code_of[w]]++] = static_cast<std::uint32_t>(w);
          return out;
        });
    lists->offsets_.resize(a.size() * cells + 1);
    lists->items_.reserve(a.size() * b.size());
    for (std::size_t u = 0; u < a.size(); ++u) {
      const auto& o = per_anchor[u];
      const std::size_t base = lists->items_.size();
      for (std::size_t k = 0; k < cells; ++k) lists->offsets_[u * cells + k] = base + o[k];
      lists->items_.insert(lists->items_.end(), o.begin() + static_cast<std::ptrdiff_t>(cells + 1), o.end());
      per_anchor[u] = {};
    }
    lists->offsets_[a.size() * cells] = lists->items_.size();
    std::lock_guard lock(mutex_);
    return buckets_.emplace(std::make_pair(s, t), std::move(lists)).first->second.get();
  }

  /// a^{(1)}(m) for the norms 0..t_max, from one ball enumeration (memoized).
  std::vector<std::uint64_t> norm_counts(std::int64_t t_max) {
    std::lock_guard lock(mutex_);
    if (static_cast<std::int64_t>(norm_counts_.size()) <= t_max)
      norm_counts_ = form_.count_up_to(t_max, threads());
    return {norm_counts_.begin(), norm_counts_.begin() + t_max + 1};
  }

 private:
  const VectorShell& shell_locked(std::int64_t t) {
    auto it = shells_.find(t);
    if (it != shells_.end()) return it->second;
    VectorShell s = load_or_enumerate(t);
    for (const auto c : s.packed())
      if (c > kLaneLimit || c < -kLaneLimit) throw OverflowError("shell coordinates exceed the fast-path range");
    return shells_.emplace(t, std::move(s)).first->second;
  }

  VectorShell load_or_enumerate(std::int64_t t) {
    if (t < 0 || t % 2 != 0) return VectorShell(gram_.id, t, kRank, {});
    if (config_.cache_dir) {
      const auto file = shell_cache_path(*config_.cache_dir, gram_.id, t);
      if (auto cached = read_shell_cache(file, gram_, t)) {
        // A consistently truncated file passes the per-line checks; the ball
        // count catches it.
        if (cached->size() != form_.count_up_to(t, threads())[static_cast<std::size_t>(t)])
          throw FormatError("shell cache " + file.string() + " has the wrong number of vectors");
        return std::move(*cached);
      }
      VectorShell s(gram_.id, t, kRank, form_.collect(t, threads()));
      write_shell_cache(file, s);
      return s;
    }
    return VectorShell(gram_.id, t, kRank, form_.collect(t, threads()));
  }

  CodeHistogram compute_pair_hist(std::int64_t t1, std::int64_t t2) {
    const std::int64_t radius = isqrt(std::max<std::int64_t>(t1, 0) * std::max<std::int64_t>(t2, 0));
    CodeHistogram out(radius);
    if (t1 < 0 || t2 < 0) return out;
    if (t1 == 0 || t2 == 0) {
      out.add({0, 0}, shell(t1).size() * shell(t2).size());
      return out;
    }
    // Anchor on the smaller shell; swapping the roles conjugates the code.
    const bool swap = t1 > t2;
    const std::int64_t small = swap ? t2 : t1;
    const std::int64_t large = swap ? t1 : t2;
    const VectorShell& a = shell(small);
    const VectorShell& b = shell(large);
    const auto& reps = orbit_reps(small);
    const auto chunks = split_range(reps.size(), std::min<std::size_t>(reps.size(), 64));
    auto parts = parallel_map<CodeHistogram>(chunks.size(), threads(), [&](std::size_t k) {
      CodeHistogram h(radius);
      for (std::size_t r = chunks[k].first; r < chunks[k].second; ++r) {
        const DualVec d = dual(a.raw(reps[r]).data());
        for (std::size_t w = 0; w < b.size(); ++w) {
          const GaussInt64 c = ip(b.raw(w).data(), d);
          h.add(swap ? conj(c) : c, 4);
        }
      }
      return h;
    });
    for (const auto& p : parts) out.merge(p);
    return out;
  }

  GramMatrix gram_;
  ScaledForm form_;
  EngineConfig config_;
  std::array<std::int64_t, 2 * kRank * kRank> g64_{};

  std::recursive_mutex mutex_;
  std::map<std::int64_t, VectorShell> shells_;
  std::map<std::int64_t, std::vector<std::uint32_t>> reps_;
  std::map<std::pair<std::int64_t, std::int64_t>, CodeHistogram> pair_;
  std::map<std::pair<std::int64_t, std::int64_t>, std::unique_ptr<BucketLists>> buckets_;
  std::unique_ptr<Norm2Table> norm2_;
  std::vector<std::uint64_t> norm_counts_;
};

/// The three built-in lattices sharing one configuration.
class Engine {
 public:
  explicit Engine(EngineConfig config = {}) : config_(std::move(config)) {}

  LatticeContext& lattice(int id) {
    if (id < 1 || id > 3) throw UnknownLattice(id);
    std::lock_guard lock(mutex_);
    auto& slot = contexts_[static_cast<std::size_t>(id - 1)];
    if (!slot) slot = std::make_unique<LatticeContext>(id, config_);
    return *slot;
  }

  [[nodiscard]] const EngineConfig& config() const { return config_; }

 private:
  EngineConfig config_;
  std::mutex mutex_;
  std::array<std::unique_ptr<LatticeContext>, 3> contexts_;
};

}  // namespace hsl
