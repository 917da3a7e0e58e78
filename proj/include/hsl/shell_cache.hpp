#pragma once

// On-disk shell cache. One file per (lattice, norm, format version):
//
//   {"lattice":1,"norm":2,"count":480,"version":1}
//   [["0","0"],["1","0"],...]          <- one vector per line, canonical order
//
// Files are write-once. A load is accepted only if the header matches, the
// count matches, the vectors are strictly increasing, and every vector has the
// recorded norm when recomputed against the Gram matrix.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hsl/error.hpp"
#include "hsl/json_io.hpp"
#include "hsl/lattice.hpp"

namespace hsl {

inline constexpr int kShellCacheVersion = 1;

inline std::filesystem::path shell_cache_path(const std::filesystem::path& dir, int lattice, std::int64_t norm) {
  return dir / ("shell_L" + std::to_string(lattice) + "_N" + std::to_string(norm) + "_v" +
                std::to_string(kShellCacheVersion) + ".jsonl");
}

namespace detail {

// Parses one vector line of the form [["a","b"],["c","d"],...] into out.
inline void parse_vector_line(const std::string& line, std::size_t rank, std::vector<std::int16_t>& out) {
  std::size_t pos = 0;
  std::size_t values = 0;
  auto fail = [&] { throw FormatError("malformed shell vector line: " + line.substr(0, 80)); };
  while (pos < line.size()) {
    const char c = line[pos];
    if (c == '"') {
      const std::size_t end = line.find('"', pos + 1);
      if (end == std::string::npos) fail();
      const std::string tok = line.substr(pos + 1, end - pos - 1);
      const BigInt v = parse_bigint(tok);
      out.push_back(narrow<std::int16_t>(v));
      ++values;
      pos = end + 1;
    } else if (c == '[' || c == ']' || c == ',' || c == ' ') {
      ++pos;
    } else {
      fail();
    }
  }
  if (values != 2 * rank) fail();
}

}  // namespace detail

inline void write_shell_cache(const std::filesystem::path& file, const VectorShell& shell) {
  std::filesystem::create_directories(file.parent_path());
  const auto tmp = std::filesystem::path(file.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error("cannot write shell cache " + tmp.string());
    Json header;
    header["lattice"] = shell.lattice_id();
    header["norm"] = shell.norm_target();
    header["count"] = shell.size();
    header["version"] = kShellCacheVersion;
    os << header.dump() << '\n';
    std::string line;
    for (std::size_t k = 0; k < shell.size(); ++k) {
      const auto r = shell.raw(k);
      line.clear();
      line += '[';
      for (std::size_t j = 0; j < shell.rank(); ++j) {
        if (j) line += ',';
        line += "[\"" + std::to_string(r[2 * j]) + "\",\"" + std::to_string(r[2 * j + 1]) + "\"]";
      }
      line += "]\n";
      os << line;
    }
    if (!os) throw Error("short write to shell cache " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

/// Loads and validates a cached shell; nullopt when the file is absent.
/// A present but inconsistent file raises FormatError.
inline std::optional<VectorShell> read_shell_cache(const std::filesystem::path& file, const GramMatrix& g,
                                                   std::int64_t norm) {
  std::ifstream is(file, std::ios::binary);
  if (!is) return std::nullopt;
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty shell cache " + file.string());
  Json header;
  try {
    header = Json::parse(line);
  } catch (const Json::exception& e) {
    throw FormatError("bad shell cache header in " + file.string() + ": " + e.what());
  }
  if (header.value("lattice", -1) != g.id || header.value("norm", std::int64_t{-1}) != norm ||
      header.value("version", -1) != kShellCacheVersion || !header.contains("count")) {
    throw FormatError("shell cache header mismatch in " + file.string());
  }
  const auto count = header["count"].get<std::size_t>();
  const std::size_t n = g.rank();
  std::vector<std::int16_t> packed;
  packed.reserve(count * 2 * n);
  std::size_t lines = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    detail::parse_vector_line(line, n, packed);
    ++lines;
  }
  if (lines != count) throw FormatError("shell cache count mismatch in " + file.string());

  // Recompute: strict canonical order and the norm of every vector.
  std::vector<std::int64_t> row(n * n * 2);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const auto e = gauss_cast<std::int64_t>(g.entries(r, c));
      row[2 * (r * n + c)] = e.re;
      row[2 * (r * n + c) + 1] = e.im;
    }
  const std::size_t stride = 2 * n;
  for (std::size_t k = 0; k < count; ++k) {
    const std::int16_t* v = packed.data() + k * stride;
    if (k > 0 && !std::lexicographical_compare(v - stride, v, v, v + stride))
      throw FormatError("shell cache not in canonical order: " + file.string());
    std::int64_t re = 0;
    std::int64_t im = 0;
    for (std::size_t a = 0; a < n; ++a) {
      std::int64_t xr = 0;
      std::int64_t xi = 0;
      for (std::size_t b = 0; b < n; ++b) {
        const std::int64_t gr = row[2 * (a * n + b)];
        const std::int64_t gi = row[2 * (a * n + b) + 1];
        xr += gr * v[2 * b] - gi * v[2 * b + 1];
        xi += gr * v[2 * b + 1] + gi * v[2 * b];
      }
      re += v[2 * a] * xr + v[2 * a + 1] * xi;
      im += v[2 * a] * xi - v[2 * a + 1] * xr;
    }
    if (re != norm || im != 0) throw FormatError("shell cache vector with wrong norm in " + file.string());
  }
  return VectorShell(g.id, norm, n, std::move(packed));
}

}  // namespace hsl
