#pragma once

// JSON encodings shared by caches, tables and reports. Integers travel as
// decimal strings; a Gaussian integer is ["re","im"].

#include <string>

#include <json.hpp>

#include "hsl/error.hpp"
#include "hsl/exactnum.hpp"
#include "hsl/matrix.hpp"

namespace hsl {

using Json = nlohmann::ordered_json;

inline BigInt parse_bigint(const std::string& s) {
  if (s.empty()) throw FormatError("empty integer string");
  std::size_t k = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (k == s.size()) throw FormatError("malformed integer '" + s + "'");
  for (; k < s.size(); ++k)
    if (s[k] < '0' || s[k] > '9') throw FormatError("malformed integer '" + s + "'");
  return BigInt(s[0] == '+' ? s.substr(1) : s);
}

/// Accepts a decimal string or a JSON integer.
inline BigInt json_to_bigint(const Json& j) {
  if (j.is_string()) return parse_bigint(j.get<std::string>());
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  throw FormatError("expected an integer or decimal string, got " + j.dump());
}

inline Json to_json(const GaussInt& z) { return Json::array({z.re.str(), z.im.str()}); }

inline GaussInt gauss_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("expected [\"re\",\"im\"], got " + j.dump());
  return {json_to_bigint(j[0]), json_to_bigint(j[1])};
}

inline Json to_json(const Matrix<GaussInt>& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Square matrix of ["re","im"] pairs.
inline Matrix<GaussInt> matrix_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("matrix must be a JSON array of rows");
  const std::size_t n = j.size();
  Matrix<GaussInt> m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    if (!j[r].is_array() || j[r].size() != n) throw FormatError("matrix must be square");
    for (std::size_t c = 0; c < n; ++c) m(r, c) = gauss_from_json(j[r][c]);
  }
  return m;
}

}  // namespace hsl
