#pragma once

// Integer q-expansions on the upper half-plane: the discriminant form Delta,
// divisor sums, and the level-one weight-8 Eisenstein series 1 + 480 sum
// sigma_7(n) q^n, which is the theta series of every rank-16 even unimodular
// Z-lattice.

#include <cstdint>
#include <vector>

#include "hsl/error.hpp"
#include "hsl/exactnum.hpp"

namespace hsl {

struct QSeries {
  std::vector<BigInt> coeffs;  // coeffs[k] multiplies q^k

  [[nodiscard]] std::size_t size() const { return coeffs.size(); }
  const BigInt& operator[](std::size_t k) const { return coeffs[k]; }
};

/// sum_{d | n} d^k
inline BigInt sigma(unsigned k, std::int64_t n) {
  if (n < 1) throw DomainError("sigma needs n >= 1");
  BigInt s = 0;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    s += boost::multiprecision::pow(BigInt(d), k);
    if (d != n / d) s += boost::multiprecision::pow(BigInt(n / d), k);
  }
  return s;
}

/// tau(0..N) from q * prod_{n>=1} (1 - q^n)^24, truncated at q^N.
inline QSeries delta_coeffs(std::int64_t N) {
  if (N < 1) throw DomainError("delta_coeffs needs N >= 1");
  const auto len = static_cast<std::size_t>(N);  // the product is needed to q^(N-1)
  std::vector<BigInt> p(len, 0);
  p[0] = 1;
  for (std::size_t n = 1; n < len; ++n)
    for (int rep = 0; rep < 24; ++rep)
      for (std::size_t k = len; k-- > n;) p[k] -= p[k - n];  // multiply by (1 - q^n)
  QSeries out;
  out.coeffs.assign(len + 1, 0);
  for (std::size_t k = 0; k < len; ++k) out.coeffs[k + 1] = p[k];
  return out;
}

/// coeff[0] = 1, coeff[n] = 480 sigma_7(n).
inline QSeries rank16_theta_oracle(std::int64_t N) {
  if (N < 1) throw DomainError("rank16_theta_oracle needs N >= 1");
  QSeries out;
  out.coeffs.emplace_back(1);
  for (std::int64_t n = 1; n <= N; ++n) out.coeffs.push_back(480 * sigma(7, n));
  return out;
}

}  // namespace hsl
