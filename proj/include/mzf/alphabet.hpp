#pragma once

// sqrt(M)-PAM alphabets, the tau scale, quantizers and the additive bit mapping
// x = sum_b u_b 2^(b-1) with bit layer b = 1 the least significant.

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "mzf/channel.hpp"
#include "mzf/error.hpp"
#include "mzf/random.hpp"

namespace mzf {

struct PamAlphabet {
  int m = 4;        ///< complex QAM cardinality
  int sqrt_m = 2;   ///< PAM levels per real dimension
  int nbits = 1;    ///< log2(sqrt_m)
  double tau = 1.0; ///< 2^(1 - nbits)
  double energy = 1.0;
  std::vector<int> points;  ///< ascending odd integers

  int max_point() const { return sqrt_m - 1; }
};

inline PamAlphabet make_alphabet(int m) {
  int nbits = 0;
  bool ok = m >= 4;
  for (int v = m; ok && v > 1; v /= 4, ++nbits) {
    if (v % 4 != 0) ok = false;
  }
  if (!ok) throw ConfigError("make_alphabet: M must be a power of 4 (>= 4), got " + std::to_string(m));

  PamAlphabet a;
  a.m = m;
  a.nbits = nbits;
  a.sqrt_m = 1 << nbits;
  a.tau = std::ldexp(1.0, 1 - nbits);
  a.energy = (m - 1) / 3.0;
  for (int p = -(a.sqrt_m - 1); p <= a.sqrt_m - 1; p += 2) a.points.push_back(p);
  return a;
}

/// Nearest element of scale * points; ties go to the smaller magnitude.
inline double quantize_pam(double v, const PamAlphabet& alphabet, double scale) {
  const double u = v / scale;
  const int top = alphabet.max_point();
  if (u >= top) return scale * top;
  if (u <= -top) return -scale * top;
  // odd integers lo < u <= lo + 2
  double lo = 2.0 * std::floor((u - 1.0) / 2.0) + 1.0;
  if (lo + 2.0 <= u) lo += 2.0;
  const double hi = lo + 2.0;
  const double dlo = u - lo;
  const double dhi = hi - u;
  double pick;
  if (dlo < dhi) pick = lo;
  else if (dhi < dlo) pick = hi;
  else pick = std::abs(lo) <= std::abs(hi) ? lo : hi;  // at 0 the tie goes negative
  return scale * pick;
}

/// Integer index of the symbol nearest to v (in units of the unscaled alphabet).
inline int quantize_symbol(double v, const PamAlphabet& alphabet, double scale) {
  return static_cast<int>(std::lround(quantize_pam(v, alphabet, scale) / scale));
}

/// Nearest integer, halfway cases to the even integer.
inline long long quantize_int(double v) { return std::llrint(v); }

/// Nearest even integer, halfway cases toward the smaller magnitude.
inline long long quantize_even_int(double v) {
  const double half = v / 2.0;
  const double lo = std::floor(half);
  const double d = half - lo;
  double pick;
  if (d < 0.5) pick = lo;
  else if (d > 0.5) pick = lo + 1.0;
  else pick = std::abs(lo) < std::abs(lo + 1.0) ? lo : lo + 1.0;
  return 2 * static_cast<long long>(pick);
}

/// u[b-1] = u_b in {-1, +1}; returns sum_b u_b 2^(b-1).
inline int bits_to_symbol(const std::vector<int>& u) {
  int x = 0;
  for (std::size_t b = 0; b < u.size(); ++b) {
    if (u[b] != 1 && u[b] != -1) throw ConfigError("bits_to_symbol: bits must be +1 or -1");
    x += u[b] * (1 << b);
  }
  return x;
}

inline std::vector<int> symbol_to_bits(int x, int nbits) {
  if (x % 2 == 0 || std::abs(x) > (1 << nbits) - 1)
    throw ConfigError("symbol_to_bits: " + std::to_string(x) + " is not an odd symbol of a " +
                      std::to_string(nbits) + "-bit alphabet");
  std::vector<int> u(nbits);
  int rest = x;
  for (int b = nbits - 1; b >= 0; --b) {
    u[b] = rest > 0 ? 1 : -1;
    rest -= u[b] * (1 << b);
  }
  return u;
}

/// K independent uniform draws from alphabet.points.
inline Vector random_symbols(RandomStream& rng, const PamAlphabet& alphabet, int k) {
  if (k < 1) throw ConfigError("random_symbols: K must be >= 1");
  Vector x(k);
  const int last = static_cast<int>(alphabet.points.size()) - 1;
  for (int i = 0; i < k; ++i) x(i) = alphabet.points[rng.uniform_int(0, last)];
  return x;
}

}  // namespace mzf
