#pragma once

// Modulus recovery: strips even-integer-weighted odd interference from a
// combined observation y = z + alpha * sum_m p_m b_m with |z| < 2, p_m even, b_m odd.

#include <cmath>

namespace mzf {

/// Floor hook so that the recovery rule runs unchanged on exact rationals
/// (see mzf/exact.hpp for the boost::rational specialization).
template <class T>
struct scalar_ops {
  static T floor(const T& v) { return std::floor(v); }
};

/// Floored modulo, result in [0, m) for m > 0.
template <class T>
T floored_mod(const T& v, const T& m) {
  return v - m * scalar_ops<T>::floor(v / m);
}

/// parity_odd selects (y mod 4a) - 2a, otherwise ((y + 2a) mod 4a) - 2a.
/// Output lies in [-2a, 2a).
template <class T>
T mod_recover(const T& y, const T& alpha, bool parity_odd) {
  const T two_alpha = alpha + alpha;
  const T period = two_alpha + two_alpha;
  const T shifted = parity_odd ? y : y + two_alpha;
  return floored_mod(shifted, period) - two_alpha;
}

enum class ParityMode {
  derived,        ///< branch from half the q sum, flipped once for bit layers below the top
  always_odd,  ///< always the odd branch
};

struct ParityContext {
  long long half_q_sum = 0;  ///< (1/2) sum_l q_l
  int layer = 0;             ///< 1-based bit layer, 0 for symbol-wise detection
  int nlayers = 1;
};

/// true selects the "odd" branch of mod_recover.
///
/// In bit-wise modes at layer n the remaining higher bits contribute
/// sum_{b>n} u_b 2^(b-n), whose half-weight sum is 1 + 2 + ... : odd exactly when n < N.
inline bool branch_parity(const ParityContext& ctx, ParityMode mode = ParityMode::derived) {
  if (mode == ParityMode::always_odd) return true;
  const bool odd_q = (ctx.half_q_sum % 2) != 0;
  const bool bit_flip = ctx.layer > 0 && ctx.layer < ctx.nlayers;
  return odd_q != bit_flip;
}

struct ModulusParams {
  double alpha = 1.0;
  ParityContext parity;
};

inline double recover_z(double r, const ModulusParams& params, ParityMode mode = ParityMode::derived) {
  return mod_recover(r, params.alpha, branch_parity(params.parity, mode));
}

}  // namespace mzf
