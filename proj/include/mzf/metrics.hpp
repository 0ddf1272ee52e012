#pragma once

#include <cmath>
#include <vector>

#include "mzf/alphabet.hpp"
#include "mzf/channel.hpp"
#include "mzf/detect.hpp"

namespace mzf {

struct PostSnrEntry {
  double gamma_zf = 0.0;
  double gamma_mzf = 0.0;
  double gain_db = 0.0;
};

/// Post-processing SNR of plain linear detection and of the plan's combining row.
inline PostSnrEntry post_snr(const PerturbationPlan& plan, const Matrix& hplus, double snr_linear) {
  PostSnrEntry e;
  e.gamma_zf = snr_linear / hplus.row(plan.layer).squaredNorm();
  if (plan.degenerate) {
    e.gamma_mzf = e.gamma_zf;
  } else {
    RowVector mix = plan.alpha * plan.q.cast<double>().transpose();
    mix(plan.layer) += plan.tau;
    e.gamma_mzf = plan.tau * plan.tau * snr_linear / (mix * hplus).squaredNorm();
  }
  e.gain_db = 10.0 * std::log10(e.gamma_mzf / e.gamma_zf);
  return e;
}

/// SNR = 2 E|x|^2 / N0.
inline NoiseSpec snr_to_n0(double snr_db, const PamAlphabet& alphabet) {
  return {2.0 * alphabet.energy / std::pow(10.0, snr_db / 10.0)};
}

/// Error counters for one (detector, SNR) cell. Merging is plain integer addition.
struct BerAccumulator {
  std::vector<long long> bit_errors;   ///< per bit layer, index b - 1
  std::vector<long long> bits_counted; ///< per bit layer
  long long symbol_errors = 0;
  long long symbols_counted = 0;
  long long trials = 0;

  explicit BerAccumulator(int nbits = 1) : bit_errors(nbits, 0), bits_counted(nbits, 0) {}

  long long total_bit_errors() const {
    long long s = 0;
    for (auto v : bit_errors) s += v;
    return s;
  }
  long long total_bits() const {
    long long s = 0;
    for (auto v : bits_counted) s += v;
    return s;
  }

  BerAccumulator& merge(const BerAccumulator& other) {
    for (std::size_t b = 0; b < bit_errors.size(); ++b) {
      bit_errors[b] += other.bit_errors[b];
      bits_counted[b] += other.bits_counted[b];
    }
    symbol_errors += other.symbol_errors;
    symbols_counted += other.symbols_counted;
    trials += other.trials;
    return *this;
  }
};

inline void accumulate(BerAccumulator& acc, const std::vector<int>& truth_symbols, const DetectionResult& result) {
  const int nbits = static_cast<int>(acc.bit_errors.size());
  for (std::size_t k = 0; k < truth_symbols.size(); ++k) {
    const auto truth_bits = symbol_to_bits(truth_symbols[k], nbits);
    for (int b = 0; b < nbits; ++b) {
      if (truth_bits[b] != result.bits[k][b]) ++acc.bit_errors[b];
      ++acc.bits_counted[b];
    }
    if (truth_symbols[k] != result.symbols[k]) ++acc.symbol_errors;
    ++acc.symbols_counted;
  }
  ++acc.trials;
}

}  // namespace mzf
