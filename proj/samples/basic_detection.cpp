// Detects one noisy 4-QAM observation over a random 3x3 complex channel with
// zero forcing and with the modulus detector, and prints both decisions.

#include <cstdio>

#include "mzf/detect.hpp"
#include "mzf/metrics.hpp"

int main() {
  mzf::RandomStream rng(3);
  const auto alphabet = mzf::make_alphabet(4);
  const mzf::Matrix h = mzf::embed_complex(mzf::generate_channel(rng, 3).entries);
  const auto noise = mzf::snr_to_n0(12.0, alphabet);

  const auto zf = mzf::preprocess({mzf::DetectorKind::zf}, h, alphabet, noise);
  const auto mzf_state = mzf::preprocess({mzf::DetectorKind::mzf}, h, alphabet, noise);

  const mzf::Vector x = mzf::random_symbols(rng, alphabet, static_cast<int>(h.cols()));
  const mzf::Vector y = mzf::apply_channel(h, x, noise, rng);
  const auto a = mzf::detect(zf, y);
  const auto b = mzf::detect(mzf_state, y);

  std::printf("layer  sent  zf  mzf  q                      gain_db\n");
  for (int k = 0; k < x.size(); ++k) {
    const auto& plan = mzf_state.plans[k][0];
    std::printf("%5d %5d %3d %4d  [", k + 1, static_cast<int>(x(k)), a.symbols[k], b.symbols[k]);
    for (int i = 0; i < plan.q.size(); ++i) std::printf("%s%lld", i ? " " : "", plan.q(i));
    std::printf("]%*s %.2f\n", static_cast<int>(20 - 3 * plan.q.size()), "",
                mzf::post_snr(plan, mzf_state.channel.hplus, 1.0).gain_db);
  }
  return 0;
}
