#include <gtest/gtest.h>

#include <map>
#include <numeric>

#include "mzf/alphabet.hpp"

using namespace mzf;

TEST(MakeAlphabet, Qam4) {
  const auto a = make_alphabet(4);
  EXPECT_EQ(a.points, (std::vector<int>{-1, 1}));
  EXPECT_EQ(a.tau, 1.0);
  EXPECT_EQ(a.energy, 1.0);
  EXPECT_EQ(a.nbits, 1);
}

TEST(MakeAlphabet, Qam16) {
  const auto a = make_alphabet(16);
  EXPECT_EQ(a.points, (std::vector<int>{-3, -1, 1, 3}));
  EXPECT_EQ(a.tau, 0.5);
  EXPECT_EQ(a.energy, 5.0);
}

TEST(MakeAlphabet, Qam64) {
  const auto a = make_alphabet(64);
  EXPECT_EQ(a.points, (std::vector<int>{-7, -5, -3, -1, 1, 3, 5, 7}));
  EXPECT_EQ(a.tau, 0.25);
}

TEST(MakeAlphabet, RejectsNonPowersOfFour) {
  for (int m : {0, 1, 2, 8, 12, 32, 128, -4}) EXPECT_THROW(make_alphabet(m), ConfigError) << m;
}

TEST(MakeAlphabet, DesignRuleAndMoments) {
  for (int m = 4; m <= (1 << 16); m *= 4) {
    const auto a = make_alphabet(m);
    // powers of two, so the equality is exact in floating point
    EXPECT_EQ(a.tau * (a.sqrt_m - 1), 2.0 - a.tau) << m;
    long long sum = 0, sum2 = 0;
    for (int p : a.points) {
      sum += p;
      sum2 += static_cast<long long>(p) * p;
    }
    EXPECT_EQ(sum, 0);
    // mean square (M-1)/3, compared without division
    EXPECT_EQ(3 * sum2, static_cast<long long>(m - 1) * static_cast<long long>(a.points.size())) << m;
    EXPECT_DOUBLE_EQ(a.energy, (m - 1) / 3.0);
  }
}

TEST(QuantizePam, WorkedExampleValues) {
  const auto a = make_alphabet(4);
  EXPECT_EQ(quantize_pam(-0.2216, a, 1.0), -1.0);
  EXPECT_EQ(quantize_pam(1.9297, a, 1.0), 1.0);
}

TEST(QuantizePam, TieAtZeroGoesNegative) {
  EXPECT_EQ(quantize_pam(0.0, make_alphabet(16), 0.5), -0.5);
  EXPECT_EQ(quantize_pam(0.0, make_alphabet(4), 1.0), -1.0);
}

TEST(QuantizePam, TiesTowardSmallerMagnitude) {
  const auto a = make_alphabet(64);
  EXPECT_EQ(quantize_pam(2.0, a, 1.0), 1.0);
  EXPECT_EQ(quantize_pam(-2.0, a, 1.0), -1.0);
  EXPECT_EQ(quantize_pam(4.0, a, 1.0), 3.0);
  EXPECT_EQ(quantize_pam(-6.0, a, 1.0), -5.0);
  EXPECT_EQ(quantize_pam(1.0, a, 0.25), 0.75);
}

TEST(QuantizePam, ClipsOutsideRange) {
  const auto a = make_alphabet(16);
  EXPECT_EQ(quantize_pam(100.0, a, 1.0), 3.0);
  EXPECT_EQ(quantize_pam(-100.0, a, 1.0), -3.0);
  EXPECT_EQ(quantize_pam(1.9, a, 0.5), 1.5);
}

TEST(QuantizePam, FixedPoints) {
  for (int m : {4, 16, 64, 256}) {
    const auto a = make_alphabet(m);
    for (double scale : {1.0, a.tau, 0.3}) {
      for (int p : a.points) EXPECT_EQ(quantize_pam(p * scale, a, scale), p * scale);
    }
  }
}

TEST(QuantizePam, NearestPoint) {
  const auto a = make_alphabet(16);
  RandomStream rng(4);
  for (int i = 0; i < 2000; ++i) {
    const double v = (rng.uniform() - 0.5) * 12.0;
    const double got = quantize_pam(v, a, 1.0);
    for (int p : a.points) EXPECT_LE(std::abs(v - got), std::abs(v - p) + 1e-15);
  }
}

TEST(QuantizeSymbol, ReturnsUnscaledIndex) {
  const auto a = make_alphabet(16);
  EXPECT_EQ(quantize_symbol(0.7, a, 0.5), 1);
  EXPECT_EQ(quantize_symbol(-1.6, a, 0.5), -3);
}

TEST(QuantizeInt, Examples) {
  EXPECT_EQ(quantize_int(1.4), 1);
  EXPECT_EQ(quantize_int(-3.0), -3);
  EXPECT_EQ(quantize_int(0.0), 0);
  EXPECT_EQ(quantize_int(0.5), 0);
  EXPECT_EQ(quantize_int(1.5), 2);
  EXPECT_EQ(quantize_int(2.5), 2);
  EXPECT_EQ(quantize_int(-2.5), -2);
}

TEST(QuantizeEvenInt, Examples) {
  EXPECT_EQ(quantize_even_int(1.4), 2);
  EXPECT_EQ(quantize_even_int(-3.0), -2);
  EXPECT_EQ(quantize_even_int(3.0), 2);
  EXPECT_EQ(quantize_even_int(0.0), 0);
  EXPECT_EQ(quantize_even_int(1.0), 0);
  EXPECT_EQ(quantize_even_int(-1.0), 0);
  EXPECT_EQ(quantize_even_int(2.9), 2);
  EXPECT_EQ(quantize_even_int(3.1), 4);
  EXPECT_EQ(quantize_even_int(-5.2), -6);
}

TEST(Bits, TwoBitTable) {
  EXPECT_EQ(bits_to_symbol({1, 1}), 3);
  EXPECT_EQ(bits_to_symbol({-1, 1}), 1);
  EXPECT_EQ(bits_to_symbol({1, -1}), -1);
  EXPECT_EQ(bits_to_symbol({-1, -1}), -3);
}

TEST(Bits, BijectionAndMsbSign) {
  for (int nbits = 1; nbits <= 4; ++nbits) {
    std::map<int, int> seen;
    for (int mask = 0; mask < (1 << nbits); ++mask) {
      std::vector<int> u(nbits);
      for (int b = 0; b < nbits; ++b) u[b] = (mask >> b) & 1 ? 1 : -1;
      const int x = bits_to_symbol(u);
      ++seen[x];
      EXPECT_EQ(symbol_to_bits(x, nbits), u);
      EXPECT_EQ(x > 0 ? 1 : -1, u[nbits - 1]);
    }
    const auto a = make_alphabet(1 << (2 * nbits));
    ASSERT_EQ(seen.size(), a.points.size());
    for (int p : a.points) EXPECT_EQ(seen[p], 1);
  }
}

TEST(Bits, RoundTripQam64) {
  for (int p : make_alphabet(64).points) EXPECT_EQ(bits_to_symbol(symbol_to_bits(p, 3)), p);
}

TEST(Bits, Errors) {
  EXPECT_THROW(symbol_to_bits(2, 2), ConfigError);
  EXPECT_THROW(symbol_to_bits(5, 2), ConfigError);
  EXPECT_THROW(bits_to_symbol({1, 0}), ConfigError);
}

TEST(RandomSymbols, Qam4Membership) {
  RandomStream rng(8);
  const Vector x = random_symbols(rng, make_alphabet(4), 1000);
  for (int i = 0; i < x.size(); ++i) EXPECT_TRUE(x(i) == 1.0 || x(i) == -1.0);
}

TEST(RandomSymbols, UniformFrequencies) {
  RandomStream rng(9);
  const Vector x = random_symbols(rng, make_alphabet(16), 10000);
  std::map<int, int> count;
  for (int i = 0; i < x.size(); ++i) ++count[static_cast<int>(x(i))];
  ASSERT_EQ(count.size(), 4u);
  for (const auto& [p, c] : count) EXPECT_NEAR(c / 10000.0, 0.25, 0.02) << p;
}

TEST(RandomSymbols, Reproducible) {
  RandomStream a(10), b(10);
  EXPECT_EQ(random_symbols(a, make_alphabet(64), 20), random_symbols(b, make_alphabet(64), 20));
  EXPECT_THROW(random_symbols(a, make_alphabet(4), 0), ConfigError);
}
