#include <gtest/gtest.h>

#include "mzf/intsearch.hpp"
#include "oracles.hpp"

using namespace mzf;

namespace {

IlsProblem zf_problem(const Matrix& h, int k, double tau) {
  const Matrix hp = pseudo_inverse(h);
  return {RowVector(tau * hp.row(k)), -hp};
}

IlsProblem random_problem(RandomStream& rng, int k) {
  Matrix B(k, k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) B(r, c) = rng.normal();
  RowVector b(k);
  for (int c = 0; c < k; ++c) b(c) = 3.0 * rng.normal();
  return {b, B};
}

bool all_even(const IntVector& q) {
  for (Eigen::Index i = 0; i < q.size(); ++i)
    if (q(i) % 2 != 0) return false;
  return true;
}

}  // namespace

TEST(SolveSd, NegativeIdentity) {
  for (double tau : {1.0, 0.5, 0.25}) {
    const IlsProblem p{RowVector(tau * RowVector::Unit(4, 1)), -Matrix::Identity(4, 4)};
    const auto s = solve_sd(p);
    EXPECT_TRUE(s.q.isZero());
    EXPECT_DOUBLE_EQ(s.cost, tau * tau);
    EXPECT_TRUE(s.exact);
  }
}

TEST(SolveSd, WorkedExampleCosts) {
  const Matrix h = oracle::example_h();
  EXPECT_NEAR(solve_sd(zf_problem(h, 1, 1.0)).cost, 27.0 / 185.0, 1e-12);
  EXPECT_NEAR(solve_sd(zf_problem(h, 3, 1.0)).cost, 27.0 / 185.0, 1e-12);
  EXPECT_NEAR(solve_sd(zf_problem(h, 0, 1.0)).cost, 6.0 / 37.0, 1e-12);
  // the reference layer-2 perturbation attains the optimum
  const auto p = zf_problem(h, 1, 1.0);
  IntVector q(4);
  q << 0, 0, 2, 0;
  EXPECT_NEAR(ils_cost(p, q), 27.0 / 185.0, 1e-12);
}

TEST(SolveSd, MatchesBruteForce) {
  RandomStream rng(101);
  for (int t = 0; t < 50; ++t) {
    const auto h = generate_real_iid_channel(rng, 4);
    const auto p = zf_problem(h, t % 4, t % 3 == 0 ? 1.0 : 0.5);
    const auto sd = solve_sd(p);
    const auto ref = oracle::even_cvp(p.b, p.B, 8);
    EXPECT_NEAR(sd.cost, ref.cost, 1e-9 * std::max(1.0, ref.cost)) << t;
    EXPECT_TRUE(sd.exact);
    EXPECT_TRUE(all_even(sd.q));
  }
}

TEST(SolveSd, MatchesBruteForceGenericProblems) {
  RandomStream rng(102);
  for (int t = 0; t < 50; ++t) {
    const auto p = random_problem(rng, 3);
    const auto sd = solve_sd(p);
    const auto ref = oracle::even_cvp(p.b, p.B, 12);
    EXPECT_LE(sd.cost, ref.cost + 1e-9 * std::max(1.0, ref.cost)) << t;
  }
}

TEST(SolveSd, BudgetExhaustionDegrades) {
  RandomStream rng(103);
  const auto h = generate_real_iid_channel(rng, 8);
  const auto p = zf_problem(h, 0, 1.0);
  const auto tight = solve_sd(p, 1);
  EXPECT_FALSE(tight.exact);
  EXPECT_LE(tight.cost, p.b.squaredNorm() + 1e-12);
  EXPECT_LE(tight.cost, solve_lll(p, lll_reduce(p.B.transpose())).cost + 1e-12);
  EXPECT_THROW(solve_sd(p, 0), ConfigError);
}

TEST(SolveBrute, ZeroTarget) {
  RandomStream rng(104);
  const auto p = random_problem(rng, 3);
  const auto s = solve_brute({RowVector::Zero(3), p.B}, 4);
  EXPECT_TRUE(s.q.isZero());
  EXPECT_EQ(s.cost, 0.0);
}

TEST(SolveBrute, WorkedExampleLayerFour) {
  const auto p = zf_problem(oracle::example_h(), 3, 1.0);
  const auto s = solve_brute(p, 8);
  IntVector reference(4);
  reference << 2, 0, 0, -2;
  EXPECT_NEAR(s.cost, ils_cost(p, reference), 1e-12);
  EXPECT_NEAR(s.cost, 27.0 / 185.0, 1e-12);
}

TEST(SolveBrute, GuardRefusesHugeBoxes) {
  const IlsProblem p{RowVector::Zero(12), Matrix::Identity(12, 12)};
  try {
    solve_brute(p, 8);
    FAIL() << "expected SearchSpaceError";
  } catch (const SearchSpaceError& e) {
    EXPECT_GT(e.points(), 1e8);
  }
}

TEST(SolveBrute, AgreesWithOracle) {
  RandomStream rng(105);
  for (int t = 0; t < 30; ++t) {
    const auto p = random_problem(rng, 3);
    EXPECT_NEAR(solve_brute(p, 6).cost, oracle::even_cvp(p.b, p.B, 6).cost, 1e-12);
  }
}

TEST(Lll, IdentityUnchanged) {
  const auto rb = lll_reduce(Matrix::Identity(5, 5));
  EXPECT_EQ(rb.T, IntMatrix::Identity(5, 5));
}

TEST(Lll, SkewedTwoByTwo) {
  Matrix m(2, 2);
  m << 1, 1, 0, 1e-3;
  const auto rb = lll_reduce(m, 0.75);
  EXPECT_TRUE(oracle::lll_conditions(rb.reduced, 0.75));
  EXPECT_EQ(std::abs(oracle::int_det(rb.T)), 1);
}

TEST(Lll, RandomBasesProperties) {
  RandomStream rng(106);
  for (int t = 0; t < 100; ++t) {
    const Matrix b = generate_real_iid_channel(rng, 8);
    const auto rb = lll_reduce(b);
    EXPECT_TRUE(oracle::lll_conditions(rb.reduced, 0.75)) << t;
    EXPECT_TRUE(is_lll_reduced(rb.reduced, 0.75)) << t;
    EXPECT_EQ(std::abs(oracle::int_det(rb.T)), 1) << t;
    EXPECT_LE((b * rb.T.cast<double>() - rb.reduced).norm(), 1e-9 * b.norm()) << t;
    // Bbar T^-1 = input
    const Matrix tinv = rb.T.cast<double>().inverse();
    EXPECT_LE((rb.reduced * tinv - b).norm(), 1e-9 * b.norm()) << t;
  }
}

TEST(Lll, DeltaOne) {
  RandomStream rng(107);
  const Matrix b = generate_real_iid_channel(rng, 6);
  EXPECT_TRUE(oracle::lll_conditions(lll_reduce(b, 1.0).reduced, 1.0));
}

TEST(Lll, Errors) {
  Matrix dep = Matrix::Identity(3, 3);
  dep.col(2) = dep.col(0) + dep.col(1);
  EXPECT_THROW(lll_reduce(dep), RankError);
  EXPECT_THROW(lll_reduce(Matrix::Identity(2, 2), 0.25), ConfigError);
  EXPECT_THROW(lll_reduce(Matrix::Identity(2, 2), 1.5), ConfigError);
}

TEST(SolveLll, OrthogonalBasisMatchesSd) {
  Matrix B = Matrix::Zero(3, 3);
  B.diagonal() << 1.0, 2.0, 0.5;
  RowVector b(3);
  b << 2.0 * 1.0 + 0.1, -4.0 * 2.0 - 0.2, 6.0 * 0.5;
  const IlsProblem p{b, B};
  const auto lll = solve_lll(p, lll_reduce(B.transpose()));
  const auto sd = solve_sd(p);
  EXPECT_NEAR(lll.cost, sd.cost, 1e-12);
  EXPECT_FALSE(lll.exact);
}

TEST(SolveLll, WorkedExampleNotBelowSd) {
  const Matrix h = oracle::example_h();
  for (int k = 0; k < 4; ++k) {
    const auto p = zf_problem(h, k, 1.0);
    EXPECT_GE(solve_lll(p, lll_reduce(p.B.transpose())).cost, solve_sd(p).cost - 1e-12);
  }
}

TEST(SolveLll, TauOneCollapsesToZero) {
  // b = delta_k H+ is a lattice point of B = -H+, so both rounding steps are exact and Q_2Z(-e_k) = 0
  RandomStream rng(108);
  const auto h = generate_real_iid_channel(rng, 6);
  const auto p = zf_problem(h, 2, 1.0);
  EXPECT_TRUE(solve_lll(p, lll_reduce(p.B.transpose())).q.isZero());
}

TEST(Ordering, SdLllBabaiZero) {
  RandomStream rng(109);
  for (int t = 0; t < 200; ++t) {
    const int k = 4 + 2 * (t % 3);
    const auto h = t % 2 ? generate_real_iid_channel(rng, k) : embed_complex(generate_channel(rng, k / 2).entries);
    const auto p = zf_problem(h, t % k, std::ldexp(1.0, -(t % 3)));
    const auto cache = lll_reduce(p.B.transpose());
    const double sd = solve_sd(p).cost;
    const double lll = solve_lll(p, cache).cost;
    const double babai = solve_babai_only(p).cost;
    const double zero = p.b.squaredNorm();
    const double tol = 1e-9 * std::max(1.0, zero);
    EXPECT_LE(sd, lll + tol) << t;
    EXPECT_LE(lll, babai + tol) << t;
    EXPECT_LE(babai, zero + tol) << t;
  }
}

TEST(SolveLll, RatioAtLeastOne) {
  RandomStream rng(110);
  double ratio_sum = 0.0;
  for (int t = 0; t < 500; ++t) {
    const auto h = generate_real_iid_channel(rng, 8);
    const auto p = zf_problem(h, t % 8, 0.5);
    const double sd = solve_sd(p).cost;
    const double lll = solve_lll(p, lll_reduce(p.B.transpose())).cost;
    ASSERT_GE(lll, sd * (1.0 - 1e-9)) << t;
    ratio_sum += lll / sd;
  }
  RecordProperty("mean_lll_over_sd", std::to_string(ratio_sum / 500.0));
}

TEST(Babai, LatticePointsAndSmallPerturbations) {
  Matrix basis(3, 3);
  basis << 2, 0, 0, 0, 3, 0, 0, 0, 1;
  const auto rb = lll_reduce(basis);
  IntVector c(3);
  c << 4, -2, 7;
  const Vector t = basis * c.cast<double>();
  EXPECT_EQ(babai_round(t, rb), c);
  Vector bump(3);
  bump << 0.3, -0.4, 0.2;
  EXPECT_EQ(babai_round(t + bump, rb), c);
}

TEST(Babai, RecoversCoefficientsInSkewedBasis) {
  RandomStream rng(111);
  for (int t = 0; t < 50; ++t) {
    const Matrix basis = generate_real_iid_channel(rng, 5);
    const auto rb = lll_reduce(basis);
    IntVector c(5);
    for (int i = 0; i < 5; ++i) c(i) = rng.uniform_int(-9, 9);
    EXPECT_EQ(babai_round(basis * c.cast<double>(), rb), c);
  }
}

TEST(EvenLatticeSolver, BabaiSeedNotBelowSd) {
  RandomStream rng(112);
  for (int t = 0; t < 50; ++t) {
    const auto h = generate_real_iid_channel(rng, 6);
    const auto p = zf_problem(h, t % 6, 1.0);
    const EvenLatticeSolver s(p.B);
    EXPECT_GE(s.solve_babai(p.b).cost, s.solve_sd(p.b).cost - 1e-12);
    EXPECT_TRUE(all_even(s.solve_babai(p.b).q));
  }
}
