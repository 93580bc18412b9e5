#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "test_support.hpp"

using namespace qfdiv;
using namespace qfdiv::test;

namespace {
const Operator kZero = diag({1, 0});
const Operator kOne = diag({0, 1});
const Operator kMixed = 0.5 * identity(2);
}  // namespace

TEST(ExtendedRealTest, ArithmeticAndFormatting) {
  const auto inf = ExtendedReal::infinity();
  EXPECT_TRUE((inf + ExtendedReal(3.0)).is_infinite());
  EXPECT_EQ(inf.weighted(0.0).value(), 0.0);
  EXPECT_EQ(format_number(-1.0), "-1.00000000000");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(-0.0), "0.00000000000");
  EXPECT_THROW(inf.finite_value(), DomainError);
}

TEST(TsallisFunction, LimitsAndConvexityRange) {
  const auto f = make_tsallis_f(0.5);
  EXPECT_NEAR(f.ell.value(), 2.0, 1e-15);
  // Large-argument ratio approaches ell.
  EXPECT_NEAR(f(1e12) / 1e12, 2.0, 1e-5);
  EXPECT_TRUE(make_tsallis_f(1.5).ell.is_infinite());
  EXPECT_TRUE(make_tsallis_f(2.0).operator_convex);
  EXPECT_FALSE(make_tsallis_f(2.5).operator_convex);
  EXPECT_EQ(make_tsallis_f(1.0 + 1e-7).name, "kl");
  EXPECT_THROW(make_tsallis_f(0.0), DomainError);
  EXPECT_THROW(make_tsallis_f(-1.0), DomainError);
}

TEST(TsallisFunction, ContinuousAcrossAlphaOneSwitch) {
  for (double x : {0.1, 0.5, 2.0, 7.0}) {
    EXPECT_NEAR(make_tsallis_f(1.0 + 2e-6)(x), make_kl_f()(x), 1e-4);
  }
}

TEST(Validate, RejectsMinusInfinityEll) {
  auto f = make_kl_f();
  f.ell = ExtendedReal(-std::numeric_limits<double>::infinity());
  EXPECT_THROW(validate(f), DomainError);
}

TEST(Csiszar, Examples) {
  const std::vector<double> half{0.5, 0.5};
  const std::vector<double> q{0.25, 0.75};
  EXPECT_NEAR(csiszar_divergence(half, half, make_kl_f()).value(), 0.0, 1e-15);
  const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  EXPECT_NEAR(csiszar_divergence(half, q, make_kl_f()).value(), expected, 1e-14);
  EXPECT_NEAR(csiszar_divergence(half, q, make_kl_f()).value(), 0.143841, 1e-6);
  const std::vector<double> point{1.0, 0.0};
  EXPECT_NEAR(csiszar_divergence(point, half, make_tsallis_f(2.0)).value(), 1.0, 1e-14);
  const std::vector<double> bad{-0.1, 1.1};
  EXPECT_THROW(csiszar_divergence(bad, half, make_kl_f()), DomainError);
}

TEST(QuantumDivergence, Examples) {
  const auto kl = make_kl_f();
  const auto f2 = make_tsallis_f(2.0);
  EXPECT_NEAR(quantum_f_divergence(plus_state(), kMixed, kl).value(), std::log(2.0), 1e-12);
  EXPECT_NEAR(quantum_f_divergence(kZero, kMixed, f2).value(), 1.0, 1e-12);
  EXPECT_TRUE(quantum_f_divergence(kZero, kOne, f2).is_infinite());
  EXPECT_NEAR(quantum_f_divergence(kZero, kOne, make_tsallis_f(0.5)).value(), 2.0, 1e-12);
  EXPECT_THROW(quantum_f_divergence(kZero, identity(3), kl), DomainError);
}

TEST(QuantumDivergence, SelfDivergenceIsZero) {
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    const Operator rho = random_density(4, rng.uniform_int(1, 4), rng);
    for (double alpha : {0.5, 1.0, 2.0}) {
      EXPECT_NEAR(quantum_f_divergence(rho, rho, make_tsallis_f(alpha)).value(), 0.0, 1e-10);
    }
  }
}

TEST(QuantumDivergence, DiagonalInputsReduceToCsiszar) {
  const std::vector<double> p{0.2, 0.3, 0.5};
  const std::vector<double> q{0.6, 0.1, 0.3};
  const Operator a = diag({0.2, 0.3, 0.5});
  const Operator b = diag({0.6, 0.1, 0.3});
  for (double alpha : {0.3, 1.0, 1.7}) {
    const auto f = make_tsallis_f(alpha);
    EXPECT_NEAR(quantum_f_divergence(a, b, f).value(), csiszar_divergence(p, q, f).value(), 1e-13);
  }
}

TEST(QuantumDivergence, MatchesMatrixFunctionOracles) {
  Rng rng(17);
  for (int t = 0; t < 40; ++t) {
    const Index d = rng.uniform_int(2, 4);
    const Operator a = random_density(d, d, rng);
    const Operator b = random_density(d, d, rng);
    EXPECT_NEAR(quantum_f_divergence(a, b, make_kl_f()).value(), oracle_vn_relative_entropy(a, b), 1e-9);
    for (double alpha : {0.3, 0.5, 1.5, 2.0}) {
      EXPECT_NEAR(quantum_f_divergence(a, b, make_tsallis_f(alpha)).value(), oracle_tsallis_divergence(a, b, alpha),
                  1e-9);
    }
  }
}

TEST(QuantumDivergence, KernelTermForFiniteEll) {
  // Part of A outside R(B) contributes ell(f) * tr(A (1 - B^0)).
  const Operator a = diag({0.3, 0.7});
  const Operator b = diag({1.0, 0.0});
  const auto f = make_tsallis_f(0.5);
  const double expected = 1.0 * f(0.3) + 2.0 * 0.7;
  EXPECT_NEAR(quantum_f_divergence(a, b, f).value(), expected, 1e-13);
}

TEST(TsallisClosed, Examples) {
  const Operator rho = random_density(3, 3, 4);
  EXPECT_NEAR(tsallis_divergence_closed(rho, rho, 1.5).value(), 0.0, 1e-12);
  EXPECT_NEAR(tsallis_divergence_closed(kZero, kMixed, 2.0).value(), 1.0, 1e-12);
  EXPECT_NEAR(tsallis_divergence_closed(kZero, kOne, 0.5).value(), 2.0, 1e-12);
  EXPECT_TRUE(tsallis_divergence_closed(kZero, kOne, 2.0).is_infinite());
  EXPECT_THROW(tsallis_divergence_closed(kZero, kOne, 0.0), DomainError);
}

TEST(TsallisClosed, AgreesWithSpectralEngineIncludingRankDeficient) {
  Rng rng(99);
  for (int t = 0; t < 200; ++t) {
    const Index d = rng.uniform_int(2, 4);
    const double alpha = std::vector<double>{0.3, 0.5, 1.0, 1.5, 2.0}[t % 5];
    const Operator b = random_density(d, rng.uniform_int(1, d), rng);
    const Operator a = random_density(d, rng.uniform_int(1, d), rng);
    const auto engine = quantum_f_divergence(a, b, make_tsallis_f(alpha));
    const auto closed = tsallis_divergence_closed(a, b, alpha);
    ASSERT_EQ(engine.is_infinite(), closed.is_infinite());
    if (engine.is_finite()) EXPECT_NEAR(engine.value(), closed.value(), 1e-9);
  }
}

TEST(VnClosed, Examples) {
  EXPECT_NEAR(vn_relative_entropy_closed(kMixed, kMixed).value(), 0.0, 1e-14);
  EXPECT_NEAR(vn_relative_entropy_closed(plus_state(), kMixed).value(), std::log(2.0), 1e-12);
  EXPECT_TRUE(vn_relative_entropy_closed(kZero, plus_state()).is_infinite());
}

TEST(EpsSweep, Examples) {
  const auto flat = quantum_f_divergence_eps_sweep(kMixed, kMixed, make_kl_f());
  // D(1/2 || 1/2 + eps) = -ln(1 + 2 eps) is O(eps) and extrapolates to 0.
  for (std::size_t i = 0; i < flat.eps.size(); ++i) EXPECT_LE(std::abs(flat.values[i]), 3.0 * flat.eps[i]);
  EXPECT_NEAR(flat.extrapolated.value(), 0.0, 1e-12);

  const auto blowup = quantum_f_divergence_eps_sweep(kZero, kOne, make_tsallis_f(2.0));
  for (std::size_t i = 0; i < blowup.eps.size(); ++i) {
    EXPECT_NEAR(blowup.values[i] * blowup.eps[i], 1.0, 1e-3);
  }
  EXPECT_TRUE(blowup.extrapolated.is_infinite());

  EXPECT_THROW(quantum_f_divergence_eps_sweep(kMixed, kMixed, make_kl_f(), {}), DomainError);
  EXPECT_THROW(quantum_f_divergence_eps_sweep(kMixed, kMixed, make_kl_f(), {1e-5, 1e-4}), DomainError);
}

TEST(EpsSweep, LogarithmicDivergenceDetected) {
  const auto kl = quantum_f_divergence_eps_sweep(kZero, kOne, make_kl_f());
  EXPECT_TRUE(kl.extrapolated.is_infinite());
}

TEST(EpsSweep, FiniteKernelLimitMatchesSpectralFormula) {
  const Operator a = diag({0.3, 0.7});
  const Operator b = diag({1.0, 0.0});
  const auto f = make_tsallis_f(0.5);
  const auto sweep = quantum_f_divergence_eps_sweep(a, b, f);
  EXPECT_NEAR(sweep.extrapolated.value(), quantum_f_divergence(a, b, f).value(), 1e-4);
}

TEST(EpsSweep, AgreesOnFullSupportPairs) {
  Rng rng(55);
  for (int t = 0; t < 50; ++t) {
    const Index d = rng.uniform_int(2, 4);
    const auto f = make_tsallis_f(std::vector<double>{0.5, 1.0, 1.5, 2.0}[t % 4]);
    const Operator a = random_density(d, d, rng);
    const Operator b = random_density(d, d, rng);
    const auto sweep = quantum_f_divergence_eps_sweep(a, b, f);
    EXPECT_NEAR(sweep.extrapolated.value(), quantum_f_divergence(a, b, f).value(), 1e-4);
  }
}

TEST(TraceFunction, TsallisEntropyRelation) {
  const Operator rho = random_density(3, 3, 8);
  const double alpha = 2.0;
  const double tr_f = trace_function(rho, make_tsallis_f(alpha)).value();
  EXPECT_NEAR(-tr_f, tsallis_entropy(rho, alpha), 1e-12);
}
