#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "test_support.hpp"

using namespace qfdiv;
using namespace qfdiv::test;

TEST(AlphaLog, Examples) {
  for (double alpha : {0.3, 1.0, 2.0}) EXPECT_NEAR(alpha_log(1.0, alpha), 0.0, 1e-15);
  EXPECT_NEAR(alpha_log(0.5, 2.0), -1.0, 1e-15);
  EXPECT_NEAR(alpha_log(std::exp(1.0), 1.000001), 1.0, 1e-5);
  EXPECT_THROW(alpha_log(0.0, 2.0), DomainError);
}

TEST(TsallisEntropy, Examples) {
  for (double alpha : {0.5, 1.0, 2.0}) EXPECT_NEAR(tsallis_entropy(plus_state(), alpha), 0.0, 1e-12);
  EXPECT_NEAR(tsallis_entropy(0.5 * identity(2), 2.0), 0.5, 1e-14);
  for (double alpha : {0.3, 1.0, 1.7}) {
    EXPECT_NEAR(tsallis_entropy(identity(3) / 3.0, alpha), alpha_log(3.0, alpha), 1e-12);
  }
  EXPECT_NEAR(vn_entropy(identity(4) / 4.0), std::log(4.0), 1e-13);
}

TEST(ConditionalEntropy, BellGoldenValues) {
  const auto bell = bell_state();
  EXPECT_NEAR(conditional_tsallis(bell, 2.0), -1.0, 1e-12);
  EXPECT_NEAR(conditional_entropy_optimize(bell, make_tsallis_f(2.0), {}).value, -1.0, 1e-9);
  EXPECT_NEAR(conditional_entropy_vn_closed(bell), -std::log(2.0), 1e-12);
  EXPECT_NEAR(conditional_entropy_optimize(bell, make_kl_f(), {}).value, -std::log(2.0), 1e-8);
  const auto closed = conditional_entropy_tsallis_closed(bell, 2.0);
  EXPECT_LT(max_abs(closed.sigma_star - 0.5 * identity(2)), 1e-12);
}

TEST(ConditionalEntropy, ProductStates) {
  Rng rng(31);
  for (double alpha : {0.3, 0.5, 1.0, 1.5, 2.0}) {
    const Operator ra = random_density(3, 2, rng);
    const Operator rb = random_density(2, 2, rng);
    const BipartiteState s(kron(ra, rb), {3, 2});
    const auto closed = conditional_entropy_tsallis_closed(s, alpha);
    EXPECT_NEAR(closed.value, tsallis_entropy(ra, alpha), 1e-10);
    EXPECT_LT(max_abs(closed.sigma_star - rb), 1e-10);
    EXPECT_NEAR(conditional_entropy_optimize(s, make_tsallis_f(alpha), {}).value, tsallis_entropy(ra, alpha), 1e-7);
  }
  const BipartiteState half(kron(0.5 * identity(2), random_density(2, 2, 5)), {2, 2});
  EXPECT_NEAR(conditional_tsallis(half, 2.0), 0.5, 1e-8);
}

TEST(ConditionalEntropy, MaximallyMixed) {
  for (Index da : {2, 3}) {
    const Index db = 2;
    const BipartiteState s(identity(da * db) / static_cast<double>(da * db), {da, db});
    EXPECT_NEAR(conditional_tsallis(s, 2.0), 1.0 - 1.0 / static_cast<double>(da), 1e-12);
    EXPECT_NEAR(conditional_entropy_optimize(s, make_tsallis_f(2.0), {}).value, 1.0 - 1.0 / static_cast<double>(da),
                1e-8);
  }
}

TEST(ConditionalEntropy, VnClosedMatchesMatrixLogOracle) {
  Rng rng(13);
  for (int t = 0; t < 30; ++t) {
    const Index da = rng.uniform_int(2, 3);
    const Index db = rng.uniform_int(2, 3);
    const BipartiteState s(random_density(da * db, da * db, rng), {da, db});
    EXPECT_NEAR(conditional_entropy_vn_closed(s), oracle_conditional_vn(s), 1e-9);
  }
}

TEST(ConditionalEntropy, PureStateIsMinusMarginalEntropy) {
  const std::vector<double> c{std::sqrt(0.7), std::sqrt(0.2), std::sqrt(0.1)};
  const auto s = pure_bipartite_from_schmidt(c, 3, 4, 77);
  const double hb = -(0.7 * std::log(0.7) + 0.2 * std::log(0.2) + 0.1 * std::log(0.1));
  EXPECT_NEAR(conditional_entropy_vn_closed(s), -hb, 1e-10);
}

TEST(ConditionalEntropy, ClosedMatchesOptimizerAcrossAlphas) {
  Rng rng(2024);
  for (int t = 0; t < 24; ++t) {
    const double alpha = std::vector<double>{0.3, 0.5, 1.0, 1.5, 2.0, 1.2}[t % 6];
    const Index da = rng.uniform_int(2, 3);
    const Index db = rng.uniform_int(2, 3);
    const BipartiteState s(random_density(da * db, rng.uniform_int(1, da * db), rng), {da, db});
    OptimizerOptions opts;
    opts.seed = rng();
    const auto report = conditional_entropy_optimize(s, make_tsallis_f(alpha), opts);
    EXPECT_NEAR(report.value, conditional_tsallis(s, alpha), 1e-6);
    EXPECT_NEAR(real_trace(report.sigma_star), 1.0, 1e-12);
  }
}

TEST(ConditionalEntropy, ClosedFormSigmaAttainsValue) {
  Rng rng(8);
  for (double alpha : {0.5, 1.5, 2.0}) {
    const BipartiteState s(random_density(6, 3, rng), {2, 3});
    const auto closed = conditional_entropy_tsallis_closed(s, alpha);
    const auto d = divergence_to_product_reference(s, closed.sigma_star, make_tsallis_f(alpha));
    EXPECT_NEAR(-d.value(), closed.value, 1e-10);
  }
}

TEST(ConditionalEntropy, NoStateBeatsTheMinimum) {
  Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    const double alpha = t % 2 == 0 ? 0.5 : 2.0;
    const BipartiteState s(random_density(4, rng.uniform_int(1, 4), rng), {2, 2});
    const double h = conditional_tsallis(s, alpha);
    for (int k = 0; k < 10; ++k) {
      const Operator sigma = random_density(2, 2, rng);
      const auto d = divergence_to_product_reference(s, sigma, make_tsallis_f(alpha));
      EXPECT_GE(d.value(), -h - 1e-10);
    }
  }
}

TEST(ConditionalEntropy, OptimizerHandlesGenericOperatorConvexF) {
  // Harmonic family: no closed form. Check against the bounds and padding invariance.
  Rng rng(61);
  const auto f = make_harmonic_f(0.7);
  for (int t = 0; t < 5; ++t) {
    const BipartiteState s(random_density(6, rng.uniform_int(1, 6), rng), {2, 3});
    const auto r = conditional_entropy_optimize(s, f, {});
    EXPECT_TRUE(r.converged);
    const auto b = thm2_bounds(s, f);
    EXPECT_LE(b.lower, r.value + 1e-7);
    EXPECT_LE(r.value, b.upper + 1e-7);
    EXPECT_NEAR(conditional_entropy_optimize(embed_ancilla(s, 2), f, {}).value, r.value, 1e-7);
  }
}

TEST(ConditionalEntropy, PreconditionsAndAlphaRange) {
  const auto bell = bell_state();
  EXPECT_THROW(conditional_entropy_optimize(bell, make_tsallis_f(2.5), {}), PreconditionError);
  EXPECT_THROW(conditional_entropy_tsallis_closed(bell, 2.5), PreconditionError);
  EXPECT_THROW(conditional_entropy_tsallis_closed(bell, 0.0), PreconditionError);
}

TEST(SupportRestrictedObjective, MatchesGenericEngine) {
  Rng rng(73);
  for (int t = 0; t < 30; ++t) {
    const Index da = rng.uniform_int(2, 3);
    const Index db = rng.uniform_int(2, 4);
    const BipartiteState s(random_density(da * db, rng.uniform_int(1, da * db), rng), {da, db});
    const auto f = t % 3 == 0 ? make_harmonic_f(1.3) : make_tsallis_f(t % 3 == 1 ? 0.5 : 2.0);
    const SupportRestrictedObjective obj(s, f);
    Eigen::VectorXd x(obj.num_params());
    for (Index i = 0; i < x.size(); ++i) x[i] = rng.normal();
    const Operator sigma = obj.sigma(x);
    const double generic = divergence_to_product_reference(s, sigma, f).value();
    EXPECT_NEAR(obj(x), generic, 1e-10 * std::max(1.0, std::abs(generic)));
  }
}

TEST(SupportRestrictedObjective, RankDeficientMarginalRestrictsSupport) {
  // rho_B = diag(1/2, 1/2, 0): sigma lives on a two-dimensional support.
  const BipartiteState s = embed_ancilla(bell_state(), 1);
  const SupportRestrictedObjective obj(s, make_tsallis_f(2.0));
  EXPECT_EQ(obj.support_dim(), Index{2});
  EXPECT_EQ(obj.num_params(), Index{3});
  const auto r = conditional_entropy_optimize(s, make_tsallis_f(2.0), {});
  EXPECT_NEAR(r.value, -1.0, 1e-9);
  EXPECT_NEAR(std::abs(r.sigma_star(2, 2)), 0.0, 1e-14);
}

TEST(SupportRestrictedObjective, ParameterRoundTrip) {
  const BipartiteState s(random_density(9, 9, 3), {3, 3});
  const SupportRestrictedObjective obj(s, make_kl_f());
  Rng rng(4);
  Eigen::VectorXd x(obj.num_params());
  for (Index i = 0; i < x.size(); ++i) x[i] = rng.normal();
  EXPECT_LT((obj.params_from_hermitian(obj.hermitian_from_params(x)) - x).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ConditionalEntropy, OptimizerIsDeterministicPerSeed) {
  const BipartiteState s(random_density(6, 4, 10), {3, 2});
  OptimizerOptions opts;
  opts.seed = 5;
  const auto a = conditional_entropy_optimize(s, make_harmonic_f(2.0), opts);
  const auto b = conditional_entropy_optimize(s, make_harmonic_f(2.0), opts);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.start_values, b.start_values);
  EXPECT_EQ(a.starts, opts.starts);
}

TEST(Bounds, BellSaturatesLowerBoundForKl) {
  const auto b = thm2_bounds(bell_state(), make_kl_f());
  EXPECT_NEAR(b.lower, -std::log(2.0), 1e-12);
  EXPECT_NEAR(b.upper, 0.0, 1e-12);
  EXPECT_NEAR(conditional_entropy_vn_closed(bell_state()) - b.lower, 0.0, 1e-8);
}

TEST(Bounds, PureStateBounds) {
  const std::vector<double> flat{std::sqrt(0.5), std::sqrt(0.5)};
  const auto b = pure_state_bounds_tsallis(flat, 2.0);
  EXPECT_NEAR(b.lower, -1.0, 1e-14);
  EXPECT_NEAR(b.upper, -1.0, 1e-14);
  const std::vector<double> skew{std::sqrt(0.8), std::sqrt(0.2)};
  const auto bs = pure_state_bounds_tsallis(skew, 1.5);
  EXPECT_LE(bs.lower, bs.upper);
  EXPECT_LT(bs.upper, 0.0);
  const std::vector<double> product{1.0, 0.0};
  EXPECT_NEAR(pure_state_bounds_tsallis(product, 2.0).upper, 0.0, 1e-15);
  const std::vector<double> bad{0.5, 0.5};
  EXPECT_THROW(pure_state_bounds_tsallis(bad, 2.0), DomainError);
}

TEST(ClassicalRegister, ClosedFormExamples) {
  const std::vector<double> one{1.0};
  const std::vector<double> h1{-0.3};
  for (double alpha : {0.5, 1.0, 2.0}) EXPECT_NEAR(classical_register_closed_form(h1, one, alpha), -0.3, 1e-14);

  const std::vector<double> p{0.2, 0.5, 0.3};
  const std::vector<double> same{0.4, 0.4, 0.4};
  for (double alpha : {0.5, 1.0, 1.5}) EXPECT_NEAR(classical_register_closed_form(same, p, alpha), 0.4, 1e-13);

  const std::vector<double> half{0.5, 0.5};
  const std::vector<double> h{0.0, -1.0};
  const double expected = -(std::pow((1.0 + std::sqrt(2.0)) / 2.0, 2.0) - 1.0);
  EXPECT_NEAR(classical_register_closed_form(h, half, 2.0), expected, 1e-14);
  EXPECT_NEAR(classical_register_closed_form(h, half, 2.0), -0.4571, 1e-4);

  const std::vector<double> inconsistent{0.0, 5.0};
  EXPECT_THROW(classical_register_closed_form(inconsistent, half, 2.0), DomainError);
}

TEST(ClassicalRegister, ClosedFormMatchesConstructedState) {
  // Product block (H = 0 at any alpha for a pure product) and a Bell block (H_2 = -1).
  const Operator zero = diag({1, 0});
  const BipartiteState product_block(kron(zero, zero), {2, 2});
  const std::vector<BipartiteState> blocks{product_block, bell_state()};
  const std::vector<double> p{0.5, 0.5};
  const auto joint = build_classical_register_state(blocks, p);
  const std::vector<double> h{0.0, -1.0};
  const double closed = classical_register_closed_form(h, p, 2.0);
  EXPECT_NEAR(conditional_tsallis(joint, 2.0), closed, 1e-10);
  EXPECT_NEAR(conditional_entropy_optimize(joint, make_tsallis_f(2.0), {}).value, closed, 1e-6);
  // Exact value sits above the weighted average of block entropies.
  EXPECT_GE(closed, 0.5 * 0.0 + 0.5 * -1.0 - 1e-12);
}

TEST(ChainRule, RhsExamples) {
  EXPECT_NEAR(chain_rule_rhs(-0.37, 1, 1.6), -0.37, 1e-15);
  EXPECT_NEAR(chain_rule_rhs(-0.37, 3, 1.0), -0.37 + std::log(3.0), 1e-14);
  EXPECT_NEAR(chain_rule_rhs(-1.0, 2, 2.0), 0.0, 1e-15);
}

TEST(ChainRule, ThreeFactorTransforms) {
  const Operator a = random_density(2, 2, 1);
  const Operator b = random_density(3, 2, 2);
  const Operator c = random_density(2, 2, 3);
  const BipartiteState abc(kron(kron(a, b), c), {2, 3, 2});
  EXPECT_LT(max_abs(trace_out_c(abc).rho() - kron(a, b)), 1e-12);
  const auto ac_b = condition_on_b_only(abc);
  EXPECT_EQ(ac_b.d_a(), Index{4});
  EXPECT_EQ(ac_b.d_b(), Index{3});
  EXPECT_LT(max_abs(ac_b.rho() - kron(kron(a, c), b)), 1e-12);
  // For a product state the chain-rule inequality is tight at alpha = 1.
  const double lhs = conditional_entropy_vn_closed(ac_b);
  const double h = conditional_entropy_vn_closed(abc);
  EXPECT_NEAR(chain_rule_rhs(h, 2, 1.0) - lhs, std::log(2.0) - vn_entropy(c), 1e-10);
}

TEST(ConditionalDpi, PinchingAndPartialTraceDoNotDecreaseEntropy) {
  Rng rng(91);
  for (int t = 0; t < 20; ++t) {
    const BipartiteState s(random_density(6, rng.uniform_int(1, 6), rng), {2, 3});
    const auto pinched = apply_on_b(s, dephasing_channel(3));
    for (double alpha : {0.5, 1.0, 2.0}) {
      EXPECT_LE(conditional_tsallis(s, alpha), conditional_tsallis(pinched, alpha) + 1e-10);
    }
  }
}
