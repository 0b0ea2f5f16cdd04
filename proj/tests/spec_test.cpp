#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bethe/spec.hpp"

using namespace bethe;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;  // sentinel for "did not throw"
}

SimplexMeasure random_measure(std::mt19937_64& gen, int q) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> w(q);
  for (auto& x : w) x = u(gen);
  return SimplexMeasure::from_weights(w);
}

}  // namespace

TEST(ValidateSpec, PottsIsPermissive) {
  const auto spec = potts_spec({3, 1.0, 0.0});
  EXPECT_EQ(validate_spec(spec), 0);
  const auto alt = make_spec(3, spec.psi, spec.psibar, 2);
  EXPECT_EQ(*alt.sigma_p, 2);
}

TEST(ValidateSpec, IdentityInteractionIsNotPermissive) {
  EXPECT_EQ(code_of([] { make_spec(3, {1, 0, 0, 0, 1, 0, 0, 0, 1}, {1, 1, 1}); }),
            ErrorCode::NotPermissive);
}

TEST(ValidateSpec, AsymmetricInteraction) {
  EXPECT_EQ(code_of([] { make_spec(3, {1, 1, 1, 1, 1, 2, 1, 1, 1}, {1, 1, 1}); }),
            ErrorCode::NonSymmetric);
}

TEST(ValidateSpec, NonPositiveVertexWeight) {
  EXPECT_EQ(code_of([] { make_spec(2, {1, 1, 1, 1}, {1, 0}); }),
            ErrorCode::NonPositiveVertexWeight);
}

TEST(PottsParams, DerivedQuantities) {
  const PottsParams pp{3, std::log(2.0), 0.5};
  EXPECT_NEAR(pp.theta(), 1.0, 1e-15);
  EXPECT_NEAR(pp.p(), 0.5, 1e-15);
  EXPECT_NEAR(pp.gamma(), 2.0 * 1.0 / 4.0, 1e-15);
  EXPECT_NEAR(pp.C(), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(pp.v(4), 0.5, 1e-15);
  EXPECT_TRUE(std::isinf(PottsParams{3, 0.0, 0.0}.theta()));
  const auto spec = potts_spec(pp);
  for (int s = 0; s < 3; ++s) {
    for (int t = 0; t < 3; ++t) EXPECT_DOUBLE_EQ(spec.weight(s, t), s == t ? 2.0 : 1.0);
    EXPECT_DOUBLE_EQ(spec.vertex_weight(s), s == 0 ? std::exp(0.5) : 1.0);
  }
}

TEST(PottsParams, InvariantRanges) {
  for (int q : {2, 3, 7}) {
    for (double beta : {0.0, 0.3, 2.0, 9.0}) {
      const PottsParams pp{q, beta, 0.1};
      EXPECT_GE(pp.gamma(), 0.0);
      EXPECT_LT(pp.gamma(), q - 1.0);
      EXPECT_GE(pp.p(), 0.0);
      EXPECT_LT(pp.p(), 1.0);
      EXPECT_GE(pp.C(), 1.0);
      if (beta > 0) {
        EXPECT_GT(pp.theta(), 0.0);
      }
    }
  }
}

TEST(SimplexMeasure, RejectsBadTotals) {
  EXPECT_EQ(code_of([] { SimplexMeasure({0.5, 0.6}); }), ErrorCode::InvalidMeasure);
  EXPECT_EQ(code_of([] { SimplexMeasure({-0.1, 1.1}); }), ErrorCode::InvalidMeasure);
  const SimplexMeasure ok({0.5, 0.5 + 1e-13});
  EXPECT_NEAR(ok[0] + ok[1], 1.0, 1e-16);
}

TEST(Entropy, Examples) {
  const std::vector<double> u4(4, 0.25);
  EXPECT_NEAR(entropy(u4), std::log(4.0), 1e-15);
  const std::vector<double> p{0.2, 0.8};
  EXPECT_EQ(rel_entropy(p, p), 0.0);
  EXPECT_NEAR(rel_entropy(std::vector<double>{1, 0}, std::vector<double>{0.5, 0.5}),
              std::log(2.0), 1e-15);
  EXPECT_EQ(rel_entropy(std::vector<double>{0.5, 0.5}, std::vector<double>{1, 0}), kInf);
  EXPECT_EQ(rel_entropy(std::vector<double>{0, 1}, std::vector<double>{0, 1}), 0.0);
  EXPECT_EQ(code_of([] { rel_entropy(std::vector<double>{1}, std::vector<double>{0.5, 0.5}); }),
            ErrorCode::DimensionMismatch);
}

TEST(Entropy, RelativeEntropyNonnegative) {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 200; ++rep) {
    const auto p = random_measure(gen, 4), r = random_measure(gen, 4);
    EXPECT_GT(rel_entropy(p.values(), r.values()), 0.0);
    EXPECT_EQ(rel_entropy(p.values(), p.values()), 0.0);
  }
}

TEST(Embed, ZeroInteractionGivesProduct) {
  const auto spec = potts_spec({3, 0.0, 0.4});
  const SimplexMeasure h({0.2, 0.3, 0.5});
  const auto bh = embed(h, spec);
  for (int s = 0; s < 3; ++s) {
    for (int t = 0; t < 3; ++t) EXPECT_NEAR(bh(s, t), h[s] * h[t], 1e-16);
  }
}

TEST(Embed, TwoSpinArithmetic) {
  const auto spec = potts_spec({2, std::log(2.0), 0.0});
  const auto h = SimplexMeasure::uniform(2);
  EXPECT_NEAR(pair_normalizer(spec, h), 1.5, 1e-15);
  const auto bh = embed(h, spec);
  EXPECT_NEAR(bh(0, 0), 1.0 / 3, 1e-15);
  EXPECT_NEAR(bh(0, 1), 1.0 / 6, 1e-15);
  EXPECT_NEAR(bh(1, 0), 1.0 / 6, 1e-15);
  EXPECT_NEAR(bh(1, 1), 1.0 / 3, 1e-15);
}

TEST(Embed, MarginalIdentityAndInvariants) {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 100; ++rep) {
    const PottsParams pp{4, 0.1 + 0.02 * rep, 0.3};
    const auto spec = potts_spec(pp);
    const auto h = random_measure(gen, 4);
    const auto bh = embed(h, spec);
    const double bz = pair_normalizer(spec, h);
    const auto hbar = bh.marginal();
    double total = 0.0;
    for (int s = 0; s < 4; ++s) {
      EXPECT_NEAR(bz * hbar[s], h[s] * (std::expm1(pp.beta) * h[s] + 1.0), 1e-14);
      for (int t = 0; t < 4; ++t) {
        EXPECT_EQ(bh(s, t), bh(t, s));
        total += bh(s, t);
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    const auto back = unembed(bh, spec);
    EXPECT_LT(sup_distance(back, h), 1e-14);
  }
}

TEST(Bias, Examples) {
  const auto h0 = bias_to_simplex(0.0, 3);
  for (int s = 0; s < 3; ++s) EXPECT_NEAR(h0[s], 1.0 / 3, 1e-16);
  const auto h1 = bias_to_simplex(1.0, 3);
  EXPECT_EQ(h1[0], 1.0);
  EXPECT_EQ(h1[1], 0.0);
  const auto hh = bias_to_simplex(0.5, 2);
  EXPECT_NEAR(hh[0], 0.75, 1e-16);
  EXPECT_NEAR(hh[1], 0.25, 1e-16);
  EXPECT_EQ(code_of([] { bias_to_simplex(1.5, 3); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([] { simplex_to_bias(SimplexMeasure({0.5, 0.3, 0.2})); }),
            ErrorCode::NotBiasedForm);
}

TEST(Bias, RoundTrip) {
  for (int q : {2, 3, 5}) {
    for (int i = 0; i <= 100; ++i) {
      const double b = i / 100.0;
      EXPECT_NEAR(simplex_to_bias(bias_to_simplex(b, q)), b, 1e-14);
    }
  }
}

TEST(Bias, LogLikelihoodCoordinate) {
  for (double r : {-3.0, -0.2, 0.0, 0.7, 5.0, 40.0}) {
    const auto h = biased_from_loglik(r, 3);
    EXPECT_NEAR(std::log(h[0] / h[1]), r, 1e-12);
    if (r >= 0) {
      EXPECT_NEAR(loglik_to_bias(r, 3), simplex_to_bias(h), 1e-15);
    } else {
      EXPECT_LT(loglik_to_bias(r, 3), 0.0);
    }
  }
}
