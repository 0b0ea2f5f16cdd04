#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "bethe/potts_fix.hpp"
#include "bethe/prediction.hpp"

using namespace bethe;

namespace {

bool contains(const std::vector<LTypeSolution>& sols, const SimplexMeasure& h, double tol) {
  for (const auto& s : sols) {
    std::vector<double> a(s.h.values().begin(), s.h.values().end());
    std::vector<double> b(h.values().begin(), h.values().end());
    if (sup_distance(s.h, h) < tol) return true;
    // at zero field solutions are stored sorted
    std::sort(b.begin(), b.end(), std::greater<>());
    if (sup_distance(SimplexMeasure(a), SimplexMeasure(b)) < tol) return true;
  }
  return false;
}

}  // namespace

TEST(FBranches, BranchPointArithmetic) {
  EXPECT_NEAR(F_eval(0.25, 0.5, 4), 13.5, 1e-13);
  const double theta = 0.5;
  const double v = theta / 2;
  const double fv = F_eval(v, theta, 4);
  EXPECT_NEAR(F_plus_inv(fv, theta, 4), v, 1e-13);
  EXPECT_NEAR(F_minus_inv(fv, theta, 4), v, 1e-13);
}

TEST(FBranches, RoundTrip) {
  const double theta = 0.2;
  const int d = 6;
  const double v = theta / (d - 2);
  for (int i = 1; i <= 100; ++i) {
    const double xm = v * i / 100.0;
    const double xp = v + (1 - v) * i / 100.0;
    for (double x : {xm, xp}) {
      const double y = F_eval(x, theta, d);
      const double back = x <= v ? F_minus_inv(y, theta, d) : F_plus_inv(y, theta, d);
      EXPECT_NEAR(back, x, 1e-13);
      EXPECT_NEAR(F_eval(back, theta, d), y, 1e-10 * y);
    }
  }
  // tiny roots keep relative precision
  const double tiny = 1e-11;
  EXPECT_NEAR(F_minus_inv(F_eval(tiny, theta, d), theta, d) / tiny, 1.0, 1e-10);
}

TEST(FBranches, OutOfRange) {
  const double theta = 0.2;
  const int d = 6;
  const double v = theta / (d - 2);
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  const double below = 0.5 * F_eval(v, theta, d);
  EXPECT_EQ(code([&] { F_minus_inv(below, theta, d); }), ErrorCode::OutOfBranchRange);
  EXPECT_EQ(code([&] { F_plus_inv(below, theta, d); }), ErrorCode::OutOfBranchRange);
  EXPECT_EQ(code([&] { F_plus_inv(2 * F_eval(1.0, theta, d), theta, d); }),
            ErrorCode::OutOfBranchRange);
}

TEST(Classify, LargeBranchPointOnlyOneType) {
  // theta = 2.5 at d = 4 gives v = 1.25
  const double beta = std::log1p(1 / 2.5);
  for (double B : {0.0, 0.2, 1.0}) {
    const auto sols = classify_fixed_points({3, beta, B}, 4);
    ASSERT_FALSE(sols.empty());
    for (const auto& s : sols) EXPECT_EQ(s.label.ell, 1);
  }
}

TEST(Classify, UniformPresentAtZeroField) {
  for (double beta : {0.3, 1.0, 3.0}) {
    const auto sols = classify_fixed_points({3, beta, 0.0}, 4);
    EXPECT_TRUE(contains(sols, SimplexMeasure::uniform(3), 1e-8)) << beta;
  }
}

TEST(Classify, ZeroFieldDegeneracyCarriesBothLabels) {
  // At m = 1 the ordered point (p_+, p_-, p_-) is both 1_+ (Q = p_+) and 2_-
  // (Q = p_-); it is reported once with both labels.
  const auto sols = classify_fixed_points({3, 2.0, 0.0}, 4);
  int merged = 0;
  for (const auto& s : sols) {
    if (s.has_label(1, +1) && s.has_label(2, -1)) ++merged;
    for (std::size_t i = 1; i < s.h.values().size(); ++i) EXPECT_GE(s.h[i - 1], s.h[i]);
  }
  EXPECT_EQ(merged, 1);
}

TEST(Classify, WeakFieldBringsTwoTypes) {
  // q v < 1 at beta = 2, d = 4
  const PottsParams pp{3, 2.0, 0.01};
  EXPECT_LT(3 * pp.v(4), 1.0);
  const auto sols = classify_fixed_points(pp, 4);
  std::set<std::string> seen;
  for (const auto& s : sols) seen.insert(s.label.str());
  EXPECT_TRUE(seen.count("2+"));
  EXPECT_TRUE(seen.count("2-"));
}

TEST(Classify, SolutionInvariants) {
  for (int q : {3, 4, 5}) {
    for (double beta : {0.5, 1.1, 2.0, 4.0}) {
      for (double B : {0.0, 0.01, 0.3}) {
        const PottsParams pp{q, beta, B};
        const int d = 4;
        const double v = pp.v(d);
        const auto sols = classify_fixed_points(pp, d);
        const auto ext = bp_extremal(pp, d);
        EXPECT_TRUE(contains(sols, ext.h_free, 1e-7));
        EXPECT_TRUE(contains(sols, ext.h_max, 1e-7));
        const bool guard = v >= 1 || pp.m() * F_eval(v, pp.theta(), d) > F_eval(1, pp.theta(), d);
        for (const auto& s : sols) {
          EXPECT_LT(s.residual, 1e-8);
          if (guard) {
            EXPECT_EQ(s.label.ell, 1);
          }
          const double fz = pp.m() * F_eval(s.Q, pp.theta(), d);
          if (s.label.ell >= 2) {
            EXPECT_NEAR(F_eval(s.p_plus, pp.theta(), d) / fz, 1.0, 1e-9);
            EXPECT_GE(s.p_plus, v - 1e-12);
          }
          if (s.label.ell < q) {
            EXPECT_NEAR(F_eval(s.p_minus, pp.theta(), d) / fz, 1.0, 1e-9);
            EXPECT_LE(s.p_minus, v + 1e-12);
          }
          if (s.label.sign > 0) EXPECT_GE(s.Q, v - 1e-12);
          else EXPECT_LE(s.Q, v + 1e-12);
          EXPECT_NEAR(s.z_h / bp_map(potts_spec(pp), d, s.h).z, 1.0, 1e-12);
        }
      }
    }
  }
}

TEST(Classify, CompleteAgainstBiasedScan) {
  for (int q : {3, 5}) {
    for (double beta : {0.9, 1.1, 2.0}) {
      const PottsParams pp{q, beta, 0.01};
      const auto sols = classify_fixed_points(pp, 4);
      const double top = pp.B + 3 * beta;
      double prev_r = -top, prev_g = bp_loglik(pp, 4, prev_r) - prev_r;
      for (int i = 1; i <= 10000; ++i) {
        const double r = -top + 2 * top * i / 10000.0;
        const double g = bp_loglik(pp, 4, r) - r;
        if ((g > 0) != (prev_g > 0)) {
          double lo = prev_r, hi = r;
          for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            if (((bp_loglik(pp, 4, mid) - mid) > 0) == (prev_g > 0)) lo = mid; else hi = mid;
          }
          EXPECT_TRUE(contains(sols, biased_from_loglik(lo, q), 1e-7)) << q << " " << beta;
        }
        prev_r = r;
        prev_g = g;
      }
    }
  }
}

TEST(Rho, ProductAndDiagonal) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> un(0.05, 1.0);
  for (int q : {2, 3, 5}) {
    std::vector<double> w(q);
    for (auto& x : w) x = un(gen);
    const auto h = SimplexMeasure::from_weights(w);
    EXPECT_NEAR(rho_corr(product_measure(h)).rho, 0.5, 1e-12);
    std::vector<double> diag(q * q, 0.0);
    for (int s = 0; s < q; ++s) diag[s * q + s] = h[s];
    EXPECT_NEAR(rho_corr(EdgeMeasure(q, diag)).rho, 1.0, 1e-12);
  }
  try {
    rho_corr(EdgeMeasure(2, {1, 0, 0, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::DegenerateVariance || e.code() == ErrorCode::BoundaryPoint);
  }
}

TEST(Rho, RandomMeasuresStayInUnitInterval) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const int q = 2 + rep % 4;
    std::vector<double> e(q * q);
    for (int s = 0; s < q; ++s) {
      for (int t = s; t < q; ++t) e[s * q + t] = e[t * q + s] = un(gen);
    }
    double tot = 0;
    for (double x : e) tot += x;
    for (double& x : e) x /= tot;
    const double rho = rho_corr(EdgeMeasure(q, e)).rho;
    EXPECT_GE(rho, 0.0);
    EXPECT_LE(rho, 1.0);
  }
}

TEST(Hessian, HighTemperatureUniformIsNegDef) {
  const PottsParams pp{3, 0.2, 0.0};
  const auto bh = embed(SimplexMeasure::uniform(3), potts_spec(pp));
  const auto hr = hessian_localmax(bh, pp, 4);
  EXPECT_EQ(hr.verdict, Definiteness::NegDef);
  EXPECT_LT(hr.extremal_value, 0.0);
  EXPECT_EQ(rho_corr(bh, 4).localmax, Verdict::Yes);
}

TEST(Hessian, RejectsNonStationary) {
  const PottsParams pp{3, 1.0, 0.2};
  const auto bh = embed(SimplexMeasure({0.5, 0.3, 0.2}), potts_spec(pp));
  try {
    hessian_localmax(bh, pp, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotStationary);
  }
}

TEST(Hessian, DirectionIsAdmissibleAndFormMatches) {
  const PottsParams pp{4, 1.5, 0.05};
  const auto spec = potts_spec(pp);
  for (const auto& s : classify_fixed_points(pp, 4)) {
    const auto bh = embed(s.h, spec);
    const auto hr = hessian_localmax(bh, pp, 4);
    double sum = 0, sq = 0;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        sum += hr.direction[a * 4 + b];
        sq += hr.direction[a * 4 + b] * hr.direction[a * 4 + b];
        EXPECT_NEAR(hr.direction[a * 4 + b], hr.direction[b * 4 + a], 1e-15);
      }
    }
    EXPECT_NEAR(sum, 0.0, 1e-12);
    EXPECT_NEAR(sq, 1.0, 1e-12);
    EXPECT_EQ(hr.extremal_value > 0, hr.max_ratio > 1);
  }
}

TEST(Hessian, AgreesWithRhoAcrossGrid) {
  for (int q : {3, 4}) {
    for (int i = 0; i < 6; ++i) {
      for (double B : {0.0, 0.05, 0.5}) {
        const PottsParams pp{q, 0.3 + 0.5 * i, B};
        const auto spec = potts_spec(pp);
        for (const auto& s : classify_fixed_points(pp, 4)) {
          const auto bh = embed(s.h, spec);
          const auto hv = localmax_verdict(hessian_localmax(bh, pp, 4).verdict);
          const auto rv = rho_corr(bh, 4).localmax;
          if (hv != Verdict::Marginal && rv != Verdict::Marginal) {
            EXPECT_EQ(hv, rv);
          }
          if (hv == Verdict::Yes) {
            std::set<long long> distinct;
            for (double x : s.h.values()) distinct.insert(std::llround(x * 1e9));
            EXPECT_LE(distinct.size(), 3u);
          }
        }
      }
    }
  }
}

TEST(Stability, WrongType) {
  const PottsParams pp{3, 2.0, 0.01};
  for (const auto& s : classify_fixed_points(pp, 4)) {
    if (s.label.ell == 2 && s.label.sign < 0) continue;
    try {
      stab_condition(s, pp, 4);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::WrongType);
    }
  }
}

TEST(Stability, AgreesWithJacobian) {
  int checked = 0;
  for (int q : {3, 4}) {
    for (int i = 0; i < 10; ++i) {
      for (double B : {0.005, 0.02, 0.1}) {
        const PottsParams pp{q, 0.8 + 0.3 * i, B};
        for (const auto& s : classify_fixed_points(pp, 4)) {
          if (!(s.label.ell == 2 && s.label.sign < 0)) continue;
          const auto st = stab_condition(s, pp, 4);
          const double rad = bp_jacobian(potts_spec(pp), 4, s.h).spectral_radius;
          if (std::abs(rad - 1) < 1e-7) continue;
          EXPECT_EQ(st.holds, rad < 1) << q << " " << pp.beta << " " << B;
          ++checked;
        }
      }
    }
  }
  EXPECT_GT(checked, 10);
}
