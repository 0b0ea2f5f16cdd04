#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bethe/prediction.hpp"
#include "bethe/oracle.hpp"

using namespace bethe;

namespace {

SimplexMeasure random_interior(std::mt19937_64& gen, int q) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(q);
  for (auto& x : w) x = u(gen);
  return SimplexMeasure::from_weights(w);
}

std::vector<SimplexMeasure> random_tuple(std::mt19937_64& gen, int q, int d) {
  std::vector<SimplexMeasure> t;
  for (int j = 0; j < d; ++j) t.push_back(random_interior(gen, q));
  return t;
}

// Random symmetric zero-sum direction scaled entrywise by bh, so that small
// steps stay inside the simplex however small the entries of bh are.
std::vector<double> random_direction(std::mt19937_64& gen, const EdgeMeasure& bh) {
  std::normal_distribution<double> nd;
  const int q = bh.q();
  std::vector<double> u(q * q);
  for (int s = 0; s < q; ++s) {
    for (int t = s; t < q; ++t) u[s * q + t] = u[t * q + s] = nd(gen);
  }
  double mean = 0.0;
  for (int i = 0; i < q * q; ++i) mean += bh.values()[i] * u[i];
  for (int i = 0; i < q * q; ++i) u[i] = bh.values()[i] * (u[i] - mean);
  return u;
}

EdgeMeasure shifted(const EdgeMeasure& bh, const std::vector<double>& dir, double eta) {
  std::vector<double> e(bh.values().begin(), bh.values().end());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += eta * dir[i];
  return EdgeMeasure(bh.q(), e);
}

}  // namespace

TEST(PsiVx, ZeroInteraction) {
  const PottsParams pp{3, 0.0, 0.7};
  const auto spec = potts_spec(pp);
  std::mt19937_64 gen(2);
  const auto t = random_tuple(gen, 3, 4);
  EXPECT_NEAR(psi_vx(spec, 4, t), std::exp(0.7) + 2, 1e-13);
  EXPECT_NEAR(psi_e(spec, 4, t), 1.0, 1e-15);
}

TEST(PsiVx, DenseSummationOracle) {
  const auto spec = potts_spec({2, std::log(2.0), 0.0});
  const std::vector<SimplexMeasure> t(4, SimplexMeasure({0.75, 0.25}));
  // (psi h) = (7/4, 5/4)
  const double expected = std::pow(7.0 / 4, 4) + std::pow(5.0 / 4, 4);
  EXPECT_NEAR(oracle::dense_psi_vx(spec, t), expected, 1e-12);
  EXPECT_NEAR(psi_vx(spec, 4, t), expected, 1e-12);
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = potts_spec({3, 0.1 * rep, 0.05 * rep});
    const auto tup = random_tuple(gen, 3, 3 + rep % 3);
    const int d = static_cast<int>(tup.size());
    EXPECT_NEAR(psi_vx(s, d, tup), oracle::dense_psi_vx(s, tup),
                1e-12 * oracle::dense_psi_vx(s, tup));
  }
}

TEST(PsiE, OddDegreeRejected) {
  const auto spec = potts_spec({2, 1.0, 0.0});
  const std::vector<SimplexMeasure> t(3, SimplexMeasure::uniform(2));
  try {
    psi_e(spec, 3, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OddDegree);
  }
  try {
    psi_e_sym(spec, 3, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OddDegree);
  }
}

TEST(PsiESym, EqualTupleAndThreePairings) {
  const auto spec = potts_spec({3, 0.9, 0.1});
  const SimplexMeasure a({0.5, 0.3, 0.2}), b({0.1, 0.1, 0.8});
  const std::vector<SimplexMeasure> same(4, a);
  EXPECT_NEAR(psi_e_sym(spec, 4, same), psi_e(spec, 4, same), 1e-15);
  const std::vector<SimplexMeasure> aabb{a, a, b, b};
  const double aa = pair_normalizer(spec, a), bb = pair_normalizer(spec, b);
  double ab = 0.0;
  for (int s = 0; s < 3; ++s) {
    for (int t = 0; t < 3; ++t) ab += spec.weight(s, t) * a[s] * b[t];
  }
  EXPECT_NEAR(psi_e_sym(spec, 4, aabb), (aa * bb + 2 * ab * ab) / 3, 1e-15);
}

TEST(PsiESym, MatchesPermutationAverage) {
  std::mt19937_64 gen(4);
  for (int d : {4, 6}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto spec = potts_spec({3, 0.4 + 0.3 * rep, 0.2});
      const auto t = random_tuple(gen, 3, d);
      const double naive = oracle::permutation_average(d, [&](const std::vector<int>& p) {
        std::vector<SimplexMeasure> perm;
        for (int i : p) perm.push_back(t[i]);
        return psi_e(spec, d, perm);
      });
      EXPECT_NEAR(psi_e_sym(spec, d, t), naive, 1e-14 * naive);
    }
  }
}

TEST(PsiSym, DiagonalTupleIsExpPhi) {
  std::mt19937_64 gen(6);
  for (int rep = 0; rep < 20; ++rep) {
    const auto spec = potts_spec({4, 0.2 * rep, 0.3});
    const auto h = random_interior(gen, 4);
    const std::vector<SimplexMeasure> t(6, h);
    EXPECT_NEAR(std::log(psi_sym(spec, 6, t)), phi(spec, 6, h).total, 1e-12);
    EXPECT_NEAR(std::log(psi_ratio(spec, 6, t)), phi(spec, 6, h).total, 1e-12);
  }
}

TEST(Phi, ClosedForms) {
  const auto free = phi(potts_spec({3, 0.0, 0.4}), 4, SimplexMeasure({0.2, 0.3, 0.5}));
  EXPECT_NEAR(free.total, std::log(std::exp(0.4) + 2), 1e-14);
  EXPECT_NEAR(free.e, 0.0, 1e-15);
  for (int d : {3, 4, 7}) {
    const PottsParams pp{4, 1.3, 0.0};
    const auto u = phi(potts_spec(pp), d, SimplexMeasure::uniform(4));
    EXPECT_NEAR(u.total, std::log(4.0) + 0.5 * d * std::log(pp.C()), 1e-13);
  }
}

TEST(Phi, RegressionAnchorAtFreeFixedPoint) {
  const PottsParams pp{3, 1.0, 0.5};
  const auto spec = potts_spec(pp);
  const auto ext = bp_extremal(pp, 4);
  const double value = phi(spec, 4, ext.h_free).total;
  EXPECT_NEAR(value, 2.5272763814947008, 1e-12);
  EXPECT_NEAR(value, bold_phi(spec, 4, embed(ext.h_free, spec)), 1e-9);
}

TEST(BoldPhi, Examples) {
  const PottsParams pp{3, 0.0, 0.6};
  const auto spec = potts_spec(pp);
  const auto h = SimplexMeasure::from_weights({std::exp(0.6), 1.0, 1.0});
  EXPECT_NEAR(bold_phi(spec, 5, product_measure(h)), std::log(std::exp(0.6) + 2), 1e-13);

  const auto spec0 = potts_spec({3, 1.1, 0.0});
  const auto u = SimplexMeasure::uniform(3);
  EXPECT_NEAR(bold_phi(spec0, 4, embed(u, spec0)), phi(spec0, 4, u).total, 1e-12);

  const auto hard = make_spec(3, {1, 1, 1, 1, 1, 0, 1, 0, 1}, {1, 1, 1});
  const auto bp = bold_phi_forms(hard, 4, product_measure(u));
  EXPECT_EQ(bp.value, -kInf);
  EXPECT_EQ(bp.divergence_form, -kInf);
}

TEST(BoldPhi, FormsAgreeOffStationaryPoints) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> un(0.01, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int q = 2 + rep % 3;
    const auto spec = potts_spec({q, 0.1 * (rep % 20), 0.05 * (rep % 7)});
    std::vector<double> e(q * q);
    for (int s = 0; s < q; ++s) {
      for (int t = s; t < q; ++t) e[s * q + t] = e[t * q + s] = un(gen);
    }
    double total = 0.0;
    for (double x : e) total += x;
    for (double& x : e) x /= total;
    const auto f = bold_phi_forms(spec, 4, EdgeMeasure(q, e));
    EXPECT_NEAR(f.entropy_form, f.divergence_form, 1e-12);
  }
}

TEST(BoldPhi, StationaryAtFixedPoints) {
  std::mt19937_64 gen(9);
  for (int q : {3, 5}) {
    for (double beta : {0.4, 1.1, 2.0}) {
      const PottsParams pp{q, beta, 0.05};
      const auto spec = potts_spec(pp);
      for (const auto& sol : classify_fixed_points(pp, 4)) {
        const auto bh = embed(sol.h, spec);
        EXPECT_NEAR(phi(spec, 4, sol.h).total, bold_phi(spec, 4, bh), 1e-9);
        for (int k = 0; k < 20; ++k) {
          const auto dir = random_direction(gen, bh);
          const double eta = 1e-5;
          auto f = [&](double x) { return bold_phi(spec, 4, shifted(bh, dir, x)); };
          // fourth-order central stencil
          const double deriv = (8 * (f(eta) - f(-eta)) - (f(2 * eta) - f(-2 * eta))) / (12 * eta);
          EXPECT_LT(std::abs(deriv), 1e-6);
        }
      }
    }
  }
}

TEST(BiasedTuples, AffineInEachBias) {
  const PottsParams pp{3, 1.2, 0.3};
  const auto spec = potts_spec(pp);
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> un(0.1, 0.9);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> b(4);
    for (auto& x : b) x = un(gen);
    auto eval = [&](double bj, bool sym) {
      std::vector<SimplexMeasure> t;
      for (int j = 0; j < 4; ++j) t.push_back(bias_to_simplex(j == 0 ? bj : b[j], 3));
      return sym ? psi_e_sym(spec, 4, t) : psi_vx(spec, 4, t);
    };
    for (bool sym : {false, true}) {
      const double c = b[0], step = 0.05;
      const double second = eval(c + step, sym) - 2 * eval(c, sym) + eval(c - step, sym);
      EXPECT_NEAR(second, 0.0, 1e-10 * std::max(1.0, eval(c, sym)));
    }
    // closed forms of the biased factorization
    std::vector<SimplexMeasure> t;
    for (double x : b) t.push_back(bias_to_simplex(x, 3));
    EXPECT_NEAR(log_psi_vx_biased(pp, b), log_psi_vx(spec, 4, t), 1e-12);
    EXPECT_NEAR(log_pair_biased(pp, b[0], b[1]),
                std::log(psi_e(spec, 4, std::vector<SimplexMeasure>{t[0], t[1], t[0], t[0]}) /
                         pair_normalizer(spec, t[0])),
                1e-12);
  }
}

TEST(BiasedTuples, JensenDirection) {
  const PottsParams pp{3, 1.5, 0.1};
  const auto spec = potts_spec(pp);
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<SimplexMeasure> t;
    for (int j = 0; j < 4; ++j) t.push_back(bias_to_simplex(un(gen), 3));
    const double avg_log = oracle::permutation_average(4, [&](const std::vector<int>& p) {
      std::vector<SimplexMeasure> perm;
      for (int i : p) perm.push_back(t[i]);
      return std::log(psi_e(spec, 4, perm));
    });
    EXPECT_GE(std::log(psi_e_sym(spec, 4, t)), avg_log - 1e-14);
  }
}

TEST(Prediction, ZeroInteraction) {
  const auto pr = bethe_prediction({3, 0.0, 0.5}, 4);
  EXPECT_NEAR(pr.phi, std::log(std::exp(0.5) + 2), 1e-13);
  EXPECT_NEAR(pr.phi_free, pr.phi_max, 1e-13);
}

TEST(Prediction, TwoSpinsSingleBranch) {
  for (double beta : {0.3, 1.0, 2.5}) {
    const auto pr = bethe_prediction({2, beta, 0.2}, 4);
    EXPECT_TRUE(pr.cross_checked);
    EXPECT_NEAR(pr.extremal.b_free, pr.extremal.b_max, 1e-8);
    EXPECT_NEAR(pr.phi_free, pr.phi_max, 1e-9);
  }
}

TEST(Prediction, CoexistenceMatchesClassification) {
  const PottsParams pp{5, 1.1, 0.01};
  const auto pr = bethe_prediction(pp, 4);
  EXPECT_TRUE(pr.cross_checked);
  EXPECT_GT(pr.extremal.b_max - pr.extremal.b_free, 0.1);
  EXPECT_GT(std::abs(pr.phi_free - pr.phi_max), 1e-9);
}

TEST(GFlat, ConstantInBias) {
  for (const PottsParams& pp : {PottsParams{5, 1.1, 0.01}, PottsParams{3, 2.0, 0.01}}) {
    for (Flavor fl : {Flavor::Free, Flavor::Max}) {
      double lo = kInf, hi = -kInf;
      for (int i = 0; i < 50; ++i) {
        const double g = g_flat(pp, 4, fl, i / 49.0);
        lo = std::min(lo, g);
        hi = std::max(hi, g);
      }
      EXPECT_LT(hi - lo, 1e-10);
    }
  }
  const double g0 = g_flat({3, 0.0, 0.4}, 4, Flavor::Free, 0.3);
  EXPECT_NEAR(g0, std::log(std::exp(0.4) + 2), 1e-13);
}

TEST(GFlat, EqualsPhiAtFlatPoint) {
  const PottsParams pp{5, 1.1, 0.01};
  const auto ext = bp_extremal(pp, 4);
  const auto spec = potts_spec(pp);
  EXPECT_NEAR(g_flat(pp, 4, Flavor::Max, ext.b_max) + 2 * std::log(pp.C()),
              phi(spec, 4, ext.h_max).total, 1e-11);
}

TEST(EllProfile, CoexistenceShape) {
  const PottsParams pp{5, 1.1, 0.01};
  const auto prof = ell_profile(pp, 4);
  ASSERT_FALSE(prof.degenerate);
  EXPECT_TRUE(prof.argmax_at_ends);
  EXPECT_LT(prof.boundary_gap_low, 1e-9);
  EXPECT_LT(prof.boundary_gap_high, 1e-9);
  EXPECT_GT(prof.a4, 0.0);
  const auto spec = potts_spec(pp);
  const auto ext = bp_extremal(pp, 4);
  EXPECT_NEAR(prof.f.front(), phi(spec, 4, ext.h_free).total, 1e-11);
  EXPECT_NEAR(prof.f.back(), phi(spec, 4, ext.h_max).total, 1e-11);
}

TEST(EllProfile, EdgePartIsPermutationAverage) {
  const PottsParams pp{5, 1.1, 0.01};
  const auto spec = potts_spec(pp);
  const int d = 6;
  const auto prof = ell_profile(pp, d);
  for (int ell : {0, 1, 2, d - 1, d}) {
    std::vector<SimplexMeasure> t;
    for (int j = 0; j < d; ++j) t.push_back(bias_to_simplex(j < ell ? prof.b_max : prof.b_free, 5));
    const double avg = oracle::permutation_average(d, [&](const std::vector<int>& p) {
      std::vector<SimplexMeasure> perm;
      for (int i : p) perm.push_back(t[i]);
      return std::log(psi_e(spec, d, perm));
    });
    EXPECT_NEAR(prof.f_e[ell], avg, 1e-10);
    EXPECT_NEAR(prof.f_vx[ell], log_psi_vx(spec, d, t), 1e-10);
  }
}

TEST(EllProfile, DegenerateIsFlat) {
  const auto prof = ell_profile({2, 0.8, 0.3}, 4);
  EXPECT_TRUE(prof.degenerate);
  for (double f : prof.f) EXPECT_NEAR(f, prof.f[0], 1e-12);
}
