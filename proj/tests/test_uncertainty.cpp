#include <gtest/gtest.h>

#include "mpnd/errors.hpp"
#include "mpnd/rng.hpp"
#include "mpnd/uncertainty.hpp"
#include "oracles.hpp"

namespace mpnd {
namespace {

Instance two_commodities(double d1, double d2) {
  Instance inst = oracle::random_instance(3);
  inst.base.commodities.resize(2);
  inst.demand = {{d1}, {d2}};
  inst.paths.resize(2);
  inst.periods = 1;
  return inst;
}

BandSpec three_bands(double f) {
  BandSpec s;
  s.fraction = {-f, 0.0, f};
  s.lambda = {0.0, 0.0, 0.0};
  s.mu = {1.0, 1.0, 0.5};
  return s;
}

// Random rule with k_minus in [-2, 0] and k_plus in [0, max_plus].
BoundRule random_rule(Rng& rng, int max_plus, bool force_negative = true) {
  BoundRule r;
  r.k_minus = -static_cast<int>(rng.below(3));
  r.k_plus = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_plus) + 1));
  r.lambda.assign(r.num_bands(), 0.0);
  r.mu.assign(r.num_bands(), 1.0);
  double budget = 1.0;
  for (int k = r.k_minus; k <= r.k_plus; ++k) {
    if (k == 0) continue;
    const double mu = rng.uniform();
    double lambda = rng.below(3) == 0 ? rng.uniform() * mu : 0.0;
    if (k < 0 && !force_negative) lambda = 0.0;
    lambda = std::min(lambda, budget);
    budget -= lambda;
    r.lambda[r.slot(k)] = lambda;
    r.mu[r.slot(k)] = mu;
  }
  r.check();
  return r;
}

TEST(Multiband, DeviationsFollowDemand) {
  const Instance inst = two_commodities(200.0, 300.0);
  const MultibandSet mb = build_multiband(inst, three_bands(0.1));
  EXPECT_EQ(mb.bands.delta[0][0], (std::vector<double>{-20.0, 0.0, 20.0}));
  EXPECT_EQ(mb.bands.delta[1][0], (std::vector<double>{-30.0, 0.0, 30.0}));
  EXPECT_TRUE(mb.bands.proportional);
  EXPECT_EQ(mb.bands.k_minus, -1);
  EXPECT_EQ(mb.bands.k_plus, 1);
  EXPECT_DOUBLE_EQ(mb.bands.at(1, 0, 1), 30.0);
}

TEST(Multiband, NoUncertainty) {
  const Instance inst = two_commodities(5.0, 7.0);
  const MultibandSet mb = build_multiband(inst, BandSpec::none());
  EXPECT_EQ(mb.bands.num_bands(), 1u);
  EXPECT_EQ(mb.bands.delta[0][0], (std::vector<double>{0.0}));
  EXPECT_EQ(profile(mb.rule, 4).theta, (std::vector<std::size_t>{4}));
}

TEST(Multiband, Defaults) {
  const BandSpec s = BandSpec::defaults();
  EXPECT_EQ(s.fraction, (std::vector<double>{-0.10, -0.05, 0.0, 0.05, 0.10}));
  const BoundRule r = make_rule(s);
  EXPECT_EQ(r.k_minus, -2);
  EXPECT_EQ(r.k_plus, 2);
  EXPECT_FALSE(r.forces_negative());
  EXPECT_EQ(r.upper_count(2, 10), 1u);
  EXPECT_EQ(r.upper_count(1, 10), 3u);  // ceil(2.5)
  EXPECT_EQ(r.lower_count(-1, 10), 0u);
}

TEST(Multiband, RejectsBadSpecs) {
  const Instance inst = two_commodities(5.0, 7.0);
  BandSpec s = three_bands(0.1);
  s.fraction = {0.1, 0.0, 0.2};
  EXPECT_THROW(build_multiband(inst, s), ValidationError);
  s = three_bands(0.1);
  s.fraction = {-0.1, 0.05, 0.1};
  EXPECT_THROW(build_multiband(inst, s), ValidationError);  // no band 0
  s = BandSpec::defaults();
  s.lambda = {0.6, 0.5, 0.0, 0.0, 0.0};
  EXPECT_THROW(build_multiband(inst, s), ValidationError);  // no feasible realization
  s = BandSpec::defaults();
  s.lambda = {0.0, 0.0, 0.0, 0.3, 0.0};
  EXPECT_THROW(build_multiband(inst, s), ValidationError);  // lambda > mu
  s = BandSpec::defaults();
  s.mu = {0.1, 1.5, 1.0, 0.25, 0.1};
  EXPECT_THROW(build_multiband(inst, s), ValidationError);
}

TEST(Multiband, ZeroDemandRowIsAllowed) {
  const Instance inst = two_commodities(0.0, 7.0);
  const MultibandSet mb = build_multiband(inst, BandSpec::defaults());
  EXPECT_EQ(mb.bands.delta[0][0], (std::vector<double>(5, 0.0)));
  BandStructure b = mb.bands;
  b.delta[1][0][3] = b.delta[1][0][4];
  EXPECT_THROW(b.check(), ValidationError);
}

TEST(Multiband, OrderingSurvivesScaling) {
  for (double scale : {1e-6, 0.37, 1.0, 42.0, 1e7}) {
    const Instance inst = two_commodities(3.0 * scale, 11.0 * scale);
    EXPECT_NO_THROW(build_multiband(inst, BandSpec::defaults())) << scale;
  }
}

TEST(Profile, Examples) {
  BoundRule r;
  r.k_minus = 0;
  r.k_plus = 1;
  r.lambda = {0.0, 0.0};
  r.mu = {1.0, 0.5};
  EXPECT_EQ(profile(r, 0).theta, (std::vector<std::size_t>{0, 0}));
  EXPECT_EQ(profile(r, 2).theta, (std::vector<std::size_t>{1, 1}));

  // Bands -1..+2: u(+2) = 1, u(+1) = 2, l(-1) = 1, n = 5.
  const Profile p = profile_from_counts(-1, {1, 0, 0, 0}, {1, 5, 2, 1}, 5);
  EXPECT_EQ(p.at(2), 1u);
  EXPECT_EQ(p.at(1), 2u);
  EXPECT_EQ(p.at(-1), 1u);
  EXPECT_EQ(p.at(0), 1u);
  EXPECT_EQ(p.total(), 5u);
}

TEST(Profile, RejectsInconsistentCounts) {
  EXPECT_THROW(profile_from_counts(-1, {2, 0, 0}, {1, 3, 1}, 3), ValidationError);
  EXPECT_THROW(profile_from_counts(-1, {2, 0, 2}, {2, 3, 2}, 3), ValidationError);
}

TEST(Profile, RespectsBoundsAndSumsToN) {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const BoundRule r = random_rule(rng, 3);
    for (std::size_t n = 0; n <= 12; ++n) {
      const Profile p = profile(r, n);
      EXPECT_EQ(p.total(), n);
      for (int k = r.k_minus; k <= r.k_plus; ++k) {
        if (k == 0) continue;
        EXPECT_GE(p.at(k), oracle::lower_count(r.lambda[r.slot(k)], n));
        EXPECT_LE(p.at(k), oracle::upper_count(r.mu[r.slot(k)], n));
      }
    }
  }
}

TEST(Profile, MonotoneInNWithTwoPositiveBands) {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const BoundRule r = random_rule(rng, 2, false);
    for (std::size_t n = 0; n < 30; ++n) {
      const Profile a = profile(r, n);
      const Profile b = profile(r, n + 1);
      for (int k = 1; k <= r.k_plus; ++k) EXPECT_LE(a.at(k), b.at(k)) << "n " << n << " k " << k;
    }
  }
}

// With three positive bands the outermost-first rule can shrink an inner band
// as n grows, so monotonicity is only claimed for two.
TEST(Profile, InnerBandCanShrinkWithThreePositiveBands) {
  BoundRule r;
  r.k_minus = 0;
  r.k_plus = 3;
  r.lambda = {0.0, 0.0, 0.0, 0.0};
  r.mu = {1.0, 1.0, 0.3, 0.3};
  bool shrank = false;
  for (std::size_t n = 0; n < 10; ++n) {
    shrank = shrank || profile(r, n + 1).at(1) < profile(r, n).at(1);
  }
  EXPECT_TRUE(shrank);
}

// Reserved negative coefficients and a growing outer band can both take the
// extra coefficient, so forced negative deviations also break monotonicity.
TEST(Profile, InnerBandCanShrinkWithForcedNegatives) {
  BoundRule r;
  r.k_minus = -1;
  r.k_plus = 2;
  r.lambda = {0.4, 0.0, 0.0, 0.0};
  r.mu = {1.0, 1.0, 0.1, 0.4};
  EXPECT_EQ(profile(r, 2).at(1), 1u);
  EXPECT_EQ(profile(r, 3).at(1), 0u);
}

TEST(Profile, CountsTolerateRepresentationError) {
  BoundRule r;
  r.k_minus = 0;
  r.k_plus = 1;
  r.lambda = {0.0, 0.1};
  r.mu = {1.0, 0.3};
  // 0.1 * 30 and 0.3 * 10 are not exact in binary.
  EXPECT_EQ(r.lower_count(1, 30), 3u);
  EXPECT_EQ(r.upper_count(1, 10), 3u);
}

}  // namespace
}  // namespace mpnd
