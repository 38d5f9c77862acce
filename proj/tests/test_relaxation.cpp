#include <gtest/gtest.h>

#include <algorithm>
#include <limits>

#include "mpnd/errors.hpp"
#include "mpnd/evaluate.hpp"
#include "mpnd/relaxation.hpp"
#include "mpnd/rng.hpp"
#include "oracles.hpp"

namespace mpnd {
namespace {

double rel(double a) { return 1e-9 * std::max(1.0, std::abs(a)); }

Instance one_commodity(std::vector<double> demand, double cost) {
  Instance inst;
  inst.base.vertices = {"a", "b"};
  inst.base.edges.push_back({"ab", 0, 1, cost, 10.0});
  inst.base.commodities.push_back({"c", 0, 1, demand[0]});
  inst.periods = demand.size();
  inst.demand = {demand};
  inst.cost = {std::vector<double>(demand.size(), cost)};
  inst.paths = {{Path{0}}};
  inst.phi = 10.0;
  return inst;
}

// Walks the construction sequence assigning random paths; calls f after each
// step with the partial routing.
template <class F>
void random_walk(const Instance& inst, Rng& rng, F&& f) {
  RoutingState r(inst.num_commodities(), inst.periods);
  for (const auto& [c, t] : construction_sequence(inst)) {
    r.assign(c, t, static_cast<int>(rng.below(inst.num_paths(c))));
    f(r, c, t);
  }
}

TEST(Lp, CapacityPersistsAcrossPeriods) {
  // Path cost 2 per module, demand 10 then 20, module size 10: the second
  // period only pays for the extra 10 units.
  const LpSolution lp = nominal_lp_optimum(one_commodity({10.0, 20.0}, 2.0));
  EXPECT_DOUBLE_EQ(lp.value, 4.0);
  EXPECT_DOUBLE_EQ(lp.lower_bound, 4.0);
  EXPECT_EQ(lp.capacity[0], (std::vector<double>{1.0, 1.0}));
}

TEST(Lp, ZeroDemandCostsNothing) {
  const LpSolution lp = nominal_lp_optimum(one_commodity({0.0, 0.0, 0.0}, 5.0));
  EXPECT_EQ(lp.value, 0.0);
  EXPECT_EQ(lp.lower_bound, 0.0);
}

TEST(Lp, NoPathIsAnError) {
  Instance inst = one_commodity({1.0}, 1.0);
  inst.paths[0].clear();
  EXPECT_THROW(nominal_lp_optimum(inst), ValidationError);
}

TEST(Lp, MatchesEnumerationWithConsistentCosts) {
  oracle::RandomSpec spec;
  spec.consistent_costs = true;
  spec.max_space = 5000;
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    const Instance inst = oracle::random_instance(seed, spec);
    const LpSolution lp = nominal_lp_optimum(inst);
    double best = std::numeric_limits<double>::infinity();
    oracle::for_each_routing(inst, [&](const RoutingState& r) {
      best = std::min(best, oracle::fractional_cost(inst, r));
    });
    EXPECT_NEAR(lp.value, best, rel(best)) << "seed " << seed;
    EXPECT_NEAR(lp.lower_bound, lp.value, rel(lp.value)) << "seed " << seed;
    EXPECT_NEAR(oracle::fractional_cost(inst, lp.routing), lp.value, rel(lp.value));
  }
}

TEST(Lp, BoundsHoldOnEveryRouting) {
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    const Instance inst = oracle::random_instance(seed);
    const LpSolution lp = nominal_lp_optimum(inst);
    const MultibandSet nominal = build_multiband(inst, BandSpec::none());
    const MultibandSet robust = build_multiband(inst, BandSpec::defaults());
    LoadEvaluator a(inst, nominal);
    LoadEvaluator b(inst, robust);
    double frac_min = std::numeric_limits<double>::infinity();
    double int_min = std::numeric_limits<double>::infinity();
    oracle::for_each_routing(inst, [&](const RoutingState& r) {
      frac_min = std::min(frac_min, oracle::fractional_cost(inst, r));
      int_min = std::min(int_min, a.cost(r));
      EXPECT_LE(lp.lower_bound, b.cost(r) + rel(lp.lower_bound));
    });
    EXPECT_LE(lp.lower_bound, frac_min + rel(frac_min)) << "seed " << seed;
    EXPECT_LE(lp.value, int_min + rel(int_min)) << "seed " << seed;
    EXPECT_LE(lp.lower_bound, lp.value + rel(lp.value));
  }
}

TEST(Lp, PureRoutingWithMonotoneFlows) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = oracle::random_instance(seed);
    const LpSolution lp = nominal_lp_optimum(inst);
    std::vector<std::vector<double>> load(inst.num_edges(), std::vector<double>(inst.periods));
    for (CommodityIndex c = 0; c < inst.num_commodities(); ++c) {
      for (PeriodIndex t = 0; t < inst.periods; ++t) {
        ASSERT_EQ(lp.routing.at(c, t), lp.best_path[c]);
        if (t > 0) EXPECT_LE(inst.demand[c][t - 1], inst.demand[c][t]);
        for (EdgeIndex e : inst.paths[c][static_cast<std::size_t>(lp.best_path[c])]) {
          load[e][t] += inst.demand[c][t];
        }
      }
    }
    for (EdgeIndex e = 0; e < inst.num_edges(); ++e) {
      double cumulative = 0.0;
      for (PeriodIndex t = 0; t < inst.periods; ++t) {
        EXPECT_GE(lp.capacity[e][t], 0.0);
        cumulative += lp.capacity[e][t];
        EXPECT_NEAR(cumulative, load[e][t] / inst.phi, rel(cumulative));
      }
    }
  }
}

TEST(Prefix, EndpointsAndLowerBound) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = oracle::random_instance(seed);
    const LpSolution lp = nominal_lp_optimum(inst);
    const RoutingState empty(inst.num_commodities(), inst.periods);
    EXPECT_NEAR(fixed_prefix_lp_value(inst, lp, empty), lp.value, rel(lp.value));
    EXPECT_NEAR(fixed_prefix_lp_value(inst, empty), lp.value, rel(lp.value));
    Rng rng(seed);
    random_walk(inst, rng, [&](const RoutingState& r, CommodityIndex, PeriodIndex) {
      const double v = fixed_prefix_lp_value(inst, lp, r);
      EXPECT_GE(v + rel(v), lp.lower_bound);
      if (r.complete()) EXPECT_NEAR(v, oracle::fractional_cost(inst, r), rel(v));
    });
  }
}

TEST(Prefix, AtLeastOptimumWithConsistentCosts) {
  oracle::RandomSpec spec;
  spec.consistent_costs = true;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = oracle::random_instance(seed, spec);
    const LpSolution lp = nominal_lp_optimum(inst);
    Rng rng(seed);
    random_walk(inst, rng, [&](const RoutingState& r, CommodityIndex, PeriodIndex) {
      EXPECT_GE(fixed_prefix_lp_value(inst, lp, r) + rel(lp.value), lp.value);
    });
  }
}

// Capacity bought for a deviated flow can be reused by a later deviation, so
// the completed-with-p* value is not monotone along the prefix.
TEST(Prefix, ValueCanDropAsThePrefixGrows) {
  bool dropped = false;
  for (std::uint64_t seed = 1; seed <= 400 && !dropped; ++seed) {
    const Instance inst = oracle::random_instance(seed);
    const LpSolution lp = nominal_lp_optimum(inst);
    Rng rng(seed);
    double last = lp.value;
    random_walk(inst, rng, [&](const RoutingState& r, CommodityIndex, PeriodIndex) {
      const double v = fixed_prefix_lp_value(inst, lp, r);
      if (v < last - rel(last)) dropped = true;
      last = v;
    });
  }
  EXPECT_TRUE(dropped);
}

TEST(Prefix, RejectsMalformedPrefix) {
  const Instance inst = oracle::random_instance(5);
  const LpSolution lp = nominal_lp_optimum(inst);
  const auto seq = construction_sequence(inst);
  ASSERT_GE(seq.size(), 2u);
  RoutingState r(inst.num_commodities(), inst.periods);
  r.assign(seq[1].first, seq[1].second, 0);  // skips the first pair
  EXPECT_THROW(fixed_prefix_lp_value(inst, lp, r), ValidationError);
  RoutingState wrong(inst.num_commodities() + 1, inst.periods);
  EXPECT_THROW(fixed_prefix_lp_value(inst, lp, wrong), ValidationError);
}

TEST(Prefix, IncrementalMatchesReference) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = oracle::random_instance(seed);
    const LpSolution lp = nominal_lp_optimum(inst);
    PrefixEvaluator inc(inst, lp);
    EXPECT_NEAR(inc.value(), lp.value, rel(lp.value));
    Rng rng(seed + 1000);
    RoutingState r(inst.num_commodities(), inst.periods);
    for (const auto& [c, t] : construction_sequence(inst)) {
      for (std::size_t p = 0; p < inst.num_paths(c); ++p) {
        RoutingState next = r;
        next.assign(c, t, static_cast<int>(p));
        const double want = fixed_prefix_lp_value(inst, lp, next);
        EXPECT_NEAR(inc.try_move(c, t, p), want, rel(want)) << "seed " << seed;
      }
      const std::size_t p = rng.below(inst.num_paths(c));
      r.assign(c, t, static_cast<int>(p));
      inc.commit(c, t, p);
      const double want = fixed_prefix_lp_value(inst, lp, r);
      EXPECT_NEAR(inc.value(), want, rel(want));
    }
    inc.reset();
    EXPECT_NEAR(inc.value(), lp.value, rel(lp.value));
  }
}

TEST(Lp, SinglePathCostFormula) {
  const Instance inst = one_commodity({10.0, 15.0, 15.0, 30.0}, 3.0);
  // (10 + 5 + 0 + 15) * 3 / 10
  EXPECT_DOUBLE_EQ(single_path_cost(inst, 0, 0), 9.0);
}

}  // namespace
}  // namespace mpnd
