#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mpnd/ants.hpp"
#include "mpnd/errors.hpp"
#include "oracles.hpp"

namespace mpnd {
namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

Instance two_path_instance() {
  // a-b direct (cost 5) or a-c-b (cost 1 + 1); two commodities, two periods.
  Instance inst;
  inst.base.vertices = {"a", "b", "c"};
  inst.base.edges = {{"ab", 0, 1, 5.0, 10.0}, {"ac", 0, 2, 1.0, 10.0}, {"cb", 2, 1, 1.0, 10.0}};
  inst.base.commodities = {{"x", 0, 1, 6.0}, {"y", 0, 1, 3.0}};
  inst.periods = 2;
  inst.phi = 10.0;
  inst.demand = {{6.0, 8.0}, {3.0, 4.0}};
  inst.cost = {{5.0, 4.0}, {1.0, 1.0}, {1.0, 1.0}};
  inst.paths = {{Path{1, 2}, Path{0}}, {Path{1, 2}, Path{0}}};
  return inst;
}

ColonyConfig small_config(std::uint64_t seed = 1) {
  ColonyConfig cfg;
  cfg.ants = 20;
  cfg.max_batches = 5;
  cfg.seed = seed;
  return cfg;
}

TEST(Trails, InitFromLp) {
  const Instance inst = two_path_instance();
  const LpSolution lp = nominal_lp_optimum(inst);
  const TrailMatrix tr = init_trails(inst, lp);
  EXPECT_DOUBLE_EQ(tr.floor(), 0.05);
  for (CommodityIndex c = 0; c < 2; ++c) {
    for (PeriodIndex t = 0; t < 2; ++t) {
      EXPECT_EQ(tr.at(c, 0, t), 1.0);
      EXPECT_EQ(tr.at(c, 1, t), 0.05);
    }
  }
  EXPECT_EQ(init_trails(inst, lp).values(), tr.values());
}

TEST(Probabilities, FormulaExamples) {
  const std::vector<double> tau{0.2, 0.8};
  const std::vector<double> eta{0.5, 0.5};
  const auto p = move_probabilities(tau, eta, 0.5);
  EXPECT_NEAR(p[0], 0.35, 1e-15);
  EXPECT_NEAR(p[1], 0.65, 1e-15);
  const auto only_tau = move_probabilities(tau, std::vector<double>{1.0, 0.0}, 1.0);
  EXPECT_NEAR(only_tau[0], 0.2, 1e-15);
  const auto same = move_probabilities(std::vector<double>{0.3, 0.3, 0.3},
                                       std::vector<double>{0.3, 0.3, 0.3}, 0.7);
  for (double x : same) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
  const auto canon = canonical_probabilities(tau, std::vector<double>{1.0, 0.5}, 1.0, 1.0);
  EXPECT_NEAR(canon[0], 0.2 / 0.6, 1e-15);
}

TEST(Probabilities, SumToOneAndScaleInvariant) {
  Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    std::vector<double> tau(n), eta(n);
    for (std::size_t i = 0; i < n; ++i) {
      tau[i] = 0.01 + rng.uniform() * 10.0;
      eta[i] = 0.05 + rng.uniform();
    }
    const double alpha = rng.uniform();
    const auto p = move_probabilities(tau, eta, alpha);
    EXPECT_NEAR(sum(p), 1.0, 1e-12);
    for (double x : p) EXPECT_GT(x, 0.0);
    const double s = 0.001 + rng.uniform() * 1000.0;
    for (std::size_t i = 0; i < n; ++i) {
      tau[i] *= s;
      eta[i] *= s;
    }
    const auto q = move_probabilities(tau, eta, alpha);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(p[i], q[i], 1e-12);
  }
}

TEST(Probabilities, Errors) {
  EXPECT_THROW(move_probabilities({}, {}, 0.5), ValidationError);
  EXPECT_THROW(move_probabilities(std::vector<double>{0.0, 0.0}, std::vector<double>{0.0, 0.0}, 0.5),
               ValidationError);
  EXPECT_THROW(move_probabilities(std::vector<double>{-1.0}, std::vector<double>{1.0}, 0.5),
               ValidationError);
}

TEST(Attractiveness, AffineMap) {
  EXPECT_EQ(attractiveness(std::vector<double>{7.0, 7.0}, 0.05), (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(attractiveness(std::vector<double>{10.0, 20.0}, 0.05),
            (std::vector<double>{1.0, 0.05}));
  const auto eta = attractiveness(std::vector<double>{10.0, 15.0, 20.0}, 0.05);
  EXPECT_EQ(eta[0], 1.0);
  EXPECT_DOUBLE_EQ(eta[1], 0.05 + 0.5 * 0.95);
  EXPECT_EQ(eta[2], 0.05);
  // Rounding-level spreads are ties.
  EXPECT_EQ(attractiveness(std::vector<double>{1e6, 1e6 + 1e-7}, 0.05),
            (std::vector<double>{1.0, 1.0}));
}

TEST(Attractiveness, ReferenceUsesPrefixValues) {
  const Instance inst = two_path_instance();
  const LpSolution lp = nominal_lp_optimum(inst);
  const RoutingState empty(2, 2);
  const auto first = construction_sequence(inst).front();
  const auto eta = attractiveness(inst, lp, empty, first.first, first.second, 0.05);
  ASSERT_EQ(eta.size(), 2u);
  EXPECT_EQ(eta[0], 1.0);
  EXPECT_DOUBLE_EQ(eta[1], 0.05);
}

TEST(Sample, FollowsCumulativeMass) {
  Rng rng(5);
  std::vector<int> hits(3, 0);
  const std::vector<double> p{0.2, 0.0, 0.8};
  for (int i = 0; i < 20000; ++i) ++hits[sample(p, rng)];
  EXPECT_EQ(hits[1], 0);
  EXPECT_NEAR(hits[0] / 20000.0, 0.2, 0.02);
}

TEST(Construct, DeterministicAndComplete) {
  const Instance inst = oracle::random_instance(9);
  const LpSolution lp = nominal_lp_optimum(inst);
  const TrailMatrix tr = init_trails(inst, lp);
  const ColonyConfig cfg = small_config();
  Rng a(42);
  Rng b(42);
  const RoutingState ra = construct_routing(inst, lp, tr, cfg, a);
  EXPECT_TRUE(ra.complete());
  EXPECT_NO_THROW(check_routing(inst, ra));
  EXPECT_EQ(ra, construct_routing(inst, lp, tr, cfg, b));
}

TEST(Construct, SinglePathIsForced) {
  Instance inst = two_path_instance();
  for (auto& p : inst.paths) p.resize(1);
  const LpSolution lp = nominal_lp_optimum(inst);
  Rng rng(1);
  EXPECT_EQ(construct_routing(inst, lp, init_trails(inst, lp), small_config(), rng),
            RoutingState::uniform(inst, 0));
}

TEST(Construct, DominantTrailsAreFollowed) {
  const Instance inst = oracle::random_instance(17);
  const LpSolution lp = nominal_lp_optimum(inst);
  const TrailMatrix tr = init_trails(inst, lp, 1e-12);
  ColonyConfig cfg = small_config();
  cfg.alpha = 1.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(s);
    EXPECT_EQ(construct_routing(inst, lp, tr, cfg, rng), lp.routing);
  }
}

TEST(Batch, ParallelMatchesSerial) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Instance inst = oracle::random_instance(seed);
    const MultibandSet mb = build_multiband(inst, BandSpec::defaults());
    const LpSolution lp = nominal_lp_optimum(inst);
    const TrailMatrix tr = init_trails(inst, lp);
    ColonyConfig cfg = small_config(seed);
    cfg.workers = 3;
    const auto s = construct_batch_serial(inst, mb, lp, tr, cfg, 4);
    const auto p = construct_batch_parallel(inst, mb, lp, tr, cfg, 4);
    ASSERT_EQ(s.size(), p.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_EQ(s[i].routing, p[i].routing);
      EXPECT_EQ(s[i].value, p[i].value);
      EXPECT_TRUE(s[i].built);
    }
  }
}

TEST(Batch, PastDeadlineBuildsNothing) {
  const Instance inst = oracle::random_instance(2);
  const MultibandSet mb = build_multiband(inst, BandSpec::defaults());
  const LpSolution lp = nominal_lp_optimum(inst);
  const auto batch = construct_batch_serial(inst, mb, lp, init_trails(inst, lp), small_config(),
                                            0, Clock::now() - std::chrono::seconds(1));
  for (const auto& a : batch) EXPECT_FALSE(a.built);
}

AntResult ant(const Instance& inst, int p, double value) {
  AntResult a;
  a.routing = RoutingState::uniform(inst, p);
  a.value = value;
  a.built = true;
  return a;
}

TEST(Pheromone, ReinforcementExamples) {
  const Instance inst = two_path_instance();
  const LpSolution lp = nominal_lp_optimum(inst);
  const TrailMatrix initial = init_trails(inst, lp);
  const double lb = 10.0;
  const double mean = 20.0;
  struct Case {
    double z, want_lp_path;
  };
  for (const Case& k : {Case{lb, 2.0}, Case{mean, 1.0}, Case{2 * mean - lb, 0.05}}) {
    TrailMatrix tr = initial;
    MovingAverage avg(4);
    avg.push(mean);
    const std::vector<AntResult> batch{ant(inst, 0, k.z)};
    const UpdateOutcome u = pheromone_update(tr, initial, batch, lb, avg);
    EXPECT_TRUE(u.applied);
    EXPECT_DOUBLE_EQ(tr.at(0, 0, 0), k.want_lp_path) << "z " << k.z;
    EXPECT_DOUBLE_EQ(tr.at(0, 1, 0), 0.05);
  }
}

TEST(Pheromone, EmptyWindowOnlyRecords) {
  const Instance inst = two_path_instance();
  const LpSolution lp = nominal_lp_optimum(inst);
  const TrailMatrix initial = init_trails(inst, lp);
  TrailMatrix tr = initial;
  MovingAverage avg(2);
  const std::vector<AntResult> batch{ant(inst, 1, 30.0)};
  const UpdateOutcome u = pheromone_update(tr, initial, batch, 10.0, avg);
  EXPECT_FALSE(u.applied);
  EXPECT_FALSE(u.converged);
  EXPECT_EQ(tr.values(), initial.values());
  EXPECT_EQ(avg.size(), 1u);
  EXPECT_EQ(avg.mean(), 30.0);
}

TEST(Pheromone, ConvergesAtTheBound) {
  const Instance inst = two_path_instance();
  const LpSolution lp = nominal_lp_optimum(inst);
  const TrailMatrix initial = init_trails(inst, lp);
  TrailMatrix tr = initial;
  MovingAverage avg(3);
  avg.push(10.0);
  const std::vector<AntResult> batch{ant(inst, 0, 10.0), ant(inst, 1, 10.0)};
  const UpdateOutcome u = pheromone_update(tr, initial, batch, 10.0, avg);
  EXPECT_TRUE(u.converged);
  EXPECT_EQ(tr.values(), initial.values());
}

TEST(Pheromone, TrailsStayFiniteAboveFloor) {
  const Instance inst = oracle::random_instance(4);
  const LpSolution lp = nominal_lp_optimum(inst);
  const TrailMatrix initial = init_trails(inst, lp);
  TrailMatrix tr = initial;
  MovingAverage avg(5);
  Rng rng(8);
  for (int round = 0; round < 200; ++round) {
    std::vector<AntResult> batch;
    for (int i = 0; i < 10; ++i) {
      AntResult a;
      a.routing = RoutingState(inst.num_commodities(), inst.periods);
      for (CommodityIndex c = 0; c < inst.num_commodities(); ++c) {
        for (PeriodIndex t = 0; t < inst.periods; ++t) {
          a.routing.assign(c, t, static_cast<int>(rng.below(inst.num_paths(c))));
        }
      }
      // Values straddle the bound and the mean, with occasional huge outliers.
      a.value = 100.0 + (rng.below(10) == 0 ? 1e12 : rng.symmetric() * 99.0);
      a.built = true;
      batch.push_back(a);
    }
    pheromone_update(tr, initial, batch, 1.0, avg);
    for (double x : tr.values()) {
      ASSERT_TRUE(std::isfinite(x));
      ASSERT_GE(x, tr.floor());
    }
  }
}

TEST(MovingAverageTest, KeepsLastValues) {
  MovingAverage m(3);
  for (double v : {1.0, 2.0, 3.0, 10.0}) m.push(v);
  EXPECT_EQ(m.size(), 3u);
  EXPECT_DOUBLE_EQ(m.mean(), 5.0);
  EXPECT_THROW(MovingAverage(0), ValidationError);
}

TEST(Colony, ZeroBudgetReturnsBaseline) {
  const Instance inst = oracle::random_instance(6);
  const MultibandSet mb = build_multiband(inst, BandSpec::defaults());
  ColonyConfig cfg;
  cfg.time_limit = 0.0;
  const ColonyResult r = run_colony(inst, mb, cfg);
  EXPECT_EQ(r.best.cost, sp_baseline(inst, mb).cost);
  EXPECT_EQ(r.ants_built, 0u);
}

TEST(Colony, SingletonSpaceStopsAfterOneBatch) {
  Instance inst = two_path_instance();
  for (auto& p : inst.paths) p.resize(1);
  const MultibandSet mb = build_multiband(inst, BandSpec::defaults());
  ColonyConfig cfg = small_config();
  cfg.max_batches = 50;
  const ColonyResult r = run_colony(inst, mb, cfg);
  EXPECT_EQ(r.batches, 1u);
  EXPECT_EQ(r.best.routing, RoutingState::uniform(inst, 0));
}

TEST(Colony, NeverWorseThanBaselineAndDeterministic) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Instance inst = oracle::random_instance(seed);
    const MultibandSet mb = build_multiband(inst, BandSpec::defaults());
    const ColonyConfig cfg = small_config(seed);
    const ColonyResult a = run_colony(inst, mb, cfg);
    EXPECT_LE(a.best.cost, a.baseline_cost);
    EXPECT_EQ(a.baseline_cost, sp_baseline(inst, mb).cost);
    EXPECT_TRUE(check_feasible(a.best, inst, mb).ok);
    for (std::size_t i = 1; i < a.trace.size(); ++i) EXPECT_LE(a.trace[i], a.trace[i - 1]);
    const ColonyResult b = run_colony(inst, mb, cfg);
    EXPECT_EQ(a.best.routing, b.best.routing);
    EXPECT_EQ(a.best.cost, b.best.cost);
    EXPECT_EQ(a.trace, b.trace);
    ColonyConfig par = cfg;
    par.workers = 2;
    const ColonyResult c = run_colony(inst, mb, par);
    EXPECT_EQ(a.best.routing, c.best.routing);
    EXPECT_EQ(a.trace, c.trace);
  }
}

TEST(Colony, RejectsBadConfig) {
  const Instance inst = two_path_instance();
  const MultibandSet mb = build_multiband(inst, BandSpec::defaults());
  ColonyConfig cfg;
  EXPECT_THROW(run_colony(inst, mb, cfg), ValidationError);  // no budget
  cfg = small_config();
  cfg.alpha = 1.5;
  EXPECT_THROW(run_colony(inst, mb, cfg), ValidationError);
  cfg = small_config();
  cfg.ants = 0;
  EXPECT_THROW(run_colony(inst, mb, cfg), ValidationError);
}

}  // namespace
}  // namespace mpnd
