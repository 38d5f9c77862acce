#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mpnd/errors.hpp"
#include "mpnd/instance.hpp"
#include "oracles.hpp"
#include "test_paths.hpp"

namespace mpnd {
namespace {

constexpr const char* kTiny = R"(?SNDlib native format; type: network; version: 1.0
# tiny
NODES (
  A ( 0 0 )
  B ( 1 0 )
  C ( 1 1 )
)
LINKS (
  AB ( A B ) 0.00 0.00 0.00 0.00 ( 10.00 3.00 40.00 9.00 )
  BC ( B C ) 0.00 0.00 0.00 0.00 ( 10.00 2.00 )
  AC ( A C ) 0.00 0.00 0.00 0.00 ( 10.00 6.00 )
)
DEMANDS (
  AC ( A C ) 1 12.00 UNLIMITED
  BA ( B A ) 1 5.00 UNLIMITED
)
ADMISSIBLE_PATHS (
)
)";

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TEST(Sndlib, ReadsTinyNetwork) {
  const BaseNetwork net = parse_sndlib(std::string_view(kTiny));
  ASSERT_EQ(net.vertices.size(), 3u);
  ASSERT_EQ(net.edges.size(), 3u);
  ASSERT_EQ(net.commodities.size(), 2u);
  EXPECT_EQ(net.edges[0].id, "AB");
  EXPECT_DOUBLE_EQ(net.edges[0].module_capacity, 10.0);
  EXPECT_DOUBLE_EQ(net.edges[0].module_cost, 3.0);
  EXPECT_EQ(net.commodities[1].source, 1u);
  EXPECT_EQ(net.commodities[1].target, 0u);
  EXPECT_DOUBLE_EQ(net.commodities[0].demand, 12.0);
}

TEST(Sndlib, FixtureSizes) {
  struct Row {
    const char* file;
    std::size_t v, e, c;
  };
  for (const Row& row : {Row{"germany50", 50, 88, 662}, Row{"polska", 12, 18, 66},
                         Row{"pdh", 11, 34, 24}}) {
    const BaseNetwork net = parse_sndlib(slurp(test::sndlib_path(row.file)));
    EXPECT_EQ(net.vertices.size(), row.v) << row.file;
    EXPECT_EQ(net.edges.size(), row.e) << row.file;
    EXPECT_EQ(net.commodities.size(), row.c) << row.file;
  }
}

TEST(Sndlib, ErrorsCarryLineNumbers) {
  std::string text = kTiny;
  text.replace(text.find("BC ( B C )"), 10, "BC ( B X )");
  try {
    parse_sndlib(std::string_view(text));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 10u);
    EXPECT_NE(std::string(e.what()).find("'X'"), std::string::npos);
  }
}

TEST(Sndlib, RejectsMissingSectionsAndZeroDemand) {
  EXPECT_THROW(parse_sndlib(std::string_view("NODES (\n A ( 0 0 )\n)\n")), ParseError);
  std::string zero = kTiny;
  zero.replace(zero.find("5.00 UNLIMITED"), 4, "0.00");
  EXPECT_THROW(parse_sndlib(std::string_view(zero)), ValidationError);
}

TEST(Expand, IdentityGrowthRepeatsBase) {
  GrowthConfig cfg;
  cfg.periods = 4;
  const Instance inst = expand_multiperiod(parse_sndlib(std::string_view(kTiny)), cfg);
  for (CommodityIndex c = 0; c < inst.num_commodities(); ++c) {
    for (PeriodIndex t = 0; t < 4; ++t) {
      EXPECT_EQ(inst.demand[c][t], inst.base.commodities[c].demand);
    }
  }
  for (EdgeIndex e = 0; e < inst.num_edges(); ++e) {
    for (PeriodIndex t = 0; t < 4; ++t) EXPECT_EQ(inst.cost[e][t], inst.base.edges[e].module_cost);
  }
  EXPECT_DOUBLE_EQ(inst.phi, 10.0);
}

TEST(Expand, GeometricGrowth) {
  BaseNetwork net = parse_sndlib(std::string_view(kTiny));
  net.commodities[0].demand = 100.0;
  GrowthConfig cfg;
  cfg.periods = 3;
  cfg.demand_growth = 2.0;
  cfg.cost_discount = 0.5;
  const Instance inst = expand_multiperiod(net, cfg);
  EXPECT_EQ(inst.demand[0], (std::vector<double>{100.0, 200.0, 400.0}));
  EXPECT_EQ(inst.cost[0], (std::vector<double>{3.0, 1.5, 0.75}));
}

TEST(Expand, AlwaysValidAndDeterministic) {
  const BaseNetwork net = parse_sndlib(slurp(test::sndlib_path("polska")));
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    GrowthConfig cfg;
    cfg.periods = 1 + seed % 5;
    cfg.demand_growth = 1.0 + 0.05 * static_cast<double>(seed % 7);
    cfg.cost_discount = 1.0 - 0.04 * static_cast<double>(seed % 5);
    cfg.jitter = 0.1 * static_cast<double>(seed % 10);
    cfg.paths_per_commodity = 1 + seed % 5;
    cfg.seed = seed;
    const Instance a = expand_multiperiod(net, cfg);
    EXPECT_TRUE(validate(a).empty()) << "seed " << seed << ": " << validate(a).front();
    const Instance b = expand_multiperiod(net, cfg);
    EXPECT_EQ(a.demand, b.demand);
    EXPECT_EQ(a.paths, b.paths);
  }
}

TEST(Expand, RejectsIllegalConfig) {
  const BaseNetwork net = parse_sndlib(std::string_view(kTiny));
  GrowthConfig cfg;
  cfg.demand_growth = 0.9;
  EXPECT_THROW(expand_multiperiod(net, cfg), ValidationError);
  cfg = {};
  cfg.cost_discount = 1.2;
  EXPECT_THROW(expand_multiperiod(net, cfg), ValidationError);
  cfg = {};
  cfg.jitter = 1.0;
  EXPECT_THROW(expand_multiperiod(net, cfg), ValidationError);
}

// k shortest simple paths against full enumeration sorted by (weight, edges).
TEST(Paths, MatchExhaustiveEnumeration) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    oracle::RandomSpec spec;
    spec.max_space = UINT64_MAX;
    const Instance inst = oracle::random_instance(seed, spec);
    const auto w = edge_weights(inst.base, PathWeight::kModuleCost);
    for (std::size_t k : {1u, 3u, 7u}) {
      const auto got = enumerate_paths(inst.base, k, w);
      for (CommodityIndex c = 0; c < inst.num_commodities(); ++c) {
        const Commodity& com = inst.base.commodities[c];
        auto all = oracle::all_simple_paths(inst.base, com.source, com.target);
        auto weight = [&](const Path& p) {
          double s = 0.0;
          for (EdgeIndex e : p) s += w[e];
          return s;
        };
        std::sort(all.begin(), all.end(), [&](const Path& a, const Path& b) {
          const double wa = weight(a);
          const double wb = weight(b);
          return wa != wb ? wa < wb : a < b;
        });
        all.resize(std::min(all.size(), k));
        EXPECT_EQ(got[c], all) << "seed " << seed << " commodity " << c << " k " << k;
      }
    }
  }
}

TEST(Paths, HopWeights) {
  const BaseNetwork net = parse_sndlib(std::string_view(kTiny));
  const auto hops = edge_weights(net, PathWeight::kHops);
  EXPECT_EQ(hops, (std::vector<double>{1.0, 1.0, 1.0}));
  const auto paths = enumerate_paths(net, 2, hops);
  EXPECT_EQ(paths[0][0], (Path{2}));
  EXPECT_EQ(paths[0][1], (Path{0, 1}));
}

TEST(Paths, DisconnectedCommodity) {
  BaseNetwork net = parse_sndlib(std::string_view(kTiny));
  net.vertices.push_back("Z");
  net.commodities.push_back({"AZ", 0, 3, 1.0});
  EXPECT_THROW(enumerate_paths(net, 2, edge_weights(net, PathWeight::kHops)), ValidationError);
}

TEST(Validate, ReportsDecreasingDemand) {
  GrowthConfig cfg;
  cfg.periods = 3;
  Instance inst = expand_multiperiod(parse_sndlib(std::string_view(kTiny)), cfg);
  EXPECT_TRUE(validate(inst).empty());
  inst.demand[1][2] = inst.demand[1][1] - 1.0;
  const auto problems = validate(inst);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_EQ(problems[0], "demand decreasing: BA, t=3");
}

TEST(Validate, ReportsIncreasingCostAndBadPath) {
  GrowthConfig cfg;
  cfg.periods = 2;
  Instance inst = expand_multiperiod(parse_sndlib(std::string_view(kTiny)), cfg);
  inst.cost[0][1] = inst.cost[0][0] + 1.0;
  inst.paths[0].push_back(Path{0});
  const auto problems = validate(inst);
  ASSERT_EQ(problems.size(), 2u);
  EXPECT_NE(problems[0].find("cost increasing: AB"), std::string::npos);
  EXPECT_NE(problems[1].find("invalid path: AC"), std::string::npos);
}

TEST(NativeFormat, RoundTrip) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    oracle::RandomSpec spec;
    spec.integral = seed % 2 == 0;
    const Instance a = oracle::random_instance(seed, spec);
    const Instance b = read_instance(write_instance(a));
    EXPECT_EQ(a.periods, b.periods);
    EXPECT_EQ(a.phi, b.phi);
    EXPECT_EQ(a.demand, b.demand);
    EXPECT_EQ(a.cost, b.cost);
    EXPECT_EQ(a.paths, b.paths);
    EXPECT_EQ(a.base.vertices, b.base.vertices);
    EXPECT_EQ(write_instance(a), write_instance(b));
  }
}

TEST(NativeFormat, ErrorsCarryLineNumbers) {
  const std::string text =
      "[meta]\nperiods 2\nphi 10\nvertex a\nvertex b\n[edges]\nab a b 10 3\n";
  try {
    read_instance(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
  }
  EXPECT_THROW(read_instance("[edges]\nab a b 10 3\n"), ParseError);
  EXPECT_THROW(read_instance("[meta]\nperiods 1\n[bogus]\n"), ParseError);
}

TEST(NativeFormat, Sniffing) {
  EXPECT_TRUE(looks_like_sndlib(kTiny));
  EXPECT_FALSE(looks_like_sndlib("[meta]\nperiods 1\n"));
}

}  // namespace
}  // namespace mpnd
