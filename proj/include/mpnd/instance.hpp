#pragma once

// Network, demand and cost data for the multiperiod network design model,
// plus the SNDlib reader, the multiperiod generator, admissible path
// enumeration and the native line-oriented instance format.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mpnd {

using VertexIndex = std::size_t;
using EdgeIndex = std::size_t;
using CommodityIndex = std::size_t;
using PeriodIndex = std::size_t;

// Ordered edge sequence from a commodity's source to its target.
using Path = std::vector<EdgeIndex>;

struct Edge {
  std::string id;
  VertexIndex u = 0;
  VertexIndex v = 0;
  double module_cost = 0.0;      // money per module
  double module_capacity = 0.0;  // flow units per module
};

struct Commodity {
  std::string id;
  VertexIndex source = 0;
  VertexIndex target = 0;
  double demand = 0.0;
};

struct BaseNetwork {
  std::string name;
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
  std::vector<Commodity> commodities;

  std::optional<VertexIndex> find_vertex(std::string_view id) const;
};

struct Instance {
  BaseNetwork base;
  std::size_t periods = 1;
  double phi = 1.0;                         // module size
  std::vector<std::vector<double>> demand;  // [c][t], nominal
  std::vector<std::vector<double>> cost;    // [e][t], per module
  std::vector<std::vector<Path>> paths;     // [c][p]

  std::size_t num_edges() const { return base.edges.size(); }
  std::size_t num_commodities() const { return base.commodities.size(); }
  std::size_t num_paths(CommodityIndex c) const { return paths[c].size(); }
  std::size_t max_paths() const;

  // Sum of cost[e][t] over the edges of path p of commodity c.
  double path_cost(CommodityIndex c, std::size_t p, PeriodIndex t) const;
  bool path_uses(CommodityIndex c, std::size_t p, EdgeIndex e) const;
};

enum class PathWeight { kModuleCost, kHops };

struct GrowthConfig {
  std::size_t periods = 1;
  double demand_growth = 1.0;  // g_d >= 1, per period
  double cost_discount = 1.0;  // g_gamma in (0, 1], per period
  std::size_t paths_per_commodity = 5;
  double jitter = 0.0;  // relative jitter on the demand growth increment, [0, 1)
  std::uint64_t seed = 1;
  PathWeight weight = PathWeight::kModuleCost;
  std::optional<double> phi;  // overrides the first link's module capacity

  // Throws ValidationError on an illegal configuration.
  void check() const;
};

// Reads SNDlib native text (NODES, LINKS, DEMANDS; other sections skipped).
// Throws ParseError with a line number, or ValidationError for zero demands.
BaseNetwork parse_sndlib(std::istream& in);
BaseNetwork parse_sndlib(std::string_view text);

Instance expand_multiperiod(const BaseNetwork& base, const GrowthConfig& cfg);

std::vector<double> edge_weights(const BaseNetwork& base, PathWeight weight);

// Up to k loopless shortest paths per commodity, sorted by total weight with
// ties broken by the lexicographic edge-index sequence.
std::vector<std::vector<Path>> enumerate_paths(const BaseNetwork& base, std::size_t k,
                                               std::span<const double> weight);

// One message per broken invariant; empty iff the instance is well formed.
std::vector<std::string> validate(const Instance& instance);

Instance read_instance(std::istream& in);
Instance read_instance(std::string_view text);
void write_instance(std::ostream& out, const Instance& instance);
std::string write_instance(const Instance& instance);

// Reads either format, sniffing for the SNDlib NODES section.
bool looks_like_sndlib(std::string_view text);

}  // namespace mpnd
