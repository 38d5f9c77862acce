#pragma once

// Fixed-routing evaluation: worst-case deviation per capacity constraint,
// worst-case loads, the cheapest integral capacity schedule, feasibility, and
// the shortest-path baseline.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpnd/instance.hpp"
#include "mpnd/uncertainty.hpp"

namespace mpnd {

// One path index per (commodity, period), or kUnassigned.
class RoutingState {
 public:
  static constexpr int kUnassigned = -1;

  RoutingState() = default;
  RoutingState(std::size_t commodities, std::size_t periods)
      : commodities_(commodities), periods_(periods), choice_(commodities * periods, kUnassigned) {}

  // Every (c, t) on path `p` in every period.
  static RoutingState uniform(const Instance& instance, int p);

  std::size_t commodities() const { return commodities_; }
  std::size_t periods() const { return periods_; }

  int at(CommodityIndex c, PeriodIndex t) const { return choice_[c * periods_ + t]; }
  bool assigned(CommodityIndex c, PeriodIndex t) const { return at(c, t) != kUnassigned; }
  void assign(CommodityIndex c, PeriodIndex t, int p) { choice_[c * periods_ + t] = p; }
  void clear(CommodityIndex c, PeriodIndex t) { choice_[c * periods_ + t] = kUnassigned; }

  std::size_t count_assigned() const;
  bool complete() const { return count_assigned() == choice_.size(); }

  // Flat (c-major) view, used for lexicographic comparison.
  const std::vector<int>& raw() const { return choice_; }

  bool operator==(const RoutingState&) const = default;

 private:
  std::size_t commodities_ = 0;
  std::size_t periods_ = 0;
  std::vector<int> choice_;
};

// Throws ValidationError when `routing` has the wrong shape or a path index
// out of range for its commodity.
void check_routing(const Instance& instance, const RoutingState& routing);

struct Solution {
  RoutingState routing;
  std::vector<std::vector<std::int64_t>> installs;  // y[e][t], modules
  double cost = 0.0;
};

struct DevResult {
  double value = 0.0;
  std::vector<CommodityIndex> members;  // J, in the order given
  std::vector<int> band;                // band of members[i]
};

// Worst-case deviation of the members' demands at period t with exactly
// profile(rule, |members|) coefficients per band. Uses a rearrangement
// argument when deviations are proportional to demand, otherwise dev_exact.
DevResult dev_for(const MultibandSet& mb, PeriodIndex t, std::span<const CommodityIndex> members);

// Reference solver: transportation problem (members to bands) by successive
// shortest paths. Ties resolve to the lowest member position.
DevResult dev_exact(const MultibandSet& mb, PeriodIndex t, std::span<const CommodityIndex> members);

// Commodities whose path at t uses e. Unassigned (c, t) are skipped.
std::vector<CommodityIndex> crossing(const Instance& instance, const RoutingState& routing,
                                     EdgeIndex e, PeriodIndex t);

DevResult dev(const Instance& instance, EdgeIndex e, PeriodIndex t, const RoutingState& routing,
              const MultibandSet& mb);

// Nominal demand of the crossing commodities plus DEV, floored at 0.
double worst_load(const Instance& instance, EdgeIndex e, PeriodIndex t,
                  const RoutingState& routing, const MultibandSet& mb);

// ceil(load / phi), snapping quotients within 1e-9 (relative) of an integer.
std::int64_t modules_needed(double load, double phi);

// Delayed installation over periods: running maximum of the requirement,
// installing only the increase. Optimal when costs do not increase over time.
std::vector<std::int64_t> delayed_install(std::span<const std::int64_t> required);

// Reusable worst-load and installation evaluator; one per thread.
class LoadEvaluator {
 public:
  LoadEvaluator(const Instance& instance, const MultibandSet& mb);

  // Worst-case loads [e][t] of a complete routing.
  const std::vector<std::vector<double>>& loads(const RoutingState& routing);

  Solution install(const RoutingState& routing);
  double cost(const RoutingState& routing);

 private:
  const Instance& inst_;
  const MultibandSet& mb_;
  std::vector<std::vector<CommodityIndex>> order_;           // [t], by demand desc
  std::vector<std::vector<std::vector<CommodityIndex>>> members_;  // [t][e]
  std::vector<std::vector<double>> loads_;
  std::vector<std::int64_t> required_;
};

Solution install_capacities(const RoutingState& routing, const Instance& instance,
                            const MultibandSet& mb);

double solution_cost(const Instance& instance, const Solution& s);

// Every (c, t) on P[c][0].
Solution sp_baseline(const Instance& instance, const MultibandSet& mb);

struct Feasibility {
  bool ok = true;
  std::vector<std::string> violations;
};

Feasibility check_feasible(const Solution& s, const Instance& instance, const MultibandSet& mb);

// Commodities at period t in construction order: nominal demand descending,
// ties by index.
std::vector<CommodityIndex> construction_order(const Instance& instance, PeriodIndex t);

// All (c, t) pairs in construction order: periods ascending, then
// construction_order within the period.
std::vector<std::pair<CommodityIndex, PeriodIndex>> construction_sequence(const Instance& instance);

}  // namespace mpnd
