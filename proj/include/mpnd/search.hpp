#pragma once

// Neighborhood search around an incumbent: RINS-style variable fixing, an
// exact depth-first branch-and-bound over the routing space, exhaustive
// enumeration for ground truth, and the colony + RINS pipeline.

#include <cstdint>
#include <optional>
#include <vector>

#include "mpnd/ants.hpp"
#include "mpnd/evaluate.hpp"
#include "mpnd/instance.hpp"
#include "mpnd/relaxation.hpp"
#include "mpnd/uncertainty.hpp"

namespace mpnd {

// Path variables x[c][p][t] fixed to 0, and (c, t) fixed to one path.
class FixingSet {
 public:
  FixingSet() = default;
  explicit FixingSet(const Instance& instance);  // nothing fixed

  bool zero(CommodityIndex c, std::size_t p, PeriodIndex t) const {
    return zero_[offset_[c] + p * periods_ + t] != 0;
  }
  std::optional<std::size_t> one(CommodityIndex c, PeriodIndex t) const;

  void set_zero(CommodityIndex c, std::size_t p, PeriodIndex t, bool value = true);
  // Records x[c][p][t] = 1 without touching the other paths.
  void set_one(CommodityIndex c, PeriodIndex t, std::size_t p);
  // set_one plus every other path of (c, t) fixed to zero.
  void fix_one(CommodityIndex c, PeriodIndex t, std::size_t p);

  // Paths of (c, t) not fixed to zero (the fixed-one path alone if any).
  std::vector<std::size_t> allowed(CommodityIndex c, PeriodIndex t) const;

  std::size_t count_zero() const;
  std::size_t count_one() const;
  // (c, t) pairs with more than one allowed path.
  std::size_t count_free() const;

  // Throws ValidationError if a fixed-one path is also fixed to zero, a
  // fixed-one pair has another path not fixed to zero, or a pair has no
  // allowed path.
  void check(const Instance& instance) const;

  // True when every (c, t) of `routing` uses an allowed path.
  bool admits(const RoutingState& routing) const;

 private:
  std::size_t commodities_ = 0;
  std::size_t periods_ = 0;
  std::vector<std::size_t> offset_;
  std::vector<std::size_t> paths_;
  std::vector<char> zero_;
  std::vector<int> one_;  // [c * periods + t], -1 when not fixed
};

// x_bar = 0 and x_lr <= eps fixes 0; x_bar = 1 and x_lr >= 1 - eps fixes 1.
// x_lr is the 0/1 path choice of the closed-form LP.
FixingSet rins_fix(const Instance& instance, const RoutingState& incumbent, const LpSolution& lp,
                   double epsilon);

// Lower bound on every completion of `partial` that respects `fixing`:
// max of the delayed-install cost of loads already certain (assigned flows
// plus unassigned flows whose every allowed path crosses the edge) and the
// cost-drop bound over cumulative nominal loads. Returns 0 when some negative
// band has forced deviations, since worst loads then need not grow with the
// routing.
double node_lower_bound(const Instance& instance, const MultibandSet& mb, const FixingSet& fixing,
                        const RoutingState& partial);

enum class SearchStatus { kOptimal, kTimeLimit };

struct BnbOptions {
  std::optional<double> time_limit;  // seconds
  std::optional<RoutingState> incumbent;
};

struct BnbResult {
  std::optional<Solution> best;
  double bound = 0.0;  // proved lower bound on the restricted optimum
  SearchStatus status = SearchStatus::kOptimal;
  std::uint64_t nodes = 0;
  std::uint64_t leaves = 0;
};

// Depth-first over free (c, t) in construction order, children in path
// order. Throws ValidationError on an inconsistent fixing or an incumbent the
// fixing excludes.
BnbResult branch_and_bound(const Instance& instance, const MultibandSet& mb,
                           const FixingSet& fixing, const BnbOptions& options = {});

struct OracleOptions {
  std::uint64_t cap = 10'000'000;
  int workers = 1;
};

struct OracleResult {
  Solution best;
  std::uint64_t evaluated = 0;
};

// Number of complete routings, saturating at UINT64_MAX.
std::uint64_t routing_space_size(const Instance& instance);

// Every complete routing in lexicographic order; the first minimum wins.
// Throws LimitError above the cap.
OracleResult oracle_enumerate_serial(const Instance& instance, const MultibandSet& mb,
                                     const OracleOptions& options = {});
OracleResult oracle_enumerate_parallel(const Instance& instance, const MultibandSet& mb,
                                       const OracleOptions& options = {});
OracleResult oracle_enumerate(const Instance& instance, const MultibandSet& mb,
                              const OracleOptions& options = {});

struct HybridConfig {
  ColonyConfig colony;
  double epsilon = 0.1;
  double rins_time = 10.0;            // seconds for the exact search
  // Colony gets total_time - min(rins_time, total_time / 2).
  std::optional<double> total_time;
};

struct HybridReport {
  ColonyResult colony;
  Solution best;
  double c_aco = 0.0;
  double c_aco_rins = 0.0;
  double c_sp = 0.0;
  double lb = 0.0;
  SearchStatus rins_status = SearchStatus::kOptimal;
  std::size_t free_pairs = 0;
  double colony_seconds = 0.0;
  double rins_seconds = 0.0;
  double total_seconds = 0.0;
};

HybridReport solve_hybrid(const Instance& instance, const MultibandSet& mb, const HybridConfig& cfg);

}  // namespace mpnd
