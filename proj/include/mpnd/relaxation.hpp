#pragma once

// Closed forms for the nominal LP relaxation (continuous capacity, fractional
// path choice): per-commodity single-path optimum, a bound that stays valid
// for any cost trajectory, and the value of the feasible LP point that
// completes a partial routing.

#include <vector>

#include "mpnd/evaluate.hpp"
#include "mpnd/instance.hpp"

namespace mpnd {

struct LpSolution {
  // Sum over commodities of the cheapest single-path fractional cost.
  double value = 0.0;
  // Valid lower bound on every integral (and robust) solution:
  // sum_{c,t} d[c][t] * min_p sum_{e in p} (g[e][t] - g[e][t+1]) / phi.
  // Equals `value` when the cheapest path is the same in every period.
  double lower_bound = 0.0;
  std::vector<int> best_path;       // p*[c]
  RoutingState routing;             // p*[c] in every period
  std::vector<std::vector<double>> capacity;  // fractional installs [e][t]
};

// Fractional cost of keeping commodity c on path p in every period:
// sum_t (d[c][t] - d[c][t-1]) * sum_{e in p} g[e][t] / phi.
double single_path_cost(const Instance& instance, CommodityIndex c, std::size_t p);

// p*[c] minimizes single_path_cost; ties go to the lexicographically smaller
// edge sequence. Throws ValidationError when a commodity has no path.
LpSolution nominal_lp_optimum(const Instance& instance);

// Cheapest continuous capacity schedule for a complete routing: cumulative
// capacity tracks the running maximum of nominal load / phi.
double fractional_cost(const Instance& instance, const RoutingState& routing);

// Completes `partial` with p* and prices it with fractional_cost. `partial`
// must be a prefix of construction_sequence(); otherwise ValidationError.
double fixed_prefix_lp_value(const Instance& instance, const LpSolution& lp,
                             const RoutingState& partial);
double fixed_prefix_lp_value(const Instance& instance, const RoutingState& partial);

// Incremental fixed_prefix_lp_value along the construction sequence. Holds
// the nominal loads of the current completion and prices candidate moves by
// touching only edges on which the candidate and p* differ.
class PrefixEvaluator {
 public:
  PrefixEvaluator(const Instance& instance, const LpSolution& lp);

  void reset();
  double value() const { return total_; }

  // Value after moving (c, t) from p* to path p, without committing.
  double try_move(CommodityIndex c, PeriodIndex t, std::size_t p);
  // Commits (c, t) to p; (c, t) must still be on p*.
  void commit(CommodityIndex c, PeriodIndex t, std::size_t p);

 private:
  void diff(CommodityIndex c, std::size_t p);

  const Instance& inst_;
  const LpSolution& lp_;
  std::vector<std::vector<double>> base_load_;
  std::vector<double> base_edge_cost_;
  std::vector<std::vector<double>> load_;  // [e][t]
  std::vector<double> edge_cost_;
  std::vector<char> mark_;
  std::vector<EdgeIndex> leaving_;
  std::vector<EdgeIndex> entering_;
  std::vector<double> scratch_;
  double base_total_ = 0.0;
  double total_ = 0.0;
};

}  // namespace mpnd
