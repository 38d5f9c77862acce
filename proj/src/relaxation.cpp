#include "mpnd/relaxation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>

#include "mpnd/errors.hpp"

namespace mpnd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Continuous capacity cost of one edge's load trajectory.
double trajectory_cost(const std::vector<double>& load, const std::vector<double>& cost,
                       double phi) {
  double level = 0.0;
  double total = 0.0;
  for (std::size_t t = 0; t < load.size(); ++t) {
    const double need = load[t] / phi;
    if (need > level) {
      total += cost[t] * (need - level);
      level = need;
    }
  }
  return total;
}

std::vector<std::vector<double>> nominal_loads(const Instance& inst, const RoutingState& routing) {
  std::vector<std::vector<double>> load(inst.num_edges(), std::vector<double>(inst.periods, 0.0));
  for (CommodityIndex c = 0; c < inst.num_commodities(); ++c) {
    for (PeriodIndex t = 0; t < inst.periods; ++t) {
      const int p = routing.at(c, t);
      if (p == RoutingState::kUnassigned) continue;
      for (EdgeIndex e : inst.paths[c][static_cast<std::size_t>(p)]) load[e][t] += inst.demand[c][t];
    }
  }
  return load;
}

void check_prefix(const Instance& inst, const RoutingState& partial) {
  check_routing(inst, partial);
  bool open = false;
  for (const auto& [c, t] : construction_sequence(inst)) {
    if (!partial.assigned(c, t)) {
      open = true;
    } else if (open) {
      throw ValidationError(fmt::format(
          "partial routing is not a construction prefix: '{}' at t={} assigned after a gap",
          inst.base.commodities[c].id, t + 1));
    }
  }
}

}  // namespace

double single_path_cost(const Instance& instance, CommodityIndex c, std::size_t p) {
  double total = 0.0;
  double previous = 0.0;
  for (PeriodIndex t = 0; t < instance.periods; ++t) {
    const double increment = instance.demand[c][t] - previous;
    previous = instance.demand[c][t];
    if (increment != 0.0) total += increment * instance.path_cost(c, p, t);
  }
  return total / instance.phi;
}

LpSolution nominal_lp_optimum(const Instance& instance) {
  LpSolution lp;
  const std::size_t nc = instance.num_commodities();
  const std::size_t periods = instance.periods;
  lp.best_path.assign(nc, 0);
  lp.routing = RoutingState(nc, periods);
  for (CommodityIndex c = 0; c < nc; ++c) {
    const auto& paths = instance.paths[c];
    if (paths.empty()) {
      throw ValidationError(
          fmt::format("commodity '{}' has no admissible path", instance.base.commodities[c].id));
    }
    std::size_t best = 0;
    double best_cost = single_path_cost(instance, c, 0);
    for (std::size_t p = 1; p < paths.size(); ++p) {
      const double v = single_path_cost(instance, c, p);
      if (v < best_cost || (v == best_cost && paths[p] < paths[best])) {
        best = p;
        best_cost = v;
      }
    }
    lp.best_path[c] = static_cast<int>(best);
    lp.value += best_cost;
    for (PeriodIndex t = 0; t < periods; ++t) lp.routing.assign(c, t, static_cast<int>(best));

    // Cumulative capacity Y^t >= L^t / phi turns sum_t g^t y^t into
    // sum_t (g^t - g^{t+1}) Y^t with g^{T+1} = 0, and every coefficient is
    // non-negative when costs do not increase.
    for (PeriodIndex t = 0; t < periods; ++t) {
      double cheapest = kInf;
      for (const Path& path : paths) {
        double drop = 0.0;
        for (EdgeIndex e : path) {
          drop += instance.cost[e][t] - (t + 1 < periods ? instance.cost[e][t + 1] : 0.0);
        }
        cheapest = std::min(cheapest, drop);
      }
      lp.lower_bound += instance.demand[c][t] * cheapest / instance.phi;
    }
  }
  const auto load = nominal_loads(instance, lp.routing);
  lp.capacity.assign(instance.num_edges(), std::vector<double>(periods, 0.0));
  for (EdgeIndex e = 0; e < instance.num_edges(); ++e) {
    double previous = 0.0;
    for (PeriodIndex t = 0; t < periods; ++t) {
      lp.capacity[e][t] = (load[e][t] - previous) / instance.phi;
      previous = load[e][t];
    }
  }
  return lp;
}

double fractional_cost(const Instance& instance, const RoutingState& routing) {
  const auto load = nominal_loads(instance, routing);
  double total = 0.0;
  for (EdgeIndex e = 0; e < instance.num_edges(); ++e) {
    total += trajectory_cost(load[e], instance.cost[e], instance.phi);
  }
  return total;
}

double fixed_prefix_lp_value(const Instance& instance, const LpSolution& lp,
                             const RoutingState& partial) {
  check_prefix(instance, partial);
  RoutingState full = partial;
  for (CommodityIndex c = 0; c < instance.num_commodities(); ++c) {
    for (PeriodIndex t = 0; t < instance.periods; ++t) {
      if (!full.assigned(c, t)) full.assign(c, t, lp.best_path[c]);
    }
  }
  return fractional_cost(instance, full);
}

double fixed_prefix_lp_value(const Instance& instance, const RoutingState& partial) {
  return fixed_prefix_lp_value(instance, nominal_lp_optimum(instance), partial);
}

PrefixEvaluator::PrefixEvaluator(const Instance& instance, const LpSolution& lp)
    : inst_(instance), lp_(lp) {
  base_load_ = nominal_loads(instance, lp.routing);
  base_edge_cost_.resize(instance.num_edges());
  base_total_ = 0.0;
  for (EdgeIndex e = 0; e < instance.num_edges(); ++e) {
    base_edge_cost_[e] = trajectory_cost(base_load_[e], instance.cost[e], instance.phi);
    base_total_ += base_edge_cost_[e];
  }
  mark_.assign(instance.num_edges(), 0);
  reset();
}

void PrefixEvaluator::reset() {
  load_ = base_load_;
  edge_cost_ = base_edge_cost_;
  total_ = base_total_;
}

// Splits p* vs p into edges only on p* (leaving_) and only on p (entering_).
void PrefixEvaluator::diff(CommodityIndex c, std::size_t p) {
  const Path& from = inst_.paths[c][static_cast<std::size_t>(lp_.best_path[c])];
  const Path& to = inst_.paths[c][p];
  leaving_.clear();
  entering_.clear();
  for (EdgeIndex e : to) mark_[e] = 1;
  for (EdgeIndex e : from) {
    if (mark_[e]) {
      mark_[e] = 2;
    } else {
      leaving_.push_back(e);
    }
  }
  for (EdgeIndex e : to) {
    if (mark_[e] == 1) entering_.push_back(e);
    mark_[e] = 0;
  }
}

double PrefixEvaluator::try_move(CommodityIndex c, PeriodIndex t, std::size_t p) {
  if (static_cast<int>(p) == lp_.best_path[c]) return total_;
  diff(c, p);
  const double d = inst_.demand[c][t];
  double delta = 0.0;
  auto probe = [&](EdgeIndex e, double change) {
    scratch_ = load_[e];
    scratch_[t] += change;
    delta += trajectory_cost(scratch_, inst_.cost[e], inst_.phi) - edge_cost_[e];
  };
  for (EdgeIndex e : leaving_) probe(e, -d);
  for (EdgeIndex e : entering_) probe(e, d);
  return total_ + delta;
}

void PrefixEvaluator::commit(CommodityIndex c, PeriodIndex t, std::size_t p) {
  if (static_cast<int>(p) == lp_.best_path[c]) return;
  diff(c, p);
  const double d = inst_.demand[c][t];
  auto apply = [&](EdgeIndex e, double change) {
    load_[e][t] += change;
    const double now = trajectory_cost(load_[e], inst_.cost[e], inst_.phi);
    total_ += now - edge_cost_[e];
    edge_cost_[e] = now;
  };
  for (EdgeIndex e : leaving_) apply(e, -d);
  for (EdgeIndex e : entering_) apply(e, d);
}

}  // namespace mpnd
