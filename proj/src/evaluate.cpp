#include "mpnd/evaluate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mpnd/errors.hpp"

namespace mpnd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense min-cost flow for the member-to-band transportation problem. Node 0
// is the source, 1..n the members, n+1..n+K the bands, n+K+1 the sink.
class Transport {
 public:
  explicit Transport(std::size_t nodes) : head_(nodes, -1) {}

  void add(std::size_t u, std::size_t v, int cap, double cost) {
    arcs_.push_back({v, head_[u], cap, cost});
    head_[u] = static_cast<int>(arcs_.size()) - 1;
    arcs_.push_back({u, head_[v], 0, -cost});
    head_[v] = static_cast<int>(arcs_.size()) - 1;
  }

  // Sends `amount` units from `s` to `t`; all initial costs must be >= 0.
  void run(std::size_t s, std::size_t t, int amount) {
    const std::size_t n = head_.size();
    std::vector<double> potential(n, 0.0);
    std::vector<double> dist(n);
    std::vector<int> via(n);
    std::vector<char> done(n);
    for (int sent = 0; sent < amount; ++sent) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(via.begin(), via.end(), -1);
      std::fill(done.begin(), done.end(), 0);
      dist[s] = 0.0;
      for (;;) {
        std::size_t u = n;
        for (std::size_t v = 0; v < n; ++v) {
          if (!done[v] && dist[v] < kInf && (u == n || dist[v] < dist[u])) u = v;
        }
        if (u == n) break;
        done[u] = 1;
        for (int a = head_[u]; a != -1; a = arcs_[a].next) {
          const Arc& arc = arcs_[a];
          if (arc.cap <= 0 || done[arc.to]) continue;
          const double nd = dist[u] + arc.cost + potential[u] - potential[arc.to];
          if (nd < dist[arc.to]) {
            dist[arc.to] = nd;
            via[arc.to] = a;
          }
        }
      }
      if (dist[t] == kInf) throw std::logic_error("transportation problem infeasible");
      for (std::size_t v = 0; v < n; ++v) {
        if (dist[v] < kInf) potential[v] += dist[v];
      }
      for (std::size_t v = t; v != s;) {
        const int a = via[v];
        arcs_[a].cap -= 1;
        arcs_[a ^ 1].cap += 1;
        v = arcs_[a ^ 1].to;
      }
    }
  }

  // Band node index receiving flow from member node u, or -1.
  int flow_target(std::size_t u, std::size_t first_band) const {
    for (int a = head_[u]; a != -1; a = arcs_[a].next) {
      if ((a & 1) == 0 && arcs_[a].to >= first_band && arcs_[a].cap == 0) {
        return static_cast<int>(arcs_[a].to);
      }
    }
    return -1;
  }

 private:
  struct Arc {
    std::size_t to;
    int next;
    int cap;
    double cost;
  };
  std::vector<int> head_;
  std::vector<Arc> arcs_;
};

// Rearrangement: the members sorted by nominal demand (descending) take the
// band slots sorted by deviation fraction (descending).
double dev_sorted(const MultibandSet& mb, PeriodIndex t, std::span<const CommodityIndex> sorted,
                  const Profile& theta, std::vector<int>* band) {
  double value = 0.0;
  std::size_t i = 0;
  for (int k = mb.bands.k_plus; k >= mb.bands.k_minus; --k) {
    for (std::size_t n = theta.at(k); n > 0; --n, ++i) {
      if (k != 0) value += mb.bands.at(sorted[i], t, k);
      if (band) (*band)[i] = k;
    }
  }
  return value;
}

std::vector<CommodityIndex> by_demand(const MultibandSet& mb, PeriodIndex t,
                                      std::span<const CommodityIndex> members) {
  std::vector<CommodityIndex> out(members.begin(), members.end());
  // Under proportional deviations the largest-fraction band orders members
  // exactly like nominal demand; band 0 is all-zero so use the outermost one.
  const int k = mb.bands.k_plus != 0 ? mb.bands.k_plus : mb.bands.k_minus;
  const double sign = k > 0 ? 1.0 : -1.0;
  std::stable_sort(out.begin(), out.end(), [&](CommodityIndex a, CommodityIndex b) {
    const double da = sign * mb.bands.at(a, t, k);
    const double db = sign * mb.bands.at(b, t, k);
    if (da != db) return da > db;
    return a < b;
  });
  return out;
}

}  // namespace

std::size_t RoutingState::count_assigned() const {
  return static_cast<std::size_t>(
      std::count_if(choice_.begin(), choice_.end(), [](int p) { return p != kUnassigned; }));
}

RoutingState RoutingState::uniform(const Instance& instance, int p) {
  RoutingState r(instance.num_commodities(), instance.periods);
  for (CommodityIndex c = 0; c < instance.num_commodities(); ++c) {
    for (PeriodIndex t = 0; t < instance.periods; ++t) r.assign(c, t, p);
  }
  return r;
}

void check_routing(const Instance& instance, const RoutingState& routing) {
  if (routing.commodities() != instance.num_commodities() ||
      routing.periods() != instance.periods) {
    throw ValidationError("routing shape does not match the instance");
  }
  for (CommodityIndex c = 0; c < routing.commodities(); ++c) {
    for (PeriodIndex t = 0; t < routing.periods(); ++t) {
      const int p = routing.at(c, t);
      if (p != RoutingState::kUnassigned &&
          (p < 0 || static_cast<std::size_t>(p) >= instance.num_paths(c))) {
        throw ValidationError(fmt::format("routing: path index {} out of range for '{}', t={}", p,
                                          instance.base.commodities[c].id, t + 1));
      }
    }
  }
}

DevResult dev_exact(const MultibandSet& mb, PeriodIndex t, std::span<const CommodityIndex> members) {
  DevResult out;
  out.members.assign(members.begin(), members.end());
  const std::size_t n = members.size();
  out.band.assign(n, 0);
  if (n == 0) return out;
  const Profile theta = profile(mb.rule, n);
  const std::size_t bands = mb.bands.num_bands();
  double top = 0.0;
  for (CommodityIndex c : members) {
    for (int k = mb.bands.k_minus; k <= mb.bands.k_plus; ++k) {
      top = std::max(top, mb.bands.at(c, t, k));
    }
  }
  const std::size_t first_band = n + 1;
  const std::size_t sink = n + bands + 1;
  Transport flow(sink + 1);
  // Arcs are prepended, so add in reverse to scan them in natural order.
  for (std::size_t i = n; i-- > 0;) flow.add(0, 1 + i, 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = mb.bands.k_plus; k >= mb.bands.k_minus; --k) {
      if (theta.at(k) == 0) continue;
      flow.add(1 + i, first_band + mb.rule.slot(k), 1, top - mb.bands.at(members[i], t, k));
    }
  }
  for (int k = mb.bands.k_minus; k <= mb.bands.k_plus; ++k) {
    if (theta.at(k) > 0) {
      flow.add(first_band + mb.rule.slot(k), sink, static_cast<int>(theta.at(k)), 0.0);
    }
  }
  flow.run(0, sink, static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const int node = flow.flow_target(1 + i, first_band);
    const int k = static_cast<int>(node - static_cast<int>(first_band)) + mb.bands.k_minus;
    out.band[i] = k;
    if (k != 0) out.value += mb.bands.at(members[i], t, k);
  }
  return out;
}

DevResult dev_for(const MultibandSet& mb, PeriodIndex t, std::span<const CommodityIndex> members) {
  if (!mb.bands.proportional) return dev_exact(mb, t, members);
  DevResult out;
  out.members.assign(members.begin(), members.end());
  out.band.assign(members.size(), 0);
  if (members.empty() || mb.bands.num_bands() == 1) return out;
  const auto sorted = by_demand(mb, t, members);
  const Profile theta = profile(mb.rule, members.size());
  std::vector<int> sorted_band(members.size(), 0);
  out.value = dev_sorted(mb, t, sorted, theta, &sorted_band);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto pos = std::find(sorted.begin(), sorted.end(), members[i]) - sorted.begin();
    out.band[i] = sorted_band[static_cast<std::size_t>(pos)];
  }
  return out;
}

std::vector<CommodityIndex> crossing(const Instance& instance, const RoutingState& routing,
                                     EdgeIndex e, PeriodIndex t) {
  std::vector<CommodityIndex> out;
  for (CommodityIndex c = 0; c < instance.num_commodities(); ++c) {
    const int p = routing.at(c, t);
    if (p != RoutingState::kUnassigned && instance.path_uses(c, static_cast<std::size_t>(p), e)) {
      out.push_back(c);
    }
  }
  return out;
}

DevResult dev(const Instance& instance, EdgeIndex e, PeriodIndex t, const RoutingState& routing,
              const MultibandSet& mb) {
  const auto members = crossing(instance, routing, e, t);
  return dev_for(mb, t, members);
}

double worst_load(const Instance& instance, EdgeIndex e, PeriodIndex t,
                  const RoutingState& routing, const MultibandSet& mb) {
  const auto members = crossing(instance, routing, e, t);
  double load = 0.0;
  for (CommodityIndex c : members) load += instance.demand[c][t];
  load += dev_for(mb, t, members).value;
  return std::max(0.0, load);
}

std::int64_t modules_needed(double load, double phi) {
  if (!(load > 0.0)) return 0;
  const double q = load / phi;
  const double r = std::nearbyint(q);
  if (std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(q))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(q));
}

std::vector<std::int64_t> delayed_install(std::span<const std::int64_t> required) {
  std::vector<std::int64_t> y(required.size(), 0);
  std::int64_t level = 0;
  for (std::size_t t = 0; t < required.size(); ++t) {
    if (required[t] > level) {
      y[t] = required[t] - level;
      level = required[t];
    }
  }
  return y;
}

LoadEvaluator::LoadEvaluator(const Instance& instance, const MultibandSet& mb)
    : inst_(instance), mb_(mb) {
  order_.resize(instance.periods);
  members_.resize(instance.periods);
  for (PeriodIndex t = 0; t < instance.periods; ++t) {
    if (mb.bands.proportional && mb.bands.num_bands() > 1) {
      std::vector<CommodityIndex> all(instance.num_commodities());
      std::iota(all.begin(), all.end(), 0);
      order_[t] = by_demand(mb, t, all);
    } else {
      order_[t].resize(instance.num_commodities());
      std::iota(order_[t].begin(), order_[t].end(), 0);
    }
    members_[t].resize(instance.num_edges());
  }
  loads_.assign(instance.num_edges(), std::vector<double>(instance.periods, 0.0));
  required_.resize(instance.periods);
}

const std::vector<std::vector<double>>& LoadEvaluator::loads(const RoutingState& routing) {
  const bool fast = mb_.bands.proportional && mb_.bands.num_bands() > 1;
  for (PeriodIndex t = 0; t < inst_.periods; ++t) {
    auto& members = members_[t];
    for (auto& m : members) m.clear();
    for (CommodityIndex c : order_[t]) {
      const int p = routing.at(c, t);
      if (p == RoutingState::kUnassigned) continue;
      for (EdgeIndex e : inst_.paths[c][static_cast<std::size_t>(p)]) members[e].push_back(c);
    }
    for (EdgeIndex e = 0; e < inst_.num_edges(); ++e) {
      const auto& m = members[e];
      double load = 0.0;
      for (CommodityIndex c : m) load += inst_.demand[c][t];
      if (!m.empty() && mb_.bands.num_bands() > 1) {
        if (fast) {
          load += dev_sorted(mb_, t, m, profile(mb_.rule, m.size()), nullptr);
        } else {
          load += dev_exact(mb_, t, m).value;
        }
      }
      loads_[e][t] = std::max(0.0, load);
    }
  }
  return loads_;
}

Solution LoadEvaluator::install(const RoutingState& routing) {
  Solution s;
  s.routing = routing;
  loads(routing);
  s.installs.resize(inst_.num_edges());
  for (EdgeIndex e = 0; e < inst_.num_edges(); ++e) {
    for (PeriodIndex t = 0; t < inst_.periods; ++t) {
      required_[t] = modules_needed(loads_[e][t], inst_.phi);
    }
    s.installs[e] = delayed_install(required_);
  }
  s.cost = solution_cost(inst_, s);
  return s;
}

double LoadEvaluator::cost(const RoutingState& routing) {
  loads(routing);
  double total = 0.0;
  for (EdgeIndex e = 0; e < inst_.num_edges(); ++e) {
    std::int64_t level = 0;
    for (PeriodIndex t = 0; t < inst_.periods; ++t) {
      const std::int64_t r = modules_needed(loads_[e][t], inst_.phi);
      if (r > level) {
        total += inst_.cost[e][t] * static_cast<double>(r - level);
        level = r;
      }
    }
  }
  return total;
}

Solution install_capacities(const RoutingState& routing, const Instance& instance,
                            const MultibandSet& mb) {
  check_routing(instance, routing);
  if (!routing.complete()) throw ValidationError("install_capacities: routing is incomplete");
  LoadEvaluator eval(instance, mb);
  return eval.install(routing);
}

double solution_cost(const Instance& instance, const Solution& s) {
  double total = 0.0;
  for (EdgeIndex e = 0; e < s.installs.size(); ++e) {
    for (PeriodIndex t = 0; t < s.installs[e].size(); ++t) {
      if (s.installs[e][t] != 0) total += instance.cost[e][t] * static_cast<double>(s.installs[e][t]);
    }
  }
  return total;
}

Solution sp_baseline(const Instance& instance, const MultibandSet& mb) {
  return install_capacities(RoutingState::uniform(instance, 0), instance, mb);
}

Feasibility check_feasible(const Solution& s, const Instance& instance, const MultibandSet& mb) {
  Feasibility out;
  auto fail = [&](std::string msg) {
    out.ok = false;
    out.violations.push_back(std::move(msg));
  };
  const RoutingState& r = s.routing;
  if (r.commodities() != instance.num_commodities() || r.periods() != instance.periods) {
    fail("routing shape does not match the instance");
    return out;
  }
  for (CommodityIndex c = 0; c < r.commodities(); ++c) {
    for (PeriodIndex t = 0; t < r.periods(); ++t) {
      const int p = r.at(c, t);
      if (p == RoutingState::kUnassigned) {
        fail(fmt::format("unassigned: {}, t={}", instance.base.commodities[c].id, t + 1));
      } else if (p < 0 || static_cast<std::size_t>(p) >= instance.num_paths(c)) {
        fail(fmt::format("path out of range: {}, t={}", instance.base.commodities[c].id, t + 1));
      }
    }
  }
  if (s.installs.size() != instance.num_edges()) {
    fail("install table size does not match the instance");
    return out;
  }
  if (!out.ok) return out;
  LoadEvaluator eval(instance, mb);
  const auto& loads = eval.loads(r);
  for (EdgeIndex e = 0; e < instance.num_edges(); ++e) {
    if (s.installs[e].size() != instance.periods) {
      fail(fmt::format("install row length: {}", instance.base.edges[e].id));
      continue;
    }
    std::int64_t cumulative = 0;
    for (PeriodIndex t = 0; t < instance.periods; ++t) {
      if (s.installs[e][t] < 0) {
        fail(fmt::format("negative install: {}, t={}", instance.base.edges[e].id, t + 1));
      }
      cumulative += s.installs[e][t];
      if (cumulative < modules_needed(loads[e][t], instance.phi)) {
        fail(fmt::format("capacity short: {}, t={}", instance.base.edges[e].id, t + 1));
      }
    }
  }
  const double cost = solution_cost(instance, s);
  if (std::abs(cost - s.cost) > 1e-9 * std::max(1.0, std::abs(cost))) {
    fail(fmt::format("cost field {} differs from installed cost {}", s.cost, cost));
  }
  return out;
}

std::vector<CommodityIndex> construction_order(const Instance& instance, PeriodIndex t) {
  std::vector<CommodityIndex> order(instance.num_commodities());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](CommodityIndex a, CommodityIndex b) {
    return instance.demand[a][t] > instance.demand[b][t];
  });
  return order;
}

std::vector<std::pair<CommodityIndex, PeriodIndex>> construction_sequence(const Instance& instance) {
  std::vector<std::pair<CommodityIndex, PeriodIndex>> out;
  out.reserve(instance.num_commodities() * instance.periods);
  for (PeriodIndex t = 0; t < instance.periods; ++t) {
    for (CommodityIndex c : construction_order(instance, t)) out.emplace_back(c, t);
  }
  return out;
}

}  // namespace mpnd
