#include "mpnd/search.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpnd/errors.hpp"

namespace mpnd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::optional<Clock::time_point> deadline_after(std::optional<double> seconds) {
  if (!seconds) return std::nullopt;
  return Clock::now() +
         std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*seconds));
}

// Prune only when the bound clears the incumbent by more than rounding noise.
bool dominated(double bound, double incumbent) {
  return bound - 1e-10 * std::max(1.0, std::abs(bound)) >= incumbent;
}

// Incremental node bound. All (c, t) start unassigned; flows whose every
// allowed path crosses an edge count towards that edge's load from the start.
class Bounder {
 public:
  Bounder(const Instance& instance, const MultibandSet& mb, const FixingSet& fixing)
      : inst_(instance), mb_(mb), enabled_(!mb.rule.forces_negative()) {
    const std::size_t T = instance.periods;
    const std::size_t nc = instance.num_commodities();
    members_.assign(instance.num_edges(), std::vector<std::vector<CommodityIndex>>(T));
    required_.assign(instance.num_edges(), std::vector<std::int64_t>(T, 0));
    edge_cost_.assign(instance.num_edges(), 0.0);
    forced_.resize(nc * T);
    path_drop_.resize(nc);
    contribution_.assign(nc * T, 0.0);
    std::vector<int> hits(instance.num_edges(), 0);
    for (CommodityIndex c = 0; c < nc; ++c) {
      path_drop_[c].assign(instance.num_paths(c), std::vector<double>(T, 0.0));
      for (std::size_t p = 0; p < instance.num_paths(c); ++p) {
        for (PeriodIndex t = 0; t < T; ++t) {
          double drop = 0.0;
          for (EdgeIndex e : instance.paths[c][p]) {
            drop += instance.cost[e][t] - (t + 1 < T ? instance.cost[e][t + 1] : 0.0);
          }
          path_drop_[c][p][t] = instance.demand[c][t] * drop / instance.phi;
        }
      }
      for (PeriodIndex t = 0; t < T; ++t) {
        const auto allowed = fixing.allowed(c, t);
        double best = kInf;
        for (std::size_t p : allowed) {
          best = std::min(best, path_drop_[c][p][t]);
          for (EdgeIndex e : instance.paths[c][p]) ++hits[e];
        }
        contribution_[c * T + t] = best;
        auto& forced = forced_[c * T + t];
        for (std::size_t p : allowed) {
          for (EdgeIndex e : instance.paths[c][p]) {
            if (hits[e] == static_cast<int>(allowed.size())) forced.push_back(e);
            hits[e] = 0;
          }
        }
        std::sort(forced.begin(), forced.end());
        for (EdgeIndex e : forced) members_[e][t].push_back(c);
      }
    }
    for (EdgeIndex e = 0; e < instance.num_edges(); ++e) {
      for (PeriodIndex t = 0; t < T; ++t) refresh_requirement(e, t);
      refresh_edge(e);
    }
  }

  void assign(CommodityIndex c, PeriodIndex t, std::size_t p) {
    const std::size_t T = inst_.periods;
    Undo u{c, t, contribution_[c * T + t], {}};
    const auto& forced = forced_[c * T + t];
    for (EdgeIndex e : inst_.paths[c][p]) {
      if (std::binary_search(forced.begin(), forced.end(), e)) continue;
      members_[e][t].push_back(c);
      u.edges.push_back({e, required_[e][t]});
      refresh_requirement(e, t);
      refresh_edge(e);
    }
    contribution_[c * T + t] = path_drop_[c][p][t];
    undo_.push_back(std::move(u));
  }

  void undo() {
    Undo& u = undo_.back();
    for (auto it = u.edges.rbegin(); it != u.edges.rend(); ++it) {
      members_[it->first][u.t].pop_back();
      required_[it->first][u.t] = it->second;
      refresh_edge(it->first);
    }
    contribution_[u.c * inst_.periods + u.t] = u.contribution;
    undo_.pop_back();
  }

  double bound() const {
    if (!enabled_) return 0.0;
    double certain = 0.0;
    for (double v : edge_cost_) certain += v;
    double drop = 0.0;
    for (double v : contribution_) drop += v;
    return std::max(certain, drop);
  }

 private:
  struct Undo {
    CommodityIndex c;
    PeriodIndex t;
    double contribution;
    std::vector<std::pair<EdgeIndex, std::int64_t>> edges;
  };

  void refresh_requirement(EdgeIndex e, PeriodIndex t) {
    const auto& m = members_[e][t];
    double load = 0.0;
    for (CommodityIndex c : m) load += inst_.demand[c][t];
    if (!m.empty() && mb_.bands.num_bands() > 1) load += dev_for(mb_, t, m).value;
    required_[e][t] = modules_needed(std::max(0.0, load), inst_.phi);
  }

  void refresh_edge(EdgeIndex e) {
    double total = 0.0;
    std::int64_t level = 0;
    for (PeriodIndex t = 0; t < inst_.periods; ++t) {
      const std::int64_t r = required_[e][t];
      if (r > level) {
        total += inst_.cost[e][t] * static_cast<double>(r - level);
        level = r;
      }
    }
    edge_cost_[e] = total;
  }

  const Instance& inst_;
  const MultibandSet& mb_;
  bool enabled_;
  std::vector<std::vector<std::vector<CommodityIndex>>> members_;  // [e][t]
  std::vector<std::vector<std::int64_t>> required_;
  std::vector<double> edge_cost_;
  std::vector<std::vector<EdgeIndex>> forced_;  // [c * T + t], sorted
  std::vector<std::vector<std::vector<double>>> path_drop_;  // [c][p][t]
  std::vector<double> contribution_;
  std::vector<Undo> undo_;
};

class Search {
 public:
  Search(const Instance& instance, const MultibandSet& mb, const FixingSet& fixing,
         std::optional<Clock::time_point> deadline)
      : bounder_(instance, mb, fixing),
        eval_(instance, mb),
        deadline_(deadline),
        routing_(instance.num_commodities(), instance.periods) {
    for (const auto& [c, t] : construction_sequence(instance)) {
      const auto allowed = fixing.allowed(c, t);
      if (allowed.size() == 1) {
        routing_.assign(c, t, static_cast<int>(allowed.front()));
        bounder_.assign(c, t, allowed.front());
      } else {
        free_.push_back({c, t});
        allowed_.push_back(allowed);
      }
    }
  }

  void seed(const RoutingState& incumbent) {
    best_ = incumbent;
    best_value_ = eval_.cost(incumbent);
  }

  double root_bound() const { return bounder_.bound(); }

  // False when the deadline stopped the search.
  bool run() {
    if (best_ && dominated(bounder_.bound(), best_value_)) return true;
    return dfs(0);
  }

  const std::optional<RoutingState>& best() const { return best_; }
  double best_value() const { return best_value_; }
  std::uint64_t nodes() const { return nodes_; }
  std::uint64_t leaves() const { return leaves_; }
  LoadEvaluator& evaluator() { return eval_; }

 private:
  bool dfs(std::size_t depth) {
    ++nodes_;
    if (depth == free_.size()) {
      ++leaves_;
      const double v = eval_.cost(routing_);
      if (!best_ || v < best_value_) {
        best_ = routing_;
        best_value_ = v;
      }
      return true;
    }
    if (deadline_ && Clock::now() >= *deadline_) return false;
    const auto [c, t] = free_[depth];
    for (std::size_t p : allowed_[depth]) {
      routing_.assign(c, t, static_cast<int>(p));
      bounder_.assign(c, t, p);
      bool finished = true;
      if (!best_ || !dominated(bounder_.bound(), best_value_)) finished = dfs(depth + 1);
      bounder_.undo();
      routing_.clear(c, t);
      if (!finished) return false;
    }
    return true;
  }

  Bounder bounder_;
  LoadEvaluator eval_;
  std::optional<Clock::time_point> deadline_;
  RoutingState routing_;
  std::vector<std::pair<CommodityIndex, PeriodIndex>> free_;
  std::vector<std::vector<std::size_t>> allowed_;
  std::optional<RoutingState> best_;
  double best_value_ = kInf;
  std::uint64_t nodes_ = 0;
  std::uint64_t leaves_ = 0;
};

// Routing number `index` in lexicographic order of the c-major flat vector.
void decode(const std::vector<std::size_t>& radix, std::uint64_t index, std::vector<int>& digits) {
  for (std::size_t i = radix.size(); i-- > 0;) {
    digits[i] = static_cast<int>(index % radix[i]);
    index /= radix[i];
  }
}

bool increment(const std::vector<std::size_t>& radix, std::vector<int>& digits) {
  for (std::size_t i = radix.size(); i-- > 0;) {
    if (static_cast<std::size_t>(++digits[i]) < radix[i]) return true;
    digits[i] = 0;
  }
  return false;
}

std::vector<std::size_t> radix_of(const Instance& instance) {
  std::vector<std::size_t> radix;
  for (CommodityIndex c = 0; c < instance.num_commodities(); ++c) {
    for (PeriodIndex t = 0; t < instance.periods; ++t) radix.push_back(instance.num_paths(c));
  }
  return radix;
}

RoutingState from_digits(const Instance& instance, const std::vector<int>& digits) {
  RoutingState r(instance.num_commodities(), instance.periods);
  for (CommodityIndex c = 0; c < instance.num_commodities(); ++c) {
    for (PeriodIndex t = 0; t < instance.periods; ++t) {
      r.assign(c, t, digits[c * instance.periods + t]);
    }
  }
  return r;
}

struct ChunkBest {
  std::vector<int> digits;
  double value = kInf;
  std::uint64_t evaluated = 0;
};

ChunkBest scan(const Instance& instance, const MultibandSet& mb, const std::vector<std::size_t>& radix,
               std::uint64_t begin, std::uint64_t end) {
  ChunkBest out;
  if (begin >= end) return out;
  LoadEvaluator eval(instance, mb);
  std::vector<int> digits(radix.size(), 0);
  decode(radix, begin, digits);
  RoutingState r = from_digits(instance, digits);
  for (std::uint64_t i = begin; i < end; ++i) {
    for (std::size_t k = 0; k < digits.size(); ++k) {
      r.assign(k / instance.periods, k % instance.periods, digits[k]);
    }
    const double v = eval.cost(r);
    ++out.evaluated;
    if (v < out.value) {
      out.value = v;
      out.digits = digits;
    }
    increment(radix, digits);
  }
  return out;
}

std::uint64_t checked_space(const Instance& instance, const OracleOptions& options) {
  for (CommodityIndex c = 0; c < instance.num_commodities(); ++c) {
    if (instance.num_paths(c) == 0) {
      throw ValidationError(
          fmt::format("commodity '{}' has no admissible path", instance.base.commodities[c].id));
    }
  }
  const std::uint64_t n = routing_space_size(instance);
  if (n > options.cap) {
    throw LimitError(fmt::format(
        "routing space has {} routings, above the enumeration cap of {}; use branch_and_bound",
        n == UINT64_MAX ? std::string("more than 2^64") : std::to_string(n), options.cap));
  }
  return n;
}

}  // namespace

FixingSet::FixingSet(const Instance& instance)
    : commodities_(instance.num_commodities()), periods_(instance.periods) {
  offset_.resize(commodities_);
  paths_.resize(commodities_);
  std::size_t n = 0;
  for (CommodityIndex c = 0; c < commodities_; ++c) {
    offset_[c] = n;
    paths_[c] = instance.num_paths(c);
    n += paths_[c] * periods_;
  }
  zero_.assign(n, 0);
  one_.assign(commodities_ * periods_, -1);
}

std::optional<std::size_t> FixingSet::one(CommodityIndex c, PeriodIndex t) const {
  const int p = one_[c * periods_ + t];
  if (p < 0) return std::nullopt;
  return static_cast<std::size_t>(p);
}

void FixingSet::set_zero(CommodityIndex c, std::size_t p, PeriodIndex t, bool value) {
  zero_[offset_[c] + p * periods_ + t] = value ? 1 : 0;
}

void FixingSet::set_one(CommodityIndex c, PeriodIndex t, std::size_t p) {
  one_[c * periods_ + t] = static_cast<int>(p);
}

void FixingSet::fix_one(CommodityIndex c, PeriodIndex t, std::size_t p) {
  set_one(c, t, p);
  for (std::size_t q = 0; q < paths_[c]; ++q) set_zero(c, q, t, q != p);
}

std::vector<std::size_t> FixingSet::allowed(CommodityIndex c, PeriodIndex t) const {
  if (const auto p = one(c, t)) return {*p};
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < paths_[c]; ++p) {
    if (!zero(c, p, t)) out.push_back(p);
  }
  return out;
}

std::size_t FixingSet::count_zero() const {
  return static_cast<std::size_t>(std::count(zero_.begin(), zero_.end(), 1));
}

std::size_t FixingSet::count_one() const {
  return static_cast<std::size_t>(std::count_if(one_.begin(), one_.end(), [](int p) { return p >= 0; }));
}

std::size_t FixingSet::count_free() const {
  std::size_t n = 0;
  for (CommodityIndex c = 0; c < commodities_; ++c) {
    for (PeriodIndex t = 0; t < periods_; ++t) n += allowed(c, t).size() > 1 ? 1 : 0;
  }
  return n;
}

void FixingSet::check(const Instance& instance) const {
  if (commodities_ != instance.num_commodities() || periods_ != instance.periods) {
    throw ValidationError("fixing shape does not match the instance");
  }
  for (CommodityIndex c = 0; c < commodities_; ++c) {
    if (paths_[c] != instance.num_paths(c)) {
      throw ValidationError("fixing shape does not match the instance");
    }
    for (PeriodIndex t = 0; t < periods_; ++t) {
      const auto& id = instance.base.commodities[c].id;
      if (const auto p = one(c, t)) {
        if (*p >= paths_[c]) throw ValidationError(fmt::format("fixing: bad path for '{}'", id));
        if (zero(c, *p, t)) {
          throw ValidationError(
              fmt::format("fixing: '{}' at t={} fixed to a path also fixed to zero", id, t + 1));
        }
        for (std::size_t q = 0; q < paths_[c]; ++q) {
          if (q != *p && !zero(c, q, t)) {
            throw ValidationError(fmt::format(
                "fixing: '{}' at t={} is fixed to one path but path {} is still free", id, t + 1,
                q + 1));
          }
        }
      } else if (allowed(c, t).empty()) {
        throw ValidationError(fmt::format("fixing: '{}' at t={} has no allowed path", id, t + 1));
      }
    }
  }
}

bool FixingSet::admits(const RoutingState& routing) const {
  if (routing.commodities() != commodities_ || routing.periods() != periods_) return false;
  for (CommodityIndex c = 0; c < commodities_; ++c) {
    for (PeriodIndex t = 0; t < periods_; ++t) {
      const int p = routing.at(c, t);
      if (p < 0 || static_cast<std::size_t>(p) >= paths_[c]) return false;
      if (zero(c, static_cast<std::size_t>(p), t)) return false;
      if (const auto q = one(c, t); q && *q != static_cast<std::size_t>(p)) return false;
    }
  }
  return true;
}

FixingSet rins_fix(const Instance& instance, const RoutingState& incumbent, const LpSolution& lp,
                   double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ValidationError("rins: epsilon must lie in [0, 1)");
  check_routing(instance, incumbent);
  if (!incumbent.complete()) throw ValidationError("rins: incumbent routing is incomplete");
  FixingSet fixing(instance);
  for (CommodityIndex c = 0; c < instance.num_commodities(); ++c) {
    for (PeriodIndex t = 0; t < instance.periods; ++t) {
      for (std::size_t p = 0; p < instance.num_paths(c); ++p) {
        const double x_bar = incumbent.at(c, t) == static_cast<int>(p) ? 1.0 : 0.0;
        const double x_lr = lp.routing.at(c, t) == static_cast<int>(p) ? 1.0 : 0.0;
        if (x_bar == 0.0 && x_lr <= epsilon) fixing.set_zero(c, p, t);
        if (x_bar == 1.0 && x_lr >= 1.0 - epsilon) fixing.set_one(c, t, p);
      }
    }
  }
  return fixing;
}

double node_lower_bound(const Instance& instance, const MultibandSet& mb, const FixingSet& fixing,
                        const RoutingState& partial) {
  fixing.check(instance);
  check_routing(instance, partial);
  Bounder bounder(instance, mb, fixing);
  for (CommodityIndex c = 0; c < instance.num_commodities(); ++c) {
    for (PeriodIndex t = 0; t < instance.periods; ++t) {
      const int p = partial.at(c, t);
      if (p == RoutingState::kUnassigned) continue;
      const auto allowed = fixing.allowed(c, t);
      if (std::find(allowed.begin(), allowed.end(), static_cast<std::size_t>(p)) == allowed.end()) {
        throw ValidationError("node bound: partial routing uses a path the fixing excludes");
      }
      bounder.assign(c, t, static_cast<std::size_t>(p));
    }
  }
  return bounder.bound();
}

BnbResult branch_and_bound(const Instance& instance, const MultibandSet& mb,
                           const FixingSet& fixing, const BnbOptions& options) {
  fixing.check(instance);
  if (options.time_limit && !(*options.time_limit >= 0.0)) {
    throw ValidationError("branch and bound: negative time limit");
  }
  const auto deadline = deadline_after(options.time_limit);
  Search search(instance, mb, fixing, deadline);
  if (options.incumbent) {
    check_routing(instance, *options.incumbent);
    if (!options.incumbent->complete() || !fixing.admits(*options.incumbent)) {
      throw ValidationError("branch and bound: incumbent is not feasible under the fixing");
    }
    search.seed(*options.incumbent);
  }
  BnbResult out;
  const double root = search.root_bound();
  const bool expired_at_start = deadline && Clock::now() >= *deadline;
  const bool finished = !expired_at_start && search.run();
  out.status = finished ? SearchStatus::kOptimal : SearchStatus::kTimeLimit;
  out.nodes = search.nodes();
  out.leaves = search.leaves();
  if (search.best()) out.best = search.evaluator().install(*search.best());
  if (finished) {
    out.bound = search.best_value();
  } else {
    // Every open node descends from the root, whose bound is the weakest.
    out.bound = std::min(search.best_value(), root);
  }
  return out;
}

std::uint64_t routing_space_size(const Instance& instance) {
  std::uint64_t n = 1;
  for (CommodityIndex c = 0; c < instance.num_commodities(); ++c) {
    for (PeriodIndex t = 0; t < instance.periods; ++t) {
      const std::uint64_t k = instance.num_paths(c);
      if (k == 0) return 0;
      if (n > UINT64_MAX / k) return UINT64_MAX;
      n *= k;
    }
  }
  return n;
}

OracleResult oracle_enumerate_serial(const Instance& instance, const MultibandSet& mb,
                                     const OracleOptions& options) {
  const std::uint64_t n = checked_space(instance, options);
  const auto radix = radix_of(instance);
  const ChunkBest best = scan(instance, mb, radix, 0, n);
  OracleResult out;
  out.evaluated = best.evaluated;
  out.best = install_capacities(from_digits(instance, best.digits), instance, mb);
  return out;
}

OracleResult oracle_enumerate_parallel(const Instance& instance, const MultibandSet& mb,
                                       const OracleOptions& options) {
  const std::uint64_t n = checked_space(instance, options);
  const auto radix = radix_of(instance);
  const int workers = std::max(1, options.workers);
  const std::uint64_t chunks = std::min<std::uint64_t>(n, static_cast<std::uint64_t>(workers) * 8);
  std::vector<ChunkBest> part(chunks);
  const auto count = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::uint64_t>(i);
    part[k] = scan(instance, mb, radix, n * k / chunks, n * (k + 1) / chunks);
  }
  // Chunks are merged in index order with strict improvement, so the winner
  // is the first minimum exactly as in the serial scan.
  ChunkBest best;
  for (const ChunkBest& p : part) {
    best.evaluated += p.evaluated;
    if (p.value < best.value) {
      best.value = p.value;
      best.digits = p.digits;
    }
  }
  OracleResult out;
  out.evaluated = best.evaluated;
  out.best = install_capacities(from_digits(instance, best.digits), instance, mb);
  return out;
}

OracleResult oracle_enumerate(const Instance& instance, const MultibandSet& mb,
                              const OracleOptions& options) {
  return options.workers > 1 ? oracle_enumerate_parallel(instance, mb, options)
                             : oracle_enumerate_serial(instance, mb, options);
}

HybridReport solve_hybrid(const Instance& instance, const MultibandSet& mb, const HybridConfig& cfg) {
  const auto start = Clock::now();
  if (!(cfg.rins_time >= 0.0)) throw ValidationError("hybrid: negative RINS time limit");
  ColonyConfig colony = cfg.colony;
  double rins_time = cfg.rins_time;
  if (cfg.total_time) {
    if (!(*cfg.total_time >= 0.0)) throw ValidationError("hybrid: negative time limit");
    // A short budget is split evenly rather than spent on the exact search.
    rins_time = std::min(rins_time, *cfg.total_time / 2.0);
    colony.time_limit = *cfg.total_time - rins_time;
  }
  HybridReport out;
  out.colony = run_colony(instance, mb, colony);
  out.colony_seconds = out.colony.seconds;
  out.c_sp = out.colony.baseline_cost;
  out.c_aco = out.colony.best.cost;
  out.lb = out.colony.lower_bound;
  out.best = out.colony.best;

  const auto rins_start = Clock::now();
  const LpSolution lp = nominal_lp_optimum(instance);
  const FixingSet fixing = rins_fix(instance, out.best.routing, lp, cfg.epsilon);
  out.free_pairs = fixing.count_free();
  if (rins_time > 0.0) {
    BnbOptions options;
    options.time_limit = rins_time;
    options.incumbent = out.best.routing;
    const BnbResult r = branch_and_bound(instance, mb, fixing, options);
    out.rins_status = r.status;
    if (r.best && r.best->cost < out.best.cost) out.best = *r.best;
  } else {
    out.rins_status = SearchStatus::kTimeLimit;
  }
  out.c_aco_rins = out.best.cost;
  out.rins_seconds = seconds_since(rins_start);
  out.total_seconds = seconds_since(start);
  return out;
}

}  // namespace mpnd
