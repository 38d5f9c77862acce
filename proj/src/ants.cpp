#include "mpnd/ants.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpnd/errors.hpp"

namespace mpnd {

namespace {

std::vector<double> normalize(std::vector<double> w) {
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw ValidationError("move probabilities: all weights are zero");
  }
  for (double& x : w) x /= sum;
  return w;
}

void check_sizes(std::span<const double> tau, std::span<const double> eta) {
  if (tau.empty()) throw ValidationError("move probabilities: no candidate moves");
  if (tau.size() != eta.size()) throw ValidationError("move probabilities: size mismatch");
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!(tau[i] >= 0.0) || !(eta[i] >= 0.0)) {
      throw ValidationError("move probabilities: negative trail or attractiveness");
    }
  }
}

bool expired(const std::optional<Clock::time_point>& deadline) {
  return deadline && Clock::now() >= *deadline;
}

// Per-thread scratch state of ant construction.
class Builder {
 public:
  Builder(const Instance& instance, const LpSolution& lp, const TrailMatrix& trails,
          const ColonyConfig& cfg)
      : inst_(instance),
        trails_(trails),
        cfg_(cfg),
        sequence_(construction_sequence(instance)),
        prefix_(instance, lp) {}

  RoutingState build(Rng& rng) {
    prefix_.reset();
    RoutingState r(inst_.num_commodities(), inst_.periods);
    for (const auto& [c, t] : sequence_) {
      const std::size_t np = inst_.num_paths(c);
      if (np == 1) {
        r.assign(c, t, 0);
        continue;
      }
      values_.resize(np);
      tau_.resize(np);
      for (std::size_t p = 0; p < np; ++p) {
        values_[p] = prefix_.try_move(c, t, p);
        tau_[p] = trails_.at(c, p, t);
      }
      const auto eta = attractiveness(values_, cfg_.eta_floor);
      const auto prob = cfg_.rule == ProbabilityRule::kImproved
                            ? move_probabilities(tau_, eta, cfg_.alpha)
                            : canonical_probabilities(tau_, eta, cfg_.beta, cfg_.delta);
      const std::size_t p = sample(prob, rng);
      r.assign(c, t, static_cast<int>(p));
      prefix_.commit(c, t, p);
    }
    return r;
  }

  AntResult run(std::size_t batch, std::size_t ant, LoadEvaluator& eval) {
    AntResult out;
    Rng rng = Rng::stream(cfg_.seed, batch, ant);
    out.routing = build(rng);
    out.value = eval.cost(out.routing);
    out.built = true;
    return out;
  }

 private:
  const Instance& inst_;
  const TrailMatrix& trails_;
  const ColonyConfig& cfg_;
  std::vector<std::pair<CommodityIndex, PeriodIndex>> sequence_;
  PrefixEvaluator prefix_;
  std::vector<double> values_;
  std::vector<double> tau_;
};

}  // namespace

std::size_t ColonyConfig::effective_window() const {
  return window > 0 ? window : std::max<std::size_t>(1, ants / 10);
}

void ColonyConfig::check() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("colony: alpha must lie in [0, 1]");
  if (ants < 1) throw ValidationError("colony: ants per batch must be >= 1");
  if (time_limit && !(*time_limit >= 0.0)) throw ValidationError("colony: negative time limit");
  if (!time_limit && !max_batches) {
    throw ValidationError("colony: a time limit or a batch count is required");
  }
  if (workers < 1) throw ValidationError("colony: workers must be >= 1");
  if (!(beta >= 0.0) || !(delta >= 0.0)) throw ValidationError("colony: negative exponent");
  if (!(eta_floor > 0.0 && eta_floor <= 1.0)) {
    throw ValidationError("colony: attractiveness floor must lie in (0, 1]");
  }
  if (tau_floor && !(*tau_floor > 0.0)) throw ValidationError("colony: trail floor must be > 0");
}

TrailMatrix::TrailMatrix(const Instance& instance, double floor)
    : floor_(floor), periods_(instance.periods) {
  offset_.resize(instance.num_commodities());
  std::size_t n = 0;
  for (CommodityIndex c = 0; c < instance.num_commodities(); ++c) {
    offset_[c] = n;
    n += instance.num_paths(c) * periods_;
  }
  tau_.assign(n, floor);
}

void TrailMatrix::clamp() {
  for (double& x : tau_) x = std::max(x, floor_);
}

double default_tau_floor(const Instance& instance) {
  return 0.1 / static_cast<double>(std::max<std::size_t>(1, instance.max_paths()));
}

TrailMatrix init_trails(const Instance& instance, const LpSolution& lp,
                        std::optional<double> floor) {
  TrailMatrix trails(instance, floor.value_or(default_tau_floor(instance)));
  for (CommodityIndex c = 0; c < instance.num_commodities(); ++c) {
    for (PeriodIndex t = 0; t < instance.periods; ++t) {
      const auto p = static_cast<std::size_t>(lp.routing.at(c, t));
      trails.at(c, p, t) = std::max(1.0, trails.floor());
    }
  }
  return trails;
}

MovingAverage::MovingAverage(std::size_t width) : width_(width) {
  if (width_ < 1) throw ValidationError("moving average: width must be >= 1");
}

void MovingAverage::push(double value) {
  window_.push_back(value);
  if (window_.size() > width_) window_.pop_front();
}

double MovingAverage::mean() const {
  if (window_.empty()) return 0.0;
  return std::accumulate(window_.begin(), window_.end(), 0.0) /
         static_cast<double>(window_.size());
}

std::vector<double> move_probabilities(std::span<const double> tau, std::span<const double> eta,
                                       double alpha) {
  check_sizes(tau, eta);
  std::vector<double> w(tau.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = alpha * tau[i] + (1.0 - alpha) * eta[i];
  return normalize(std::move(w));
}

std::vector<double> canonical_probabilities(std::span<const double> tau,
                                            std::span<const double> eta, double beta,
                                            double delta) {
  check_sizes(tau, eta);
  std::vector<double> w(tau.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(tau[i], beta) * std::pow(eta[i], delta);
  return normalize(std::move(w));
}

std::vector<double> attractiveness(std::span<const double> lp_values, double eta_floor) {
  std::vector<double> eta(lp_values.size(), 1.0);
  if (lp_values.empty()) return eta;
  const auto [lo, hi] = std::minmax_element(lp_values.begin(), lp_values.end());
  const double vmin = *lo;
  const double vmax = *hi;
  // Differences at rounding level count as ties.
  if (!(vmax - vmin > 1e-9 * std::max(1.0, std::abs(vmax)))) return eta;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    eta[i] = eta_floor + (1.0 - eta_floor) * ((vmax - lp_values[i]) / (vmax - vmin));
  }
  return eta;
}

std::vector<double> attractiveness(const Instance& instance, const LpSolution& lp,
                                   const RoutingState& partial, CommodityIndex c, PeriodIndex t,
                                   double eta_floor) {
  std::vector<double> v(instance.num_paths(c));
  for (std::size_t p = 0; p < v.size(); ++p) {
    RoutingState next = partial;
    next.assign(c, t, static_cast<int>(p));
    v[p] = fixed_prefix_lp_value(instance, lp, next);
  }
  return attractiveness(v, eta_floor);
}

std::size_t sample(std::span<const double> probabilities, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    cumulative += probabilities[i];
    if (u < cumulative) return i;
  }
  // Rounding left the total just below 1: take the last positive entry.
  for (std::size_t i = probabilities.size(); i-- > 0;) {
    if (probabilities[i] > 0.0) return i;
  }
  return 0;
}

RoutingState construct_routing(const Instance& instance, const LpSolution& lp,
                               const TrailMatrix& trails, const ColonyConfig& cfg, Rng& rng) {
  Builder builder(instance, lp, trails, cfg);
  return builder.build(rng);
}

std::vector<AntResult> construct_batch_serial(const Instance& instance, const MultibandSet& mb,
                                              const LpSolution& lp, const TrailMatrix& trails,
                                              const ColonyConfig& cfg, std::size_t batch,
                                              std::optional<Clock::time_point> deadline) {
  std::vector<AntResult> out(cfg.ants);
  Builder builder(instance, lp, trails, cfg);
  LoadEvaluator eval(instance, mb);
  for (std::size_t i = 0; i < cfg.ants; ++i) {
    if (expired(deadline)) break;
    out[i] = builder.run(batch, i, eval);
  }
  return out;
}

std::vector<AntResult> construct_batch_parallel(const Instance& instance, const MultibandSet& mb,
                                                const LpSolution& lp, const TrailMatrix& trails,
                                                const ColonyConfig& cfg, std::size_t batch,
                                                std::optional<Clock::time_point> deadline) {
  std::vector<AntResult> out(cfg.ants);
  const auto n = static_cast<std::int64_t>(cfg.ants);
#pragma omp parallel num_threads(cfg.workers)
  {
    Builder builder(instance, lp, trails, cfg);
    LoadEvaluator eval(instance, mb);
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
      if (expired(deadline)) continue;
      out[static_cast<std::size_t>(i)] = builder.run(batch, static_cast<std::size_t>(i), eval);
    }
  }
  return out;
}

UpdateOutcome pheromone_update(TrailMatrix& trails, const TrailMatrix& initial,
                               std::span<const AntResult> batch, double lb, MovingAverage& avg) {
  UpdateOutcome out;
  for (const AntResult& a : batch) {
    if (!a.built) continue;
    if (avg.size() > 0) {
      const double mean = avg.mean();
      if (mean > lb) {
        const double factor = 1.0 - (a.value - lb) / (mean - lb);
        const RoutingState& r = a.routing;
        for (CommodityIndex c = 0; c < r.commodities(); ++c) {
          for (PeriodIndex t = 0; t < r.periods(); ++t) {
            const auto p = static_cast<std::size_t>(r.at(c, t));
            trails.at(c, p, t) += initial.at(c, p, t) * factor;
          }
        }
        out.applied = true;
      } else {
        out.converged = true;
      }
    }
    avg.push(a.value);
  }
  out.mean = avg.size() > 0 ? avg.mean() : 0.0;
  if (avg.size() > 0 && !(out.mean > lb)) out.converged = true;
  trails.clamp();
  return out;
}

ColonyResult run_colony(const Instance& instance, const MultibandSet& mb, const ColonyConfig& cfg) {
  cfg.check();
  const auto start = Clock::now();
  std::optional<Clock::time_point> deadline;
  if (cfg.time_limit) {
    deadline = start + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(*cfg.time_limit));
  }
  ColonyResult out;
  const LpSolution lp = nominal_lp_optimum(instance);
  out.lower_bound = lp.lower_bound;
  out.best = sp_baseline(instance, mb);
  out.baseline_cost = out.best.cost;

  bool singleton = true;
  for (CommodityIndex c = 0; c < instance.num_commodities(); ++c) {
    singleton = singleton && instance.num_paths(c) == 1;
  }
  std::size_t batch_cap = cfg.max_batches.value_or(SIZE_MAX);
  if (singleton) batch_cap = std::min<std::size_t>(batch_cap, 1);

  TrailMatrix trails = init_trails(instance, lp, cfg.tau_floor);
  const TrailMatrix initial = trails;
  MovingAverage avg(cfg.effective_window());
  LoadEvaluator eval(instance, mb);

  while (out.batches < batch_cap && !expired(deadline)) {
    const auto results =
        cfg.workers > 1
            ? construct_batch_parallel(instance, mb, lp, trails, cfg, out.batches, deadline)
            : construct_batch_serial(instance, mb, lp, trails, cfg, out.batches, deadline);
    for (const AntResult& a : results) {
      if (!a.built) continue;
      ++out.ants_built;
      if (a.value < out.best.cost) out.best = eval.install(a.routing);
    }
    ++out.batches;
    out.trace.push_back(out.best.cost);
    if (pheromone_update(trails, initial, results, lp.lower_bound, avg).converged) {
      out.converged = true;
      break;
    }
  }
  out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

}  // namespace mpnd
