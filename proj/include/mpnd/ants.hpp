#pragma once

// ANTS colony: LP-seeded trails, LP-derived attractiveness, additive move
// probabilities, batch construction (serial reference and OpenMP kernel) and
// moving-average pheromone reinforcement.

#include <chrono>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "mpnd/evaluate.hpp"
#include "mpnd/instance.hpp"
#include "mpnd/relaxation.hpp"
#include "mpnd/rng.hpp"
#include "mpnd/uncertainty.hpp"

namespace mpnd {

using Clock = std::chrono::steady_clock;

enum class ProbabilityRule {
  kImproved,   // (a tau + (1 - a) eta) / sum
  kCanonical,  // tau^beta eta^delta / sum
};

struct ColonyConfig {
  double alpha = 0.5;
  std::size_t ants = 200;
  std::size_t window = 0;  // moving-average width psi; 0 means ants / 10
  std::optional<double> time_limit;        // seconds
  std::optional<std::size_t> max_batches;  // reproducible termination
  std::uint64_t seed = 1;
  int workers = 1;
  ProbabilityRule rule = ProbabilityRule::kImproved;
  double beta = 1.0;
  double delta = 1.0;
  double eta_floor = 0.05;
  std::optional<double> tau_floor;  // default 0.1 / max_c |P_c|

  std::size_t effective_window() const;
  // Throws ValidationError on an illegal configuration.
  void check() const;
};

class TrailMatrix {
 public:
  TrailMatrix() = default;
  TrailMatrix(const Instance& instance, double floor);

  double floor() const { return floor_; }
  double at(CommodityIndex c, std::size_t p, PeriodIndex t) const {
    return tau_[offset_[c] + p * periods_ + t];
  }
  double& at(CommodityIndex c, std::size_t p, PeriodIndex t) {
    return tau_[offset_[c] + p * periods_ + t];
  }
  const std::vector<double>& values() const { return tau_; }

  // Raises every value below the floor to the floor.
  void clamp();

 private:
  double floor_ = 0.0;
  std::size_t periods_ = 0;
  std::vector<std::size_t> offset_;
  std::vector<double> tau_;
};

double default_tau_floor(const Instance& instance);

// The LP path of every (c, t) starts at 1, all other moves at the floor.
TrailMatrix init_trails(const Instance& instance, const LpSolution& lp,
                        std::optional<double> floor = std::nullopt);

class MovingAverage {
 public:
  explicit MovingAverage(std::size_t width);

  void push(double value);
  double mean() const;
  std::size_t size() const { return window_.size(); }
  std::size_t width() const { return width_; }

 private:
  std::size_t width_;
  std::deque<double> window_;
};

// Throws ValidationError on empty input or when every numerator is zero.
std::vector<double> move_probabilities(std::span<const double> tau, std::span<const double> eta,
                                       double alpha);
std::vector<double> canonical_probabilities(std::span<const double> tau,
                                            std::span<const double> eta, double beta,
                                            double delta);

// Lower LP value, higher attractiveness: affine map of v onto [eta_floor, 1],
// all ones when the values tie.
std::vector<double> attractiveness(std::span<const double> lp_values, double eta_floor);

// Attractiveness of every path of (c, t) after `partial`, priced with
// fixed_prefix_lp_value. Reference for the incremental construction.
std::vector<double> attractiveness(const Instance& instance, const LpSolution& lp,
                                   const RoutingState& partial, CommodityIndex c, PeriodIndex t,
                                   double eta_floor);

// Index drawn from a probability vector with one uniform variate.
std::size_t sample(std::span<const double> probabilities, Rng& rng);

// One ant: walks construction_sequence() drawing each (c, t) move.
RoutingState construct_routing(const Instance& instance, const LpSolution& lp,
                               const TrailMatrix& trails, const ColonyConfig& cfg, Rng& rng);

struct AntResult {
  RoutingState routing;
  double value = 0.0;
  bool built = false;  // false when the deadline passed before the ant started
};

// Ant i of batch b uses Rng::stream(cfg.seed, b, i). Both kernels return the
// same results for the same inputs.
std::vector<AntResult> construct_batch_serial(const Instance& instance, const MultibandSet& mb,
                                              const LpSolution& lp, const TrailMatrix& trails,
                                              const ColonyConfig& cfg, std::size_t batch,
                                              std::optional<Clock::time_point> deadline = {});
std::vector<AntResult> construct_batch_parallel(const Instance& instance, const MultibandSet& mb,
                                                const LpSolution& lp, const TrailMatrix& trails,
                                                const ColonyConfig& cfg, std::size_t batch,
                                                std::optional<Clock::time_point> deadline = {});

struct UpdateOutcome {
  bool applied = false;
  bool converged = false;  // moving average at the lower bound; trails kept
  double mean = 0.0;
};

// Ant by ant in batch order: adds tau0 * (1 - (z - lb) / (mean - lb)) to
// every move of the ant, with mean taken over the window before the ant's
// value is pushed (no reinforcement while the window is empty). Clamps at the
// floor once the batch is done.
UpdateOutcome pheromone_update(TrailMatrix& trails, const TrailMatrix& initial,
                               std::span<const AntResult> batch, double lb, MovingAverage& avg);

struct ColonyResult {
  Solution best;
  double baseline_cost = 0.0;
  double lower_bound = 0.0;
  std::size_t batches = 0;
  std::size_t ants_built = 0;
  std::vector<double> trace;  // best value after each batch
  bool converged = false;
  double seconds = 0.0;
};

ColonyResult run_colony(const Instance& instance, const MultibandSet& mb, const ColonyConfig& cfg);

}  // namespace mpnd
