#pragma once

// INI-style run configuration:
//
//   [instance]     periods, demand_growth, cost_discount, paths, jitter, seed,
//                  weight (cost|hops), phi
//   [uncertainty]  preset (default|none), fractions, lambda, mu
//                  (comma-separated, most negative band first)
//   [colony]       alpha, ants, window, time_limit, batches, seed, workers,
//                  rule (improved|canonical), beta, delta, eta_floor, tau_floor
//   [search]       epsilon, rins_time, total_time, all_bands
//
// Unknown sections or keys are rejected.

#include <string>
#include <string_view>

#include "mpnd/ants.hpp"
#include "mpnd/instance.hpp"
#include "mpnd/search.hpp"
#include "mpnd/uncertainty.hpp"

namespace mpnd {

struct RunConfig {
  GrowthConfig growth;
  BandSpec bands = BandSpec::defaults();
  HybridConfig hybrid;
  bool all_bands = false;
};

// Throws ValidationError naming the offending key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

}  // namespace mpnd
