#pragma once

// LP-format export of the nominal multiperiod model and of its compact robust
// counterpart under a multiband set, plus a reader for the same grammar.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mpnd/instance.hpp"
#include "mpnd/uncertainty.hpp"

namespace mpnd {

struct ModelStats {
  std::size_t x = 0;  // path choices, binary
  std::size_t y = 0;  // module installs, general integer
  std::size_t w = 0;  // band multipliers, free
  std::size_t z = 0;  // per-coefficient multipliers, >= 0
  std::size_t capacity_rows = 0;
  std::size_t assignment_rows = 0;
  std::size_t dual_rows = 0;
  std::size_t bands = 0;  // bands with multiplier rows

  bool operator==(const ModelStats&) const = default;
};

struct RobustOptions {
  // Also emit multiplier rows for negative bands (positive bands only by
  // default, which is exact when no negative deviation is forced).
  bool all_bands = false;
};

struct EmittedModel {
  std::string text;
  ModelStats stats;
};

// Candidate crossings of e: number of (c, p) with e on P[c][p].
std::size_t candidate_crossings(const Instance& instance, EdgeIndex e);

EmittedModel emit_nominal(const Instance& instance);
EmittedModel emit_robust(const Instance& instance, const MultibandSet& mb,
                         const RobustOptions& options = {});

// Counts predicted from the instance alone.
ModelStats expected_nominal_stats(const Instance& instance);
ModelStats expected_robust_stats(const Instance& instance, const MultibandSet& mb,
                                 const RobustOptions& options = {});

std::string x_name(CommodityIndex c, std::size_t p, PeriodIndex t);
std::string y_name(EdgeIndex e, PeriodIndex t);
std::string w_name(EdgeIndex e, PeriodIndex t, int k);
std::string z_name(EdgeIndex e, CommodityIndex c, std::size_t p, PeriodIndex t);

struct LpRow {
  std::string name;
  std::vector<std::pair<std::string, double>> terms;
  std::string sense;  // "<=", ">=" or "="
  double rhs = 0.0;
};

struct LpModel {
  bool minimize = true;
  std::vector<std::pair<std::string, double>> objective;
  std::vector<LpRow> rows;
  std::set<std::string> free_vars;
  std::map<std::string, std::pair<double, double>> bounds;
  std::set<std::string> generals;
  std::set<std::string> binaries;

  // Every variable named anywhere in the model.
  std::set<std::string> variables() const;
};

// Reads the CPLEX LP subset written by the emitters. Throws ParseError.
LpModel parse_lp(std::string_view text);

// Recounts the variable families (by name prefix) and row families (by row
// name prefix) of a parsed model.
ModelStats count_model(const LpModel& model);

}  // namespace mpnd
