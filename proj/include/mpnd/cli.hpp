#pragma once

// Command-line driver. Subcommands: solve, colony, baseline, oracle,
// export-lp, gen, validate, paths. Exit codes: 0 ok, 1 usage or config,
// 2 bad instance data, 3 search limit or internal error.

#include <cstdint>
#include <iosfwd>
#include <string>

namespace mpnd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

struct RunReport {
  std::string id;
  std::size_t periods = 0;
  double c_aco = 0.0;
  double c_aco_rins = 0.0;
  double gap_ar = 0.0;
  double c_sp = 0.0;
  double gap_sp = 0.0;
  double lb = 0.0;
  double time_s = 0.0;
  std::uint64_t seed = 0;
  std::size_t batches = 0;
  double colony_s = 0.0;
  double rins_s = 0.0;
};

// |v - lb| / v * 100. Throws ValidationError unless v > 0.
double gap(double v, double lb);

std::string csv_header();
std::string csv_row(const RunReport& report);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mpnd
