#include "mpnd/cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "mpnd/ants.hpp"
#include "mpnd/config.hpp"
#include "mpnd/errors.hpp"
#include "mpnd/evaluate.hpp"
#include "mpnd/instance.hpp"
#include "mpnd/reformulate.hpp"
#include "mpnd/relaxation.hpp"
#include "mpnd/search.hpp"
#include "mpnd/uncertainty.hpp"

namespace mpnd {

double gap(double v, double lb) {
  if (!(v > 0.0)) throw ValidationError(fmt::format("gap: value must be positive, got {}", v));
  return std::abs(v - lb) / v * 100.0;
}

std::string csv_header() { return "id,T,c_aco,c_aco_rins,gap_ar,c_sp,gap_sp,lb,time_s,seed"; }

std::string csv_row(const RunReport& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{}", r.id, r.periods, r.c_aco, r.c_aco_rins,
                     r.gap_ar, r.c_sp, r.gap_sp, r.lb, r.time_s, r.seed);
}

namespace {

// Errors in the configuration itself map to the usage exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string instance;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::size_t> ants;
  std::optional<std::size_t> batches;
  std::optional<double> time_limit;
  std::optional<double> rins_time;
  std::optional<double> phi;
  std::optional<std::size_t> periods;
  std::optional<std::size_t> paths;
  bool robust = false;
  bool all_bands = false;
  std::uint64_t cap = OracleOptions{}.cap;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(fmt::format("cannot read '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunConfig resolve_config(const Flags& f) {
  RunConfig cfg;
  std::string path = f.config;
  if (path.empty()) {
    if (const char* env = std::getenv("MPND_CONFIG"); env != nullptr) path = env;
  }
  try {
    if (!path.empty()) cfg = load_config(path);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  auto& colony = cfg.hybrid.colony;
  if (f.seed) {
    colony.seed = *f.seed;
    cfg.growth.seed = *f.seed;
  }
  if (f.workers) colony.workers = *f.workers;
  if (f.ants) colony.ants = *f.ants;
  if (f.batches) colony.max_batches = *f.batches;
  if (f.rins_time) cfg.hybrid.rins_time = *f.rins_time;
  if (f.phi) cfg.growth.phi = *f.phi;
  if (f.periods) cfg.growth.periods = *f.periods;
  if (f.paths) cfg.growth.paths_per_commodity = *f.paths;
  if (f.all_bands) cfg.all_bands = true;
  if (f.time_limit) {
    colony.time_limit = *f.time_limit;
    cfg.hybrid.total_time = *f.time_limit;
  }
  if (!colony.time_limit && !colony.max_batches) colony.max_batches = 20;
  try {
    cfg.growth.check();
    colony.check();
    make_rule(cfg.bands).check();
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

Instance load_instance(const Flags& f, const RunConfig& cfg) {
  const std::string text = read_file(f.instance);
  Instance inst;
  if (looks_like_sndlib(text)) {
    inst = expand_multiperiod(parse_sndlib(text), cfg.growth);
  } else {
    inst = read_instance(text);
    if (f.phi) inst.phi = *f.phi;
  }
  if (inst.base.name.empty()) inst.base.name = std::filesystem::path(f.instance).stem().string();
  return inst;
}

void require_valid(const Instance& inst) {
  const auto problems = validate(inst);
  if (!problems.empty()) throw ValidationError(fmt::format("invalid instance: {}", problems.front()));
}

RunReport base_report(const Instance& inst, const RunConfig& cfg) {
  RunReport r;
  r.id = inst.base.name;
  r.periods = inst.periods;
  r.seed = cfg.hybrid.colony.seed;
  return r;
}

void finish(RunReport& r) {
  r.gap_ar = gap(r.c_aco_rins, r.lb);
  r.gap_sp = gap(r.c_sp, r.lb);
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ValidationError(fmt::format("cannot write '{}'", path));
    }
    out_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& get() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

void write_report(const Flags& f, std::ostream& out, const RunReport& r) {
  Output o(f.out, out);
  o.get() << csv_header() << '\n' << csv_row(r) << '\n';
}

int cmd_solve(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(f);
  const Instance inst = load_instance(f, cfg);
  require_valid(inst);
  const MultibandSet mb = build_multiband(inst, cfg.bands);
  const HybridReport h = solve_hybrid(inst, mb, cfg.hybrid);
  RunReport r = base_report(inst, cfg);
  r.c_aco = h.c_aco;
  r.c_aco_rins = h.c_aco_rins;
  r.c_sp = h.c_sp;
  r.lb = h.lb;
  r.time_s = h.total_seconds;
  r.batches = h.colony.batches;
  r.colony_s = h.colony_seconds;
  r.rins_s = h.rins_seconds;
  finish(r);
  write_report(f, out, r);
  fmt::print(err, "batches {}, colony {:.3f}s, rins {:.3f}s ({}), free pairs {}\n", r.batches,
             r.colony_s, r.rins_s,
             h.rins_status == SearchStatus::kOptimal ? "optimal" : "time limit", h.free_pairs);
  return kExitOk;
}

int cmd_colony(const Flags& f, std::ostream& out, std::ostream& err) {
  RunConfig cfg = resolve_config(f);
  const Instance inst = load_instance(f, cfg);
  require_valid(inst);
  const MultibandSet mb = build_multiband(inst, cfg.bands);
  const ColonyResult c = run_colony(inst, mb, cfg.hybrid.colony);
  RunReport r = base_report(inst, cfg);
  r.c_aco = c.best.cost;
  r.c_aco_rins = c.best.cost;
  r.c_sp = c.baseline_cost;
  r.lb = c.lower_bound;
  r.time_s = c.seconds;
  r.batches = c.batches;
  r.colony_s = c.seconds;
  finish(r);
  write_report(f, out, r);
  fmt::print(err, "batches {}, ants {}, {}\n", c.batches, c.ants_built,
             c.converged ? "converged" : "budget exhausted");
  return kExitOk;
}

int cmd_baseline(const Flags& f, std::ostream& out, std::ostream&) {
  const auto start = Clock::now();
  const RunConfig cfg = resolve_config(f);
  const Instance inst = load_instance(f, cfg);
  require_valid(inst);
  const MultibandSet mb = build_multiband(inst, cfg.bands);
  const Solution sp = sp_baseline(inst, mb);
  RunReport r = base_report(inst, cfg);
  r.c_sp = sp.cost;
  r.c_aco = sp.cost;
  r.c_aco_rins = sp.cost;
  r.lb = nominal_lp_optimum(inst).lower_bound;
  r.time_s = std::chrono::duration<double>(Clock::now() - start).count();
  finish(r);
  write_report(f, out, r);
  return kExitOk;
}

int cmd_oracle(const Flags& f, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  const RunConfig cfg = resolve_config(f);
  const Instance inst = load_instance(f, cfg);
  require_valid(inst);
  const MultibandSet mb = build_multiband(inst, cfg.bands);
  OracleOptions options;
  options.cap = f.cap;
  options.workers = cfg.hybrid.colony.workers;
  const OracleResult o = oracle_enumerate(inst, mb, options);
  RunReport r = base_report(inst, cfg);
  r.c_aco = o.best.cost;
  r.c_aco_rins = o.best.cost;
  r.c_sp = sp_baseline(inst, mb).cost;
  r.lb = o.best.cost;
  r.time_s = std::chrono::duration<double>(Clock::now() - start).count();
  finish(r);
  write_report(f, out, r);
  fmt::print(err, "{} routings evaluated\n", o.evaluated);
  return kExitOk;
}

int cmd_export(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(f);
  const Instance inst = load_instance(f, cfg);
  require_valid(inst);
  EmittedModel m;
  if (f.robust) {
    RobustOptions options;
    options.all_bands = cfg.all_bands;
    m = emit_robust(inst, build_multiband(inst, cfg.bands), options);
  } else {
    m = emit_nominal(inst);
  }
  Output o(f.out, out);
  o.get() << m.text;
  const ModelStats& s = m.stats;
  fmt::print(err, "x {} y {} w {} z {} | capacity {} assignment {} dual {}\n", s.x, s.y, s.w, s.z,
             s.capacity_rows, s.assignment_rows, s.dual_rows);
  return kExitOk;
}

int cmd_gen(const Flags& f, std::ostream& out, std::ostream&) {
  const RunConfig cfg = resolve_config(f);
  const Instance inst = load_instance(f, cfg);
  require_valid(inst);
  Output o(f.out, out);
  write_instance(o.get(), inst);
  return kExitOk;
}

int cmd_validate(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(f);
  const Instance inst = load_instance(f, cfg);
  const auto problems = validate(inst);
  for (const auto& p : problems) err << p << '\n';
  if (!problems.empty()) return kExitData;
  fmt::print(out, "ok: {} vertices, {} edges, {} commodities, {} periods\n",
             inst.base.vertices.size(), inst.num_edges(), inst.num_commodities(), inst.periods);
  return kExitOk;
}

int cmd_paths(const Flags& f, std::ostream& out, std::ostream&) {
  const RunConfig cfg = resolve_config(f);
  const Instance inst = load_instance(f, cfg);
  require_valid(inst);
  Output o(f.out, out);
  for (CommodityIndex c = 0; c < inst.num_commodities(); ++c) {
    for (std::size_t p = 0; p < inst.num_paths(c); ++p) {
      fmt::print(o.get(), "{} {} {}", inst.base.commodities[c].id, p + 1,
                 single_path_cost(inst, c, p));
      for (EdgeIndex e : inst.paths[c][p]) fmt::print(o.get(), " {}", inst.base.edges[e].id);
      o.get() << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust multiperiod network design"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("instance", f.instance, "SNDlib or native instance file")->required();
    sub->add_option("--config", f.config, "INI configuration (default: $MPND_CONFIG)");
    sub->add_option("--out", f.out, "Write output to this file instead of stdout");
    sub->add_option("--seed", f.seed, "Seed for the colony and instance jitter");
    sub->add_option("--phi", f.phi, "Module size override")->check(CLI::PositiveNumber);
    sub->add_option("--periods", f.periods, "Periods when expanding an SNDlib file");
    sub->add_option("--paths", f.paths, "Paths per commodity when expanding an SNDlib file");
  };
  auto colony = [&](CLI::App* sub) {
    sub->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--ants", f.ants, "Ants per batch")->check(CLI::PositiveNumber);
    sub->add_option("--batches", f.batches, "Batch budget")->check(CLI::PositiveNumber);
    sub->add_option("--time-limit", f.time_limit, "Wall-clock budget in seconds")
        ->check(CLI::NonNegativeNumber);
  };

  auto* solve = app.add_subcommand("solve", "Colony followed by RINS");
  common(solve);
  colony(solve);
  solve->add_option("--rins-time", f.rins_time, "RINS budget in seconds")
      ->check(CLI::NonNegativeNumber);
  auto* col = app.add_subcommand("colony", "Colony only");
  common(col);
  colony(col);
  auto* base = app.add_subcommand("baseline", "Shortest-path baseline");
  common(base);
  auto* oracle = app.add_subcommand("oracle", "Exhaustive enumeration");
  common(oracle);
  oracle->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  oracle->add_option("--cap", f.cap, "Largest routing space to enumerate");
  auto* exp = app.add_subcommand("export-lp", "Write the model in LP format");
  common(exp);
  exp->add_flag("--robust", f.robust, "Robust counterpart");
  exp->add_flag("--all-bands", f.all_bands, "Multiplier rows for negative bands too");
  auto* gen = app.add_subcommand("gen", "Expand to a native multiperiod instance");
  common(gen);
  auto* val = app.add_subcommand("validate", "Check instance invariants");
  common(val);
  auto* paths = app.add_subcommand("paths", "List admissible paths");
  common(paths);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(f, out, err);
    if (col->parsed()) return cmd_colony(f, out, err);
    if (base->parsed()) return cmd_baseline(f, out, err);
    if (oracle->parsed()) return cmd_oracle(f, out, err);
    if (exp->parsed()) return cmd_export(f, out, err);
    if (gen->parsed()) return cmd_gen(f, out, err);
    if (val->parsed()) return cmd_validate(f, out, err);
    if (paths->parsed()) return cmd_paths(f, out, err);
  } catch (const ConfigError& e) {
    err << "config: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse: " << e.what() << '\n';
    return kExitData;
  } catch (const ValidationError& e) {
    err << "invalid: " << e.what() << '\n';
    return kExitData;
  } catch (const LimitError& e) {
    err << "limit: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace mpnd
