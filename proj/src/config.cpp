#include "mpnd/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include "mpnd/errors.hpp"

namespace mpnd {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t");
  return std::string(s.substr(a, b - a + 1));
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError(fmt::format("config {}: not a number: '{}'", key, raw));
  }
  return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError(fmt::format("config {}: not a non-negative integer: '{}'", key, raw));
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ValidationError(fmt::format("config {}: not a boolean: '{}'", key, raw));
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream in(raw);
  for (std::string item; std::getline(in, item, ',');) out.push_back(to_double(key, item));
  return out;
}

void apply_instance(RunConfig& cfg, const std::string& key, const std::string& v) {
  const std::string name = "instance." + key;
  auto& g = cfg.growth;
  if (key == "periods") {
    g.periods = to_unsigned(name, v);
  } else if (key == "demand_growth") {
    g.demand_growth = to_double(name, v);
  } else if (key == "cost_discount") {
    g.cost_discount = to_double(name, v);
  } else if (key == "paths") {
    g.paths_per_commodity = to_unsigned(name, v);
  } else if (key == "jitter") {
    g.jitter = to_double(name, v);
  } else if (key == "seed") {
    g.seed = to_unsigned(name, v);
  } else if (key == "weight") {
    const std::string w = trim(v);
    if (w == "cost") {
      g.weight = PathWeight::kModuleCost;
    } else if (w == "hops") {
      g.weight = PathWeight::kHops;
    } else {
      throw ValidationError(fmt::format("config {}: expected cost or hops", name));
    }
  } else if (key == "phi") {
    g.phi = to_double(name, v);
  } else {
    throw ValidationError(fmt::format("config: unknown key {}", name));
  }
}

void apply_uncertainty(RunConfig& cfg, const std::string& key, const std::string& v) {
  const std::string name = "uncertainty." + key;
  if (key == "preset") {
    const std::string p = trim(v);
    if (p == "default") {
      cfg.bands = BandSpec::defaults();
    } else if (p == "none") {
      cfg.bands = BandSpec::none();
    } else {
      throw ValidationError(fmt::format("config {}: expected default or none", name));
    }
  } else if (key == "fractions") {
    cfg.bands.fraction = to_list(name, v);
  } else if (key == "lambda") {
    cfg.bands.lambda = to_list(name, v);
  } else if (key == "mu") {
    cfg.bands.mu = to_list(name, v);
  } else {
    throw ValidationError(fmt::format("config: unknown key {}", name));
  }
}

void apply_colony(RunConfig& cfg, const std::string& key, const std::string& v) {
  const std::string name = "colony." + key;
  auto& c = cfg.hybrid.colony;
  if (key == "alpha") {
    c.alpha = to_double(name, v);
  } else if (key == "ants") {
    c.ants = to_unsigned(name, v);
  } else if (key == "window") {
    c.window = to_unsigned(name, v);
  } else if (key == "time_limit") {
    c.time_limit = to_double(name, v);
  } else if (key == "batches") {
    c.max_batches = to_unsigned(name, v);
  } else if (key == "seed") {
    c.seed = to_unsigned(name, v);
  } else if (key == "workers") {
    c.workers = static_cast<int>(to_unsigned(name, v));
  } else if (key == "rule") {
    const std::string r = trim(v);
    if (r == "improved") {
      c.rule = ProbabilityRule::kImproved;
    } else if (r == "canonical") {
      c.rule = ProbabilityRule::kCanonical;
    } else {
      throw ValidationError(fmt::format("config {}: expected improved or canonical", name));
    }
  } else if (key == "beta") {
    c.beta = to_double(name, v);
  } else if (key == "delta") {
    c.delta = to_double(name, v);
  } else if (key == "eta_floor") {
    c.eta_floor = to_double(name, v);
  } else if (key == "tau_floor") {
    c.tau_floor = to_double(name, v);
  } else {
    throw ValidationError(fmt::format("config: unknown key {}", name));
  }
}

void apply_search(RunConfig& cfg, const std::string& key, const std::string& v) {
  const std::string name = "search." + key;
  if (key == "epsilon") {
    cfg.hybrid.epsilon = to_double(name, v);
  } else if (key == "rins_time") {
    cfg.hybrid.rins_time = to_double(name, v);
  } else if (key == "total_time") {
    cfg.hybrid.total_time = to_double(name, v);
  } else if (key == "all_bands") {
    cfg.all_bands = to_bool(name, v);
  } else {
    throw ValidationError(fmt::format("config: unknown key {}", name));
  }
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(fmt::format("config line {}: {}", e.line(), e.message()));
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) {
      throw ValidationError(fmt::format("config: key '{}' outside a section", section));
    }
    for (const auto& [key, value] : body) {
      const std::string v = value.get_value<std::string>();
      if (section == "instance") {
        apply_instance(cfg, key, v);
      } else if (section == "uncertainty") {
        apply_uncertainty(cfg, key, v);
      } else if (section == "colony") {
        apply_colony(cfg, key, v);
      } else if (section == "search") {
        apply_search(cfg, key, v);
      } else {
        throw ValidationError(fmt::format("config: unknown section [{}]", section));
      }
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot read config '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace mpnd
