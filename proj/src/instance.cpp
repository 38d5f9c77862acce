#include "mpnd/instance.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mpnd/errors.hpp"
#include "mpnd/rng.hpp"

namespace mpnd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Whitespace split with '(' and ')' as standalone tokens.
std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : line) {
    if (ch == '(' || ch == ')') {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
      out.emplace_back(1, ch);
    } else if (ch == ' ' || ch == '\t' || ch == '\r') {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

double parse_number(const std::string& token, std::size_t line, std::string_view what) {
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size() || !std::isfinite(value)) {
    throw ParseError(line, fmt::format("expected a number for {}, got '{}'", what, token));
  }
  return value;
}

std::size_t parse_count(const std::string& token, std::size_t line, std::string_view what) {
  const double value = parse_number(token, line, what);
  if (value < 0 || value != std::floor(value)) {
    throw ParseError(line, fmt::format("expected a non-negative integer for {}, got '{}'", what,
                                       token));
  }
  return static_cast<std::size_t>(value);
}

void expect_token(const std::vector<std::string>& tokens, std::size_t i, std::string_view want,
                  std::size_t line) {
  if (i >= tokens.size() || tokens[i] != want) {
    throw ParseError(line, fmt::format("expected '{}' at token {}", want, i + 1));
  }
}

enum class Section { kNone, kNodes, kLinks, kDemands, kSkip };

class SndlibReader {
 public:
  BaseNetwork read(std::istream& in) {
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const std::string_view text = trim(raw);
      if (text.empty() || text.front() == '#' || text.front() == '?') continue;
      const auto tokens = tokenize(text);
      switch (section_) {
        case Section::kNone:
          open_section(tokens, line);
          break;
        case Section::kSkip:
          skip_depth_ += depth_delta(tokens);
          if (skip_depth_ <= 0) section_ = Section::kNone;
          break;
        default:
          if (tokens.size() == 1 && tokens[0] == ")") {
            section_ = Section::kNone;
          } else if (section_ == Section::kNodes) {
            read_node(tokens, line);
          } else if (section_ == Section::kLinks) {
            read_link(tokens, line);
          } else {
            read_demand(tokens, line);
          }
      }
    }
    if (section_ != Section::kNone) {
      throw ParseError(line, "unterminated section at end of input");
    }
    if (!seen_nodes_) throw ParseError(0, "missing NODES section");
    if (!seen_links_) throw ParseError(0, "missing LINKS section");
    if (!seen_demands_) throw ParseError(0, "missing DEMANDS section");
    if (net_.commodities.empty()) throw ValidationError("no demands in DEMANDS section");
    return std::move(net_);
  }

 private:
  static int depth_delta(const std::vector<std::string>& tokens) {
    int delta = 0;
    for (const auto& t : tokens) {
      if (t == "(") ++delta;
      if (t == ")") --delta;
    }
    return delta;
  }

  void open_section(const std::vector<std::string>& tokens, std::size_t line) {
    if (tokens.size() < 2 || tokens[1] != "(") {
      throw ParseError(line, fmt::format("unexpected text '{}' outside a section", tokens[0]));
    }
    const std::string& name = tokens[0];
    auto enter = [&](Section s, bool& seen) {
      if (seen) throw ParseError(line, fmt::format("duplicate {} section", name));
      if (tokens.size() != 2) throw ParseError(line, fmt::format("malformed {} header", name));
      seen = true;
      section_ = s;
    };
    if (name == "NODES") {
      enter(Section::kNodes, seen_nodes_);
    } else if (name == "LINKS") {
      enter(Section::kLinks, seen_links_);
    } else if (name == "DEMANDS") {
      enter(Section::kDemands, seen_demands_);
    } else {
      skip_depth_ = depth_delta(tokens);
      section_ = skip_depth_ > 0 ? Section::kSkip : Section::kNone;
    }
  }

  VertexIndex endpoint(const std::string& id, std::size_t line, std::string_view owner) {
    const auto it = vertex_index_.find(id);
    if (it == vertex_index_.end()) {
      throw ParseError(line, fmt::format("unknown endpoint '{}' in {}", id, owner));
    }
    return it->second;
  }

  void read_node(const std::vector<std::string>& tokens, std::size_t line) {
    const std::string& id = tokens[0];
    if (tokens.size() != 1) {
      if (tokens.size() != 5) throw ParseError(line, fmt::format("malformed node '{}'", id));
      expect_token(tokens, 1, "(", line);
      expect_token(tokens, 4, ")", line);
      parse_number(tokens[2], line, "longitude");
      parse_number(tokens[3], line, "latitude");
    }
    if (!vertex_index_.emplace(id, net_.vertices.size()).second) {
      throw ParseError(line, fmt::format("duplicate node id '{}'", id));
    }
    net_.vertices.push_back(id);
  }

  void read_link(const std::vector<std::string>& tokens, std::size_t line) {
    // id ( a b ) pre_cap pre_cost routing_cost setup_cost ( {cap cost}* )
    const std::string& id = tokens[0];
    if (tokens.size() < 11) throw ParseError(line, fmt::format("malformed link '{}'", id));
    expect_token(tokens, 1, "(", line);
    expect_token(tokens, 4, ")", line);
    expect_token(tokens, 9, "(", line);
    if (tokens.back() != ")") throw ParseError(line, fmt::format("malformed link '{}'", id));
    if (!link_ids_.emplace(id).second) {
      throw ParseError(line, fmt::format("duplicate link id '{}'", id));
    }
    Edge edge;
    edge.id = id;
    edge.u = endpoint(tokens[2], line, "link " + id);
    edge.v = endpoint(tokens[3], line, "link " + id);
    if (edge.u == edge.v) throw ParseError(line, fmt::format("link '{}' is a self-loop", id));
    const double pre_capacity = parse_number(tokens[5], line, "pre-installed capacity");
    const double pre_cost = parse_number(tokens[6], line, "pre-installed capacity cost");
    parse_number(tokens[7], line, "routing cost");
    parse_number(tokens[8], line, "setup cost");
    const std::size_t module_tokens = tokens.size() - 11;
    if (module_tokens % 2 != 0) {
      throw ParseError(line, fmt::format("link '{}' has an unpaired module entry", id));
    }
    if (module_tokens >= 2) {
      // The model has a single module type: the first listed module wins.
      edge.module_capacity = parse_number(tokens[10], line, "module capacity");
      edge.module_cost = parse_number(tokens[11], line, "module cost");
    } else {
      edge.module_capacity = pre_capacity;
      edge.module_cost = pre_cost;
    }
    if (!(edge.module_capacity > 0) || !(edge.module_cost > 0)) {
      throw ParseError(line, fmt::format("link '{}' has no module with positive capacity and cost",
                                         id));
    }
    net_.edges.push_back(std::move(edge));
  }

  void read_demand(const std::vector<std::string>& tokens, std::size_t line) {
    // id ( a b ) routing_unit value [max_path_length]
    const std::string& id = tokens[0];
    if (tokens.size() != 7 && tokens.size() != 8) {
      throw ParseError(line, fmt::format("malformed demand '{}'", id));
    }
    expect_token(tokens, 1, "(", line);
    expect_token(tokens, 4, ")", line);
    if (!demand_ids_.emplace(id).second) {
      throw ParseError(line, fmt::format("duplicate demand id '{}'", id));
    }
    Commodity c;
    c.id = id;
    c.source = endpoint(tokens[2], line, "demand " + id);
    c.target = endpoint(tokens[3], line, "demand " + id);
    if (c.source == c.target) {
      throw ParseError(line, fmt::format("demand '{}' has identical endpoints", id));
    }
    parse_number(tokens[5], line, "routing unit");
    c.demand = parse_number(tokens[6], line, "demand value");
    if (!(c.demand > 0)) {
      throw ValidationError(fmt::format("line {}: demand '{}' has non-positive value", line, id));
    }
    net_.commodities.push_back(std::move(c));
  }

  BaseNetwork net_;
  Section section_ = Section::kNone;
  int skip_depth_ = 0;
  bool seen_nodes_ = false;
  bool seen_links_ = false;
  bool seen_demands_ = false;
  std::unordered_map<std::string, VertexIndex> vertex_index_;
  std::unordered_set<std::string> link_ids_;
  std::unordered_set<std::string> demand_ids_;
};

// Best-first enumeration of simple paths. Labels are ordered by an
// admissible estimate (prefix weight + unrestricted distance to target) and
// then by the edge sequence, so complete paths pop in (weight, lexicographic)
// order.
struct Label {
  double priority = 0.0;
  double weight = 0.0;
  VertexIndex at = 0;
  Path edges;
  std::vector<char> visited;
};

struct LabelAfter {
  bool operator()(const Label& a, const Label& b) const {
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.edges > b.edges;
  }
};

using Adjacency = std::vector<std::vector<std::pair<EdgeIndex, VertexIndex>>>;

Adjacency build_adjacency(const BaseNetwork& base) {
  Adjacency adj(base.vertices.size());
  for (EdgeIndex e = 0; e < base.edges.size(); ++e) {
    adj[base.edges[e].u].emplace_back(e, base.edges[e].v);
    adj[base.edges[e].v].emplace_back(e, base.edges[e].u);
  }
  return adj;
}

std::vector<double> distances_to(const Adjacency& adj, VertexIndex target,
                                 std::span<const double> weight) {
  std::vector<double> dist(adj.size(), kInf);
  using Item = std::pair<double, VertexIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[target] = 0.0;
  queue.emplace(0.0, target);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (const auto& [e, w] : adj[v]) {
      const double nd = d + weight[e];
      if (nd < dist[w]) {
        dist[w] = nd;
        queue.emplace(nd, w);
      }
    }
  }
  return dist;
}

double admissible(double weight, double remaining) {
  const double estimate = weight + remaining;
  return estimate - 1e-9 * (1.0 + std::abs(estimate));
}

std::vector<Path> k_shortest(const Adjacency& adj, VertexIndex source, VertexIndex target,
                             std::size_t k, std::span<const double> weight,
                             const std::vector<double>& to_target) {
  std::vector<Path> out;
  std::priority_queue<Label, std::vector<Label>, LabelAfter> open;
  Label start;
  start.at = source;
  start.visited.assign(adj.size(), 0);
  start.visited[source] = 1;
  start.priority = admissible(0.0, to_target[source]);
  open.push(std::move(start));
  while (!open.empty() && out.size() < k) {
    Label label = open.top();
    open.pop();
    if (label.at == target) {
      out.push_back(std::move(label.edges));
      continue;
    }
    for (const auto& [e, w] : adj[label.at]) {
      if (label.visited[w] || to_target[w] == kInf) continue;
      Label next;
      next.weight = label.weight + weight[e];
      next.at = w;
      next.edges = label.edges;
      next.edges.push_back(e);
      next.visited = label.visited;
      next.visited[w] = 1;
      next.priority = w == target ? next.weight : admissible(next.weight, to_target[w]);
      open.push(std::move(next));
    }
  }
  return out;
}

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

void check_token(const std::string& id, std::string_view what) {
  if (id.empty() || id.find_first_of(" \t\r\n") != std::string::npos || id.front() == '#' ||
      id.front() == '[') {
    throw ValidationError(fmt::format("{} id '{}' cannot be written to the instance format", what,
                                      id));
  }
}

}  // namespace

std::optional<VertexIndex> BaseNetwork::find_vertex(std::string_view id) const {
  for (VertexIndex v = 0; v < vertices.size(); ++v) {
    if (vertices[v] == id) return v;
  }
  return std::nullopt;
}

std::size_t Instance::max_paths() const {
  std::size_t best = 0;
  for (const auto& p : paths) best = std::max(best, p.size());
  return best;
}

double Instance::path_cost(CommodityIndex c, std::size_t p, PeriodIndex t) const {
  double sum = 0.0;
  for (EdgeIndex e : paths[c][p]) sum += cost[e][t];
  return sum;
}

bool Instance::path_uses(CommodityIndex c, std::size_t p, EdgeIndex e) const {
  const Path& path = paths[c][p];
  return std::find(path.begin(), path.end(), e) != path.end();
}

void GrowthConfig::check() const {
  if (periods < 1) throw ValidationError("growth: periods must be >= 1");
  if (!(demand_growth >= 1.0) || !std::isfinite(demand_growth)) {
    throw ValidationError("growth: demand growth factor must be >= 1");
  }
  if (!(cost_discount > 0.0 && cost_discount <= 1.0)) {
    throw ValidationError("growth: cost discount factor must lie in (0, 1]");
  }
  if (paths_per_commodity < 1) throw ValidationError("growth: paths per commodity must be >= 1");
  if (!(jitter >= 0.0 && jitter < 1.0)) throw ValidationError("growth: jitter must lie in [0, 1)");
  if (phi && !(*phi > 0.0 && std::isfinite(*phi))) {
    throw ValidationError("growth: module size must be positive");
  }
}

BaseNetwork parse_sndlib(std::istream& in) { return SndlibReader().read(in); }

BaseNetwork parse_sndlib(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_sndlib(in);
}

bool looks_like_sndlib(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    const auto t = trim(raw);
    if (t.empty() || t.front() == '#' || t.front() == '?') continue;
    if (t.front() == '[') return false;
    const auto tokens = tokenize(t);
    if (tokens.size() >= 2 && tokens[1] == "(") return true;
  }
  return false;
}

std::vector<double> edge_weights(const BaseNetwork& base, PathWeight weight) {
  std::vector<double> w(base.edges.size(), 1.0);
  if (weight == PathWeight::kModuleCost) {
    for (EdgeIndex e = 0; e < base.edges.size(); ++e) w[e] = base.edges[e].module_cost;
  }
  return w;
}

std::vector<std::vector<Path>> enumerate_paths(const BaseNetwork& base, std::size_t k,
                                               std::span<const double> weight) {
  if (k < 1) throw ValidationError("enumerate_paths: k must be >= 1");
  if (weight.size() != base.edges.size()) {
    throw ValidationError("enumerate_paths: one weight per edge required");
  }
  for (double w : weight) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("enumerate_paths: weights must be finite and non-negative");
    }
  }
  const Adjacency adj = build_adjacency(base);
  std::map<VertexIndex, std::vector<double>> to_target;
  std::vector<std::vector<Path>> out;
  out.reserve(base.commodities.size());
  for (const Commodity& c : base.commodities) {
    auto it = to_target.find(c.target);
    if (it == to_target.end()) {
      it = to_target.emplace(c.target, distances_to(adj, c.target, weight)).first;
    }
    if (it->second[c.source] == kInf) {
      throw ValidationError(
          fmt::format("commodity '{}' is disconnected: no path from '{}' to '{}'", c.id,
                      base.vertices[c.source], base.vertices[c.target]));
    }
    out.push_back(k_shortest(adj, c.source, c.target, k, weight, it->second));
  }
  return out;
}

Instance expand_multiperiod(const BaseNetwork& base, const GrowthConfig& cfg) {
  cfg.check();
  Instance inst;
  inst.base = base;
  inst.periods = cfg.periods;
  if (cfg.phi) {
    inst.phi = *cfg.phi;
  } else if (!base.edges.empty()) {
    inst.phi = base.edges.front().module_capacity;
  } else {
    throw ValidationError("expand_multiperiod: no links to take the module size from");
  }
  Rng rng(cfg.seed);
  inst.demand.assign(base.commodities.size(), std::vector<double>(cfg.periods, 0.0));
  for (CommodityIndex c = 0; c < base.commodities.size(); ++c) {
    inst.demand[c][0] = base.commodities[c].demand;
    for (PeriodIndex t = 1; t < cfg.periods; ++t) {
      // Jitter perturbs the growth increment, never the level, so demands stay
      // non-decreasing.
      const double increment =
          (cfg.demand_growth - 1.0) * (1.0 + cfg.jitter * rng.symmetric());
      inst.demand[c][t] = inst.demand[c][t - 1] * (1.0 + increment);
    }
  }
  inst.cost.assign(base.edges.size(), std::vector<double>(cfg.periods, 0.0));
  for (EdgeIndex e = 0; e < base.edges.size(); ++e) {
    inst.cost[e][0] = base.edges[e].module_cost;
    for (PeriodIndex t = 1; t < cfg.periods; ++t) {
      inst.cost[e][t] = inst.cost[e][t - 1] * cfg.cost_discount;
    }
  }
  inst.paths = enumerate_paths(base, cfg.paths_per_commodity, edge_weights(base, cfg.weight));
  return inst;
}

std::vector<std::string> validate(const Instance& inst) {
  std::vector<std::string> out;
  const BaseNetwork& base = inst.base;
  const std::size_t nv = base.vertices.size();
  if (inst.periods < 1) out.push_back("periods must be >= 1");
  if (!(inst.phi > 0.0) || !std::isfinite(inst.phi)) out.push_back("module size must be positive");
  for (const Edge& e : base.edges) {
    if (e.u >= nv || e.v >= nv) out.push_back(fmt::format("edge endpoint missing: {}", e.id));
    if (e.u == e.v) out.push_back(fmt::format("self-loop edge: {}", e.id));
    if (!(e.module_cost > 0.0)) out.push_back(fmt::format("non-positive base cost: {}", e.id));
  }
  for (const Commodity& c : base.commodities) {
    if (c.source >= nv || c.target >= nv) {
      out.push_back(fmt::format("commodity endpoint missing: {}", c.id));
    }
    if (!(c.demand > 0.0)) out.push_back(fmt::format("non-positive base demand: {}", c.id));
  }
  if (inst.demand.size() != base.commodities.size() || inst.cost.size() != base.edges.size() ||
      inst.paths.size() != base.commodities.size()) {
    out.push_back("table sizes do not match the network");
    return out;
  }
  for (CommodityIndex c = 0; c < inst.demand.size(); ++c) {
    const auto& d = inst.demand[c];
    if (d.size() != inst.periods) {
      out.push_back(fmt::format("demand row length: {}", base.commodities[c].id));
      continue;
    }
    for (PeriodIndex t = 0; t < d.size(); ++t) {
      if (!(d[t] >= 0.0) || !std::isfinite(d[t])) {
        out.push_back(fmt::format("invalid demand: {}, t={}", base.commodities[c].id, t + 1));
      }
      if (t > 0 && d[t] < d[t - 1]) {
        out.push_back(fmt::format("demand decreasing: {}, t={}", base.commodities[c].id, t + 1));
      }
    }
  }
  for (EdgeIndex e = 0; e < inst.cost.size(); ++e) {
    const auto& g = inst.cost[e];
    if (g.size() != inst.periods) {
      out.push_back(fmt::format("cost row length: {}", base.edges[e].id));
      continue;
    }
    for (PeriodIndex t = 0; t < g.size(); ++t) {
      if (!(g[t] >= 0.0) || !std::isfinite(g[t])) {
        out.push_back(fmt::format("invalid cost: {}, t={}", base.edges[e].id, t + 1));
      }
      if (t > 0 && g[t] > g[t - 1]) {
        out.push_back(fmt::format("cost increasing: {}, t={}", base.edges[e].id, t + 1));
      }
    }
  }
  for (CommodityIndex c = 0; c < inst.paths.size(); ++c) {
    const Commodity& com = base.commodities[c];
    if (inst.paths[c].empty()) out.push_back(fmt::format("no paths: {}", com.id));
    for (std::size_t p = 0; p < inst.paths[c].size(); ++p) {
      const Path& path = inst.paths[c][p];
      std::vector<char> seen(nv, 0);
      VertexIndex at = com.source;
      bool ok = com.source < nv && com.target < nv && !path.empty();
      if (ok) seen[at] = 1;
      for (EdgeIndex e : path) {
        if (!ok) break;
        if (e >= base.edges.size()) {
          ok = false;
          break;
        }
        const Edge& edge = base.edges[e];
        if (edge.u == at) {
          at = edge.v;
        } else if (edge.v == at) {
          at = edge.u;
        } else {
          ok = false;
          break;
        }
        if (at >= nv || seen[at]) {
          ok = false;
          break;
        }
        seen[at] = 1;
      }
      if (!ok || at != com.target) {
        out.push_back(fmt::format("invalid path: {}, p={}", com.id, p + 1));
      }
    }
  }
  return out;
}

void write_instance(std::ostream& out, const Instance& inst) {
  const BaseNetwork& base = inst.base;
  out << "# multiperiod network design instance\n[meta]\n";
  if (!base.name.empty()) {
    check_token(base.name, "instance");
    out << "name " << base.name << '\n';
  }
  out << "periods " << inst.periods << '\n';
  out << "phi " << format_number(inst.phi) << '\n';
  for (const auto& v : base.vertices) {
    check_token(v, "vertex");
    out << "vertex " << v << '\n';
  }
  out << "[edges]\n# id u v module_capacity cost_t1 .. cost_tT\n";
  for (EdgeIndex e = 0; e < base.edges.size(); ++e) {
    const Edge& edge = base.edges[e];
    check_token(edge.id, "edge");
    out << edge.id << ' ' << base.vertices[edge.u] << ' ' << base.vertices[edge.v] << ' '
        << format_number(edge.module_capacity);
    for (double g : inst.cost[e]) out << ' ' << format_number(g);
    out << '\n';
  }
  out << "[demands]\n# id source target demand_t1 .. demand_tT\n";
  for (CommodityIndex c = 0; c < base.commodities.size(); ++c) {
    const Commodity& com = base.commodities[c];
    check_token(com.id, "commodity");
    out << com.id << ' ' << base.vertices[com.source] << ' ' << base.vertices[com.target];
    for (double d : inst.demand[c]) out << ' ' << format_number(d);
    out << '\n';
  }
  out << "[paths]\n# commodity edge_id ...\n";
  for (CommodityIndex c = 0; c < inst.paths.size(); ++c) {
    for (const Path& path : inst.paths[c]) {
      out << base.commodities[c].id;
      for (EdgeIndex e : path) out << ' ' << base.edges[e].id;
      out << '\n';
    }
  }
}

std::string write_instance(const Instance& inst) {
  std::ostringstream out;
  write_instance(out, inst);
  return out.str();
}

Instance read_instance(std::istream& in) {
  Instance inst;
  BaseNetwork& base = inst.base;
  std::unordered_map<std::string, VertexIndex> vertex_index;
  std::unordered_map<std::string, EdgeIndex> edge_index;
  std::unordered_map<std::string, CommodityIndex> commodity_index;
  bool have_periods = false;
  bool have_phi = false;
  std::string section;
  std::string raw;
  std::size_t line = 0;
  auto vertex = [&](const std::string& id) {
    const auto it = vertex_index.find(id);
    if (it == vertex_index.end()) throw ParseError(line, fmt::format("unknown vertex '{}'", id));
    return it->second;
  };
  auto need_periods = [&] {
    if (!have_periods) throw ParseError(line, "periods must be declared in [meta] first");
  };
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ParseError(line, "malformed section header");
      section = std::string(text.substr(1, text.size() - 2));
      if (section != "meta" && section != "edges" && section != "demands" && section != "paths") {
        throw ParseError(line, fmt::format("unknown section [{}]", section));
      }
      continue;
    }
    std::istringstream fields{std::string(text)};
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (section.empty()) throw ParseError(line, "record outside a section");
    if (section == "meta") {
      if (tokens.size() != 2) throw ParseError(line, "meta records are 'key value'");
      if (tokens[0] == "name") {
        base.name = tokens[1];
      } else if (tokens[0] == "periods") {
        inst.periods = parse_count(tokens[1], line, "periods");
        if (inst.periods < 1) throw ParseError(line, "periods must be >= 1");
        have_periods = true;
      } else if (tokens[0] == "phi") {
        inst.phi = parse_number(tokens[1], line, "phi");
        have_phi = true;
      } else if (tokens[0] == "vertex") {
        if (!vertex_index.emplace(tokens[1], base.vertices.size()).second) {
          throw ParseError(line, fmt::format("duplicate vertex '{}'", tokens[1]));
        }
        base.vertices.push_back(tokens[1]);
      } else {
        throw ParseError(line, fmt::format("unknown meta key '{}'", tokens[0]));
      }
    } else if (section == "edges") {
      need_periods();
      if (tokens.size() != 4 + inst.periods) {
        throw ParseError(line, fmt::format("edge record needs {} fields", 4 + inst.periods));
      }
      Edge edge;
      edge.id = tokens[0];
      edge.u = vertex(tokens[1]);
      edge.v = vertex(tokens[2]);
      edge.module_capacity = parse_number(tokens[3], line, "module capacity");
      std::vector<double> g(inst.periods);
      for (PeriodIndex t = 0; t < inst.periods; ++t) g[t] = parse_number(tokens[4 + t], line, "cost");
      edge.module_cost = g[0];
      if (!edge_index.emplace(edge.id, base.edges.size()).second) {
        throw ParseError(line, fmt::format("duplicate edge '{}'", edge.id));
      }
      base.edges.push_back(std::move(edge));
      inst.cost.push_back(std::move(g));
    } else if (section == "demands") {
      need_periods();
      if (tokens.size() != 3 + inst.periods) {
        throw ParseError(line, fmt::format("demand record needs {} fields", 3 + inst.periods));
      }
      Commodity com;
      com.id = tokens[0];
      com.source = vertex(tokens[1]);
      com.target = vertex(tokens[2]);
      std::vector<double> d(inst.periods);
      for (PeriodIndex t = 0; t < inst.periods; ++t) {
        d[t] = parse_number(tokens[3 + t], line, "demand");
      }
      com.demand = d[0];
      if (!commodity_index.emplace(com.id, base.commodities.size()).second) {
        throw ParseError(line, fmt::format("duplicate demand '{}'", com.id));
      }
      base.commodities.push_back(std::move(com));
      inst.demand.push_back(std::move(d));
      inst.paths.emplace_back();
    } else {
      const auto it = commodity_index.find(tokens[0]);
      if (it == commodity_index.end()) {
        throw ParseError(line, fmt::format("path for unknown demand '{}'", tokens[0]));
      }
      Path path;
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto e = edge_index.find(tokens[i]);
        if (e == edge_index.end()) {
          throw ParseError(line, fmt::format("unknown edge '{}' in path", tokens[i]));
        }
        path.push_back(e->second);
      }
      if (path.empty()) throw ParseError(line, "empty path");
      inst.paths[it->second].push_back(std::move(path));
    }
  }
  if (!have_periods) throw ParseError(0, "missing periods in [meta]");
  if (!have_phi) throw ParseError(0, "missing phi in [meta]");
  return inst;
}

Instance read_instance(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_instance(in);
}

}  // namespace mpnd
