#include "mpnd/reformulate.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>

#include "mpnd/errors.hpp"

namespace mpnd {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string band_label(int k) { return k < 0 ? fmt::format("m{}", -k) : fmt::format("{}", k); }

// Accumulates one linear expression and wraps it well under the 510
// character line limit of the format.
class Expr {
 public:
  void add(double coef, const std::string& var) {
    if (coef == 0.0) return;
    std::string term;
    if (first_) {
      term = coef == 1.0 ? var : coef == -1.0 ? "- " + var : num(coef) + " " + var;
    } else if (coef < 0) {
      term = coef == -1.0 ? "- " + var : "- " + num(-coef) + " " + var;
    } else {
      term = coef == 1.0 ? "+ " + var : "+ " + num(coef) + " " + var;
    }
    if (width_ + term.size() > 200) {
      out_ += "\n  ";
      width_ = 2;
    } else if (!first_) {
      out_ += ' ';
      ++width_;
    }
    out_ += term;
    width_ += term.size();
    first_ = false;
  }
  const std::string& raw() const { return out_; }

 private:
  std::string out_;
  std::size_t width_ = 0;
  bool first_ = true;
};

std::vector<int> emitted_bands(const MultibandSet& mb, const RobustOptions& options) {
  std::vector<int> bands;
  for (int k = mb.bands.k_plus; k >= mb.bands.k_minus; --k) {
    if (k == 0) continue;
    if (k < 0 && !options.all_bands) continue;
    bands.push_back(k);
  }
  return bands;
}

void write_row(std::ostringstream& out, const std::string& name, const Expr& expr,
               std::string_view sense, double rhs) {
  out << ' ' << name << ": " << expr.raw() << ' ' << sense << ' ' << num(rhs) << '\n';
}

struct Builder {
  const Instance& inst;
  std::ostringstream out;
  ModelStats stats;

  explicit Builder(const Instance& instance) : inst(instance) {
    stats.y = inst.num_edges() * inst.periods;
    for (CommodityIndex c = 0; c < inst.num_commodities(); ++c) {
      stats.x += inst.num_paths(c) * inst.periods;
    }
  }

  void header(std::string_view what) {
    out << "\\ " << what << " multiperiod network design";
    if (!inst.base.name.empty()) out << ": " << inst.base.name;
    out << "\n\\ " << inst.num_edges() << " edges, " << inst.num_commodities()
        << " commodities, " << inst.periods << " periods, module size " << num(inst.phi) << "\n";
    out << "Minimize\n obj: ";
    Expr obj;
    for (EdgeIndex e = 0; e < inst.num_edges(); ++e) {
      for (PeriodIndex t = 0; t < inst.periods; ++t) obj.add(inst.cost[e][t], y_name(e, t));
    }
    out << obj.raw() << "\nSubject To\n";
  }

  // Nominal load of e at t minus installed cumulative capacity.
  Expr capacity(EdgeIndex e, PeriodIndex t) {
    Expr row;
    for (CommodityIndex c = 0; c < inst.num_commodities(); ++c) {
      for (std::size_t p = 0; p < inst.num_paths(c); ++p) {
        if (inst.path_uses(c, p, e)) row.add(inst.demand[c][t], x_name(c, p, t));
      }
    }
    return row;
  }

  void close_capacity(Expr& row, EdgeIndex e, PeriodIndex t) {
    for (PeriodIndex s = 0; s <= t; ++s) row.add(-inst.phi, y_name(e, s));
    write_row(out, fmt::format("cap_e{}_t{}", e + 1, t + 1), row, "<=", 0.0);
    ++stats.capacity_rows;
  }

  void assignments() {
    for (CommodityIndex c = 0; c < inst.num_commodities(); ++c) {
      for (PeriodIndex t = 0; t < inst.periods; ++t) {
        Expr row;
        for (std::size_t p = 0; p < inst.num_paths(c); ++p) row.add(1.0, x_name(c, p, t));
        write_row(out, fmt::format("assign_c{}_t{}", c + 1, t + 1), row, "=", 1.0);
        ++stats.assignment_rows;
      }
    }
  }

  void integrality() {
    out << "Generals\n";
    for (EdgeIndex e = 0; e < inst.num_edges(); ++e) {
      for (PeriodIndex t = 0; t < inst.periods; ++t) out << ' ' << y_name(e, t) << '\n';
    }
    out << "Binaries\n";
    for (CommodityIndex c = 0; c < inst.num_commodities(); ++c) {
      for (std::size_t p = 0; p < inst.num_paths(c); ++p) {
        for (PeriodIndex t = 0; t < inst.periods; ++t) out << ' ' << x_name(c, p, t) << '\n';
      }
    }
    out << "End\n";
  }
};

}  // namespace

std::string x_name(CommodityIndex c, std::size_t p, PeriodIndex t) {
  return fmt::format("x_c{}_p{}_t{}", c + 1, p + 1, t + 1);
}

std::string y_name(EdgeIndex e, PeriodIndex t) { return fmt::format("y_e{}_t{}", e + 1, t + 1); }

std::string w_name(EdgeIndex e, PeriodIndex t, int k) {
  return fmt::format("w_e{}_t{}_k{}", e + 1, t + 1, band_label(k));
}

std::string z_name(EdgeIndex e, CommodityIndex c, std::size_t p, PeriodIndex t) {
  return fmt::format("z_e{}_c{}_p{}_t{}", e + 1, c + 1, p + 1, t + 1);
}

std::size_t candidate_crossings(const Instance& instance, EdgeIndex e) {
  std::size_t n = 0;
  for (CommodityIndex c = 0; c < instance.num_commodities(); ++c) {
    for (std::size_t p = 0; p < instance.num_paths(c); ++p) n += instance.path_uses(c, p, e) ? 1 : 0;
  }
  return n;
}

EmittedModel emit_nominal(const Instance& instance) {
  Builder b(instance);
  b.header("nominal");
  for (EdgeIndex e = 0; e < instance.num_edges(); ++e) {
    for (PeriodIndex t = 0; t < instance.periods; ++t) {
      Expr row = b.capacity(e, t);
      b.close_capacity(row, e, t);
    }
  }
  b.assignments();
  b.integrality();
  return {b.out.str(), b.stats};
}

EmittedModel emit_robust(const Instance& instance, const MultibandSet& mb,
                         const RobustOptions& options) {
  Builder b(instance);
  const auto bands = emitted_bands(mb, options);
  b.stats.bands = bands.size();
  b.header("robust");
  std::vector<std::size_t> crossings(instance.num_edges());
  for (EdgeIndex e = 0; e < instance.num_edges(); ++e) {
    crossings[e] = candidate_crossings(instance, e);
    const Profile theta = profile(mb.rule, crossings[e]);
    for (PeriodIndex t = 0; t < instance.periods; ++t) {
      Expr row = b.capacity(e, t);
      for (int k : bands) row.add(static_cast<double>(theta.at(k)), w_name(e, t, k));
      for (CommodityIndex c = 0; c < instance.num_commodities() && !bands.empty(); ++c) {
        for (std::size_t p = 0; p < instance.num_paths(c); ++p) {
          if (!instance.path_uses(c, p, e)) continue;
          row.add(1.0, z_name(e, c, p, t));
          ++b.stats.z;
        }
      }
      b.close_capacity(row, e, t);
    }
  }
  for (EdgeIndex e = 0; e < instance.num_edges(); ++e) {
    for (PeriodIndex t = 0; t < instance.periods; ++t) {
      for (CommodityIndex c = 0; c < instance.num_commodities(); ++c) {
        for (std::size_t p = 0; p < instance.num_paths(c); ++p) {
          if (!instance.path_uses(c, p, e)) continue;
          for (int k : bands) {
            Expr row;
            row.add(1.0, w_name(e, t, k));
            row.add(1.0, z_name(e, c, p, t));
            row.add(-mb.bands.at(c, t, k), x_name(c, p, t));
            write_row(b.out,
                      fmt::format("dual_e{}_c{}_p{}_t{}_k{}", e + 1, c + 1, p + 1, t + 1,
                                  band_label(k)),
                      row, ">=", 0.0);
            ++b.stats.dual_rows;
          }
        }
      }
    }
  }
  b.assignments();
  b.out << "Bounds\n";
  for (EdgeIndex e = 0; e < instance.num_edges(); ++e) {
    for (PeriodIndex t = 0; t < instance.periods; ++t) {
      for (int k : bands) {
        b.out << ' ' << w_name(e, t, k) << " free\n";
        ++b.stats.w;
      }
    }
  }
  b.integrality();
  return {b.out.str(), b.stats};
}

ModelStats expected_nominal_stats(const Instance& instance) {
  ModelStats s;
  for (CommodityIndex c = 0; c < instance.num_commodities(); ++c) {
    s.x += instance.num_paths(c) * instance.periods;
  }
  s.y = instance.num_edges() * instance.periods;
  s.capacity_rows = instance.num_edges() * instance.periods;
  s.assignment_rows = instance.num_commodities() * instance.periods;
  return s;
}

ModelStats expected_robust_stats(const Instance& instance, const MultibandSet& mb,
                                 const RobustOptions& options) {
  ModelStats s = expected_nominal_stats(instance);
  s.bands = emitted_bands(mb, options).size();
  std::size_t crossings = 0;
  for (EdgeIndex e = 0; e < instance.num_edges(); ++e) crossings += candidate_crossings(instance, e);
  s.w = instance.num_edges() * instance.periods * s.bands;
  s.z = s.bands == 0 ? 0 : instance.periods * crossings;
  s.dual_rows = s.z * s.bands;
  return s;
}

std::set<std::string> LpModel::variables() const {
  std::set<std::string> out(free_vars.begin(), free_vars.end());
  for (const auto& [v, c] : objective) out.insert(v);
  for (const auto& row : rows) {
    for (const auto& [v, c] : row.terms) out.insert(v);
  }
  for (const auto& [v, b] : bounds) out.insert(v);
  out.insert(generals.begin(), generals.end());
  out.insert(binaries.begin(), binaries.end());
  return out;
}

namespace {

enum class LpSection { kNone, kObjective, kConstraints, kBounds, kGenerals, kBinaries, kEnd };

bool is_number(const std::string& s, double& value) {
  char* end = nullptr;
  value = std::strtod(s.c_str(), &end);
  return !s.empty() && end == s.c_str() + s.size();
}

std::string lower(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

// Parses "[name:] [+|-] [coef] var ... [sense rhs]" token lists.
struct ExprParser {
  std::size_t line = 0;
  std::vector<std::pair<std::string, double>> terms;
  std::string sense;
  double rhs = 0.0;
  double rhs_sign = 1.0;
  double sign = 1.0;
  double coef = 1.0;
  bool have_coef = false;
  bool want_rhs = false;
  bool done = false;
  bool open_operand = false;  // sign or coefficient waiting for a variable

  void finish() const {
    if (open_operand) throw ParseError(line, "expression ends with an operator or coefficient");
  }

  void feed(const std::string& tok) {
    if (done) throw ParseError(line, fmt::format("unexpected '{}' after right-hand side", tok));
    if (want_rhs) {
      if (tok == "+" || tok == "-") {
        rhs_sign = tok == "-" ? -rhs_sign : rhs_sign;
        return;
      }
      double v = 0.0;
      if (!is_number(tok, v)) throw ParseError(line, fmt::format("bad right-hand side '{}'", tok));
      rhs = rhs_sign * v;
      done = true;
      return;
    }
    if (tok == "+" || tok == "-") {
      if (have_coef) throw ParseError(line, "operator after a coefficient");
      sign = tok == "-" ? -1.0 : 1.0;
      open_operand = true;
      return;
    }
    if (tok == "<=" || tok == ">=" || tok == "=" || tok == "=<" || tok == "=>") {
      finish();
      sense = tok == "=<" ? "<=" : tok == "=>" ? ">=" : tok;
      want_rhs = true;
      return;
    }
    double v = 0.0;
    if (is_number(tok, v)) {
      coef = v;
      have_coef = true;
      open_operand = true;
      return;
    }
    terms.emplace_back(tok, sign * coef);
    sign = 1.0;
    coef = 1.0;
    have_coef = false;
    open_operand = false;
  }
};

std::vector<std::string> split_tokens(const std::string& text) {
  // Operators may touch their operands; separate them first.
  std::string spaced;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '<' || ch == '>' || ch == '=') {
      std::string op(1, ch);
      if (i + 1 < text.size() && (text[i + 1] == '=' || text[i + 1] == '<' || text[i + 1] == '>')) {
        op += text[++i];
      }
      spaced += " " + op + " ";
    } else if ((ch == '+' || ch == '-') &&
               (i == 0 || !(std::tolower(static_cast<unsigned char>(text[i - 1])) == 'e' && i >= 2 &&
                            std::isdigit(static_cast<unsigned char>(text[i - 2]))))) {
      spaced += std::string(" ") + ch + " ";
    } else {
      spaced += ch;
    }
  }
  std::istringstream in(spaced);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

// Bounds take signed constants: "-" "2" becomes "-2".
std::vector<std::string> join_signs(std::vector<std::string> toks) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    double v = 0.0;
    if ((toks[i] == "+" || toks[i] == "-") && i + 1 < toks.size() && is_number(toks[i + 1], v)) {
      out.push_back(toks[i] + toks[i + 1]);
      ++i;
    } else {
      out.push_back(toks[i]);
    }
  }
  return out;
}

}  // namespace

LpModel parse_lp(std::string_view text) {
  LpModel model;
  LpSection section = LpSection::kNone;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  std::optional<ExprParser> pending;
  std::string pending_name;
  auto flush = [&] {
    if (!pending) return;
    pending->finish();
    if (section == LpSection::kObjective) {
      model.objective = pending->terms;
    } else {
      if (pending->sense.empty() || !pending->done) {
        throw ParseError(pending->line, fmt::format("row '{}' has no right-hand side", pending_name));
      }
      model.rows.push_back({pending_name, pending->terms, pending->sense, pending->rhs});
    }
    pending.reset();
  };
  while (std::getline(in, raw)) {
    ++line;
    const auto bs = raw.find('\\');
    if (bs != std::string::npos) raw.erase(bs);
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const std::string body = raw.substr(first);
    const std::string key = lower(body.substr(0, body.find_last_not_of(" \t\r") + 1));
    LpSection next = section;
    if (key == "minimize" || key == "minimum" || key == "min") {
      next = LpSection::kObjective;
      model.minimize = true;
    } else if (key == "maximize" || key == "maximum" || key == "max") {
      next = LpSection::kObjective;
      model.minimize = false;
    } else if (key == "subject to" || key == "such that" || key == "st" || key == "s.t.") {
      next = LpSection::kConstraints;
    } else if (key == "bounds" || key == "bound") {
      next = LpSection::kBounds;
    } else if (key == "generals" || key == "general" || key == "gen") {
      next = LpSection::kGenerals;
    } else if (key == "binaries" || key == "binary" || key == "bin") {
      next = LpSection::kBinaries;
    } else if (key == "end") {
      next = LpSection::kEnd;
    }
    if (next != section || key == "end") {
      flush();
      section = next;
      continue;
    }
    switch (section) {
      case LpSection::kNone:
      case LpSection::kEnd:
        throw ParseError(line, "text outside a model section");
      case LpSection::kObjective:
      case LpSection::kConstraints: {
        std::string rest = body;
        const auto colon = rest.find(':');
        const bool starts_row = colon != std::string::npos;
        if (starts_row || !pending) {
          flush();
          pending.emplace();
          pending->line = line;
          pending_name = starts_row ? rest.substr(0, colon) : "";
          const auto a = pending_name.find_first_not_of(" \t");
          const auto b = pending_name.find_last_not_of(" \t");
          pending_name = a == std::string::npos ? "" : pending_name.substr(a, b - a + 1);
          if (starts_row) rest = rest.substr(colon + 1);
        }
        for (const auto& tok : split_tokens(rest)) {
          pending->line = line;
          pending->feed(tok);
        }
        break;
      }
      case LpSection::kBounds: {
        const auto toks = join_signs(split_tokens(body));
        if (toks.size() == 2 && lower(toks[1]) == "free") {
          model.free_vars.insert(toks[0]);
          break;
        }
        double lo = 0.0;
        double hi = 0.0;
        if (toks.size() == 5 && toks[1] == "<=" && toks[3] == "<=" && is_number(toks[0], lo) &&
            is_number(toks[4], hi)) {
          model.bounds[toks[2]] = {lo, hi};
          break;
        }
        double v = 0.0;
        if (toks.size() == 3 && is_number(toks[2], v)) {
          auto& b = model.bounds.try_emplace(toks[0], 0.0, HUGE_VAL).first->second;
          if (toks[1] == "<=") {
            b.second = v;
          } else if (toks[1] == ">=") {
            b.first = v;
          } else if (toks[1] == "=") {
            b = {v, v};
          } else {
            throw ParseError(line, "bad bound");
          }
          break;
        }
        throw ParseError(line, fmt::format("unsupported bound '{}'", body));
      }
      case LpSection::kGenerals:
      case LpSection::kBinaries: {
        std::istringstream names(body);
        for (std::string name; names >> name;) {
          (section == LpSection::kGenerals ? model.generals : model.binaries).insert(name);
        }
        break;
      }
    }
  }
  flush();
  if (section != LpSection::kEnd) throw ParseError(line, "missing End");
  return model;
}

ModelStats count_model(const LpModel& model) {
  ModelStats s;
  std::set<std::string> bands;
  for (const auto& v : model.variables()) {
    if (v.rfind("x_", 0) == 0) ++s.x;
    if (v.rfind("y_", 0) == 0) ++s.y;
    if (v.rfind("z_", 0) == 0) ++s.z;
    if (v.rfind("w_", 0) == 0) {
      ++s.w;
      bands.insert(v.substr(v.rfind("_k")));
    }
  }
  s.bands = bands.size();
  for (const auto& row : model.rows) {
    if (row.name.rfind("cap_", 0) == 0) ++s.capacity_rows;
    if (row.name.rfind("assign_", 0) == 0) ++s.assignment_rows;
    if (row.name.rfind("dual_", 0) == 0) ++s.dual_rows;
  }
  return s;
}

}  // namespace mpnd
