#pragma once

// Exact scheduling analysis for abstract self-replicating systems.
//
// A system is a set of programs (translators A, copiers B, exporters E) and
// descriptions.  Each rule application (translate x, copy x, export x) is a
// subproblem.  A schedule is a sequence of steps; inside one step every
// program instance and every description is used by at most one subproblem.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace parcell::sched {

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Variant : std::uint8_t {
  Monolithic,
  SplitDescription,
  Redundant,
  Pipelined,
  TranslatorCopierOnly,
  Organism,
};

struct SystemSpec {
  Variant variant = Variant::SplitDescription;
  int n = 1;
  int m = 1;

  static SystemSpec monolithic() { return {Variant::Monolithic, 1, 1}; }
  static SystemSpec split() { return {Variant::SplitDescription, 1, 1}; }
  static SystemSpec redundant(int n) { return {Variant::Redundant, n, 1}; }
  static SystemSpec pipelined(int n) { return {Variant::Pipelined, n, 1}; }
  static SystemSpec translator_copier_only(int n) { return {Variant::TranslatorCopierOnly, n, 1}; }
  static SystemSpec organism(int n, int m) { return {Variant::Organism, n, m}; }

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

inline std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Monolithic: return "monolithic";
    case Variant::SplitDescription: return "split";
    case Variant::Redundant: return "redundant";
    case Variant::Pipelined: return "pipelined";
    case Variant::TranslatorCopierOnly: return "tco";
    case Variant::Organism: return "organism";
  }
  return "?";
}

inline std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "monolithic") return Variant::Monolithic;
  if (s == "split" || s == "split-description") return Variant::SplitDescription;
  if (s == "redundant") return Variant::Redundant;
  if (s == "pipelined") return Variant::Pipelined;
  if (s == "tco" || s == "translator-copier-only") return Variant::TranslatorCopierOnly;
  if (s == "organism") return Variant::Organism;
  return std::nullopt;
}

enum class Rule : std::uint8_t { Translate, Copy, Export };

inline constexpr char rule_letter(Rule r) {
  switch (r) {
    case Rule::Translate: return 'a';
    case Rule::Copy: return 'b';
    case Rule::Export: return 'e';
  }
  return '?';
}

/// One rule applied to one description; the program instance is chosen by
/// the schedule.
struct Subproblem {
  Rule rule = Rule::Translate;
  std::string description;

  /// Rule letter followed by the description, e.g. "ab0" (translate b0).
  std::string id() const { return std::string(1, rule_letter(rule)) + description; }

  friend bool operator==(const Subproblem&, const Subproblem&) = default;
};

struct ConstraintSet {
  std::set<std::string> mutex_resources;
  /// (before, after) index pairs into Problem::subproblems.
  std::vector<std::pair<std::size_t, std::size_t>> dependencies;
};

struct Problem {
  SystemSpec spec;
  std::vector<Subproblem> subproblems;  // sorted by id()
  ConstraintSet constraints;
  int translators = 1;
  int copiers = 1;
  int exporters = 0;

  int instances(Rule r) const {
    switch (r) {
      case Rule::Translate: return translators;
      case Rule::Copy: return copiers;
      case Rule::Export: return exporters;
    }
    return 0;
  }

  std::optional<std::size_t> find(Rule r, std::string_view description) const {
    for (std::size_t i = 0; i < subproblems.size(); ++i) {
      if (subproblems[i].rule == r && subproblems[i].description == description) return i;
    }
    return std::nullopt;
  }
};

/// Subproblem bound to a concrete program instance.
struct Assignment {
  std::size_t subproblem = 0;
  int instance = 0;
};

inline std::string program_resource(const Problem& p, Rule r, int instance) {
  std::string name(1, static_cast<char>(rule_letter(r) - 'a' + 'A'));
  if (p.instances(r) > 1) name += std::to_string(instance);
  return name;
}

inline std::string description_resource(std::string_view description) {
  return "phi(" + std::string(description) + ")";
}

/// Printed form of an assignment: program letter, instance (multi-instance
/// classes only) and description, e.g. "a0b1" or "ba".
inline std::string assignment_id(const Problem& p, const Assignment& a) {
  const Subproblem& s = p.subproblems.at(a.subproblem);
  std::string id(1, rule_letter(s.rule));
  if (p.instances(s.rule) > 1) id += std::to_string(a.instance);
  return id + s.description;
}

struct Schedule {
  std::vector<std::vector<Assignment>> steps;
  std::size_t makespan() const { return steps.size(); }
};

inline Problem generate_subproblems(const SystemSpec& spec) {
  if (spec.n < 1) throw ParameterError("n must be >= 1, got " + std::to_string(spec.n));
  if (spec.variant == Variant::Organism && spec.m < 1) {
    throw ParameterError("m must be >= 1, got " + std::to_string(spec.m));
  }

  Problem p;
  p.spec = spec;
  std::vector<std::string> descriptions;
  auto indexed = [&](char base, int count) {
    for (int i = 0; i < count; ++i) {
      descriptions.push_back(count > 1 ? std::string(1, base) + std::to_string(i) : std::string(1, base));
    }
  };

  switch (spec.variant) {
    case Variant::Monolithic:
      descriptions = {"abcd"};
      break;
    case Variant::SplitDescription:
      descriptions = {"a", "b", "c", "d"};
      break;
    case Variant::Redundant:
    case Variant::Pipelined:
    case Variant::Organism:
      indexed('a', spec.n);
      indexed('b', spec.n);
      descriptions.push_back("c");
      descriptions.push_back("d");
      p.translators = p.copiers = spec.n;
      break;
    case Variant::TranslatorCopierOnly:
      indexed('a', spec.n);
      indexed('b', spec.n);
      p.translators = p.copiers = spec.n;
      break;
  }
  if (spec.variant == Variant::Organism) p.exporters = spec.m;

  for (const auto& d : descriptions) {
    p.subproblems.push_back({Rule::Translate, d});
    p.subproblems.push_back({Rule::Copy, d});
    if (p.exporters > 0) p.subproblems.push_back({Rule::Export, d});
  }
  std::sort(p.subproblems.begin(), p.subproblems.end(),
            [](const Subproblem& x, const Subproblem& y) { return x.id() < y.id(); });

  for (Rule r : {Rule::Translate, Rule::Copy, Rule::Export}) {
    for (int i = 0; i < p.instances(r); ++i) p.constraints.mutex_resources.insert(program_resource(p, r, i));
  }
  for (const auto& d : descriptions) p.constraints.mutex_resources.insert(description_resource(d));

  for (const auto& d : descriptions) {
    const std::size_t a = *p.find(Rule::Translate, d);
    const std::size_t b = *p.find(Rule::Copy, d);
    if (spec.variant == Variant::Pipelined) p.constraints.dependencies.emplace_back(a, b);
    if (spec.variant == Variant::Organism) {
      const std::size_t e = *p.find(Rule::Export, d);
      p.constraints.dependencies.emplace_back(a, e);
      p.constraints.dependencies.emplace_back(b, e);
    }
  }
  std::sort(p.constraints.dependencies.begin(), p.constraints.dependencies.end());
  return p;
}

/// Pairs of subproblems that can never share a step when every program
/// class has a single instance: same program class or same description.
/// Only meaningful for single-instance systems; multi-instance classes
/// contribute description conflicts only.
inline std::size_t count_mutex_pairs(const Problem& p) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < p.subproblems.size(); ++i) {
    for (std::size_t j = i + 1; j < p.subproblems.size(); ++j) {
      const auto& x = p.subproblems[i];
      const auto& y = p.subproblems[j];
      const bool same_program = x.rule == y.rule && p.instances(x.rule) == 1;
      if (same_program || x.description == y.description) ++count;
    }
  }
  return count;
}

enum class ViolationKind : std::uint8_t { Missing, Duplicate, Mutex, Dependency };

struct Violation {
  ViolationKind kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
  bool has(ViolationKind k) const {
    return std::any_of(violations.begin(), violations.end(), [k](const Violation& v) { return v.kind == k; });
  }
};

inline ValidationReport validate_schedule(const Schedule& schedule, const Problem& p) {
  ValidationReport report;
  std::vector<int> step_of(p.subproblems.size(), -1);

  for (std::size_t s = 0; s < schedule.steps.size(); ++s) {
    std::map<std::string, std::string> holder;  // resource -> assignment id
    for (const Assignment& a : schedule.steps[s]) {
      if (a.subproblem >= p.subproblems.size()) {
        throw StructuralError("unknown subproblem index " + std::to_string(a.subproblem));
      }
      const Subproblem& sp = p.subproblems[a.subproblem];
      if (a.instance < 0 || a.instance >= p.instances(sp.rule)) {
        throw StructuralError("unknown program instance for " + sp.id() + ": " + std::to_string(a.instance));
      }
      const std::string id = assignment_id(p, a);
      if (step_of[a.subproblem] >= 0) {
        report.violations.push_back({ViolationKind::Duplicate, sp.id() + " scheduled more than once"});
      } else {
        step_of[a.subproblem] = static_cast<int>(s);
      }
      for (const std::string& res : {program_resource(p, sp.rule, a.instance), description_resource(sp.description)}) {
        auto [it, fresh] = holder.emplace(res, id);
        if (!fresh) {
          report.violations.push_back({ViolationKind::Mutex, "step " + std::to_string(s + 1) + ": " + it->second +
                                                                 " and " + id + " share " + res});
        }
      }
    }
  }
  for (std::size_t i = 0; i < p.subproblems.size(); ++i) {
    if (step_of[i] < 0) report.violations.push_back({ViolationKind::Missing, p.subproblems[i].id() + " never scheduled"});
  }
  for (auto [before, after] : p.constraints.dependencies) {
    if (step_of[before] >= 0 && step_of[after] >= 0 && step_of[before] >= step_of[after]) {
      report.violations.push_back({ViolationKind::Dependency, p.subproblems[after].id() + " must follow " +
                                                                  p.subproblems[before].id()});
    }
  }
  return report;
}

/// Parses "aa | ba -> ab | bb" style strategies.  Steps are separated by
/// "->", assignments by "|".
inline Schedule parse_schedule(std::string_view text, const Problem& p) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto split = [](std::string_view s, std::string_view sep) {
    std::vector<std::string_view> out;
    for (std::size_t pos = 0;;) {
      const std::size_t next = s.find(sep, pos);
      out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
      if (next == std::string_view::npos) break;
      pos = next + sep.size();
    }
    return out;
  };

  Schedule schedule;
  for (std::string_view step_text : split(text, "->")) {
    std::vector<Assignment> step;
    for (std::string_view tok : split(step_text, "|")) {
      tok = trim(tok);
      if (tok.empty()) throw StructuralError("empty assignment in schedule text");
      Rule rule;
      switch (tok.front()) {
        case 'a': rule = Rule::Translate; break;
        case 'b': rule = Rule::Copy; break;
        case 'e': rule = Rule::Export; break;
        default: throw StructuralError("unknown program in '" + std::string(tok) + "'");
      }
      tok.remove_prefix(1);
      int instance = 0;
      if (p.instances(rule) > 1) {
        std::size_t digits = 0;
        while (digits < tok.size() && std::isdigit(static_cast<unsigned char>(tok[digits]))) ++digits;
        if (digits == 0) throw StructuralError("missing program instance in schedule text");
        instance = std::stoi(std::string(tok.substr(0, digits)));
        tok.remove_prefix(digits);
      }
      auto idx = p.find(rule, tok);
      if (!idx) throw StructuralError("unknown subproblem " + std::string(1, rule_letter(rule)) + std::string(tok));
      step.push_back({*idx, instance});
    }
    schedule.steps.push_back(std::move(step));
  }
  return schedule;
}

inline std::string format_step(const Problem& p, const std::vector<Assignment>& step) {
  std::string line;
  for (std::size_t i = 0; i < step.size(); ++i) {
    if (i) line += " | ";
    line += assignment_id(p, step[i]);
  }
  return line;
}

enum class Mode : std::uint8_t { Exhaustive, Greedy };

inline constexpr std::size_t kExhaustiveLimit = 24;

struct ScheduleResult {
  Schedule schedule;
  std::size_t makespan = 0;
  /// Branch-and-bound nodes visited (exhaustive mode only).
  std::uint64_t nodes = 0;
};

namespace detail {

// Binds instances inside each step: tasks of one rule, taken in subproblem
// order, receive instances 0, 1, 2, ...
inline Schedule bind_instances(const Problem& p, const std::vector<int>& step_of, std::size_t makespan) {
  Schedule s;
  s.steps.resize(makespan);
  for (std::size_t i = 0; i < p.subproblems.size(); ++i) {
    auto& step = s.steps[static_cast<std::size_t>(step_of[i])];
    int next = 0;
    for (const Assignment& a : step) {
      if (p.subproblems[a.subproblem].rule == p.subproblems[i].rule) ++next;
    }
    step.push_back({i, next});
  }
  return s;
}

struct Graph {
  std::vector<std::vector<std::size_t>> preds, succs;
  std::vector<int> depth;   // earliest feasible step index
  std::vector<int> height;  // longest chain starting at the node (edges)
};

inline Graph build_graph(const Problem& p) {
  const std::size_t n = p.subproblems.size();
  Graph g;
  g.preds.resize(n);
  g.succs.resize(n);
  for (auto [a, b] : p.constraints.dependencies) {
    g.preds[b].push_back(a);
    g.succs[a].push_back(b);
  }
  // Kahn order; a cycle would leave nodes unvisited.
  std::vector<std::size_t> order, indeg(n);
  for (std::size_t i = 0; i < n; ++i) indeg[i] = g.preds[i].size();
  for (std::size_t i = 0; i < n; ++i) {
    if (indeg[i] == 0) order.push_back(i);
  }
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (std::size_t s : g.succs[order[k]]) {
      if (--indeg[s] == 0) order.push_back(s);
    }
  }
  if (order.size() != n) throw StructuralError("dependency relation is cyclic");
  g.depth.assign(n, 0);
  g.height.assign(n, 0);
  for (std::size_t v : order) {
    for (std::size_t s : g.succs[v]) g.depth[s] = std::max(g.depth[s], g.depth[v] + 1);
    // Predecessors sharing the description occupy distinct earlier steps.
    int same = 0;
    for (std::size_t pr : g.preds[v]) same += p.subproblems[pr].description == p.subproblems[v].description;
    g.depth[v] = std::max(g.depth[v], same);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (std::size_t s : g.succs[*it]) g.height[*it] = std::max(g.height[*it], g.height[s] + 1);
  }
  return g;
}

class Search {
 public:
  Search(const Problem& p, const Graph& g, int makespan) : p_(p), g_(g), horizon_(makespan) {
    const std::size_t n = p.subproblems.size();
    step_of_.assign(n, -1);
    for (const auto& s : p.subproblems) desc_index_.emplace(s.description, desc_index_.size());
    desc_used_.assign(desc_index_.size() * static_cast<std::size_t>(horizon_), false);
    load_.assign(3 * static_cast<std::size_t>(horizon_), 0);
  }

  bool solve() { return assign(0); }
  const std::vector<int>& step_of() const { return step_of_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  static std::size_t rule_index(Rule r) { return static_cast<std::size_t>(r); }

  int earliest(std::size_t i) const {
    int e = g_.depth[i];
    for (std::size_t pr : g_.preds[i]) {
      if (step_of_[pr] >= 0) e = std::max(e, step_of_[pr] + 1);
    }
    return e;
  }
  int latest(std::size_t i) const { return horizon_ - 1 - g_.height[i]; }

  bool desc_used(std::size_t d, int s) const { return desc_used_[d * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(s)]; }
  int& load(Rule r, int s) { return load_[rule_index(r) * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(s)]; }
  int load(Rule r, int s) const { return load_[rule_index(r) * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(s)]; }

  // Capacity bound over prefix and suffix windows for every program class,
  // plus per-description slot counting.
  bool bounds_hold(std::size_t from) const {
    for (Rule r : {Rule::Translate, Rule::Copy, Rule::Export}) {
      const int cap = p_.instances(r);
      if (cap == 0) continue;
      for (int w = 0; w < horizon_; ++w) {
        int need_suffix = 0, need_prefix = 0;
        for (std::size_t i = from; i < p_.subproblems.size(); ++i) {
          if (p_.subproblems[i].rule != r) continue;
          if (earliest(i) >= w) ++need_suffix;
          if (latest(i) <= w) ++need_prefix;
        }
        int free_suffix = 0, free_prefix = 0;
        for (int s = w; s < horizon_; ++s) free_suffix += cap - load(r, s);
        for (int s = 0; s <= w; ++s) free_prefix += cap - load(r, s);
        if (need_suffix > free_suffix || need_prefix > free_prefix) return false;
      }
    }
    std::vector<int> pending(desc_index_.size(), 0);
    for (std::size_t i = from; i < p_.subproblems.size(); ++i) ++pending[desc_index_.at(p_.subproblems[i].description)];
    for (std::size_t d = 0; d < pending.size(); ++d) {
      int free_slots = 0;
      for (int s = 0; s < horizon_; ++s) free_slots += desc_used(d, s) ? 0 : 1;
      if (pending[d] > free_slots) return false;
    }
    return true;
  }

  bool assign(std::size_t i) {
    ++nodes_;
    if (i == p_.subproblems.size()) return true;
    if (!bounds_hold(i)) return false;
    const Subproblem& sp = p_.subproblems[i];
    const std::size_t d = desc_index_.at(sp.description);
    for (int s = earliest(i); s <= latest(i); ++s) {
      if (desc_used(d, s) || load(sp.rule, s) >= p_.instances(sp.rule)) continue;
      step_of_[i] = s;
      desc_used_[d * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(s)] = true;
      ++load(sp.rule, s);
      if (assign(i + 1)) return true;
      --load(sp.rule, s);
      desc_used_[d * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(s)] = false;
      step_of_[i] = -1;
    }
    return false;
  }

  const Problem& p_;
  const Graph& g_;
  int horizon_;
  std::vector<int> step_of_;
  std::map<std::string, std::size_t> desc_index_;
  std::vector<bool> desc_used_;
  std::vector<int> load_;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// Lower bound on the makespan: busiest resource class or description, and
/// the longest dependency chain.
inline std::size_t makespan_lower_bound(const Problem& p) {
  std::size_t lb = 1;
  const detail::Graph g = detail::build_graph(p);
  for (Rule r : {Rule::Translate, Rule::Copy, Rule::Export}) {
    std::vector<std::size_t> release;
    for (std::size_t i = 0; i < p.subproblems.size(); ++i) {
      if (p.subproblems[i].rule == r) release.push_back(static_cast<std::size_t>(g.depth[i]));
    }
    if (release.empty()) continue;
    // Tasks released at step e or later need ceil(k / cap) steps after e.
    std::sort(release.begin(), release.end());
    const auto cap = static_cast<std::size_t>(p.instances(r));
    for (std::size_t k = 0; k < release.size(); ++k) {
      const std::size_t later = release.size() - k;
      lb = std::max(lb, release[k] + (later + cap - 1) / cap);
    }
  }
  std::map<std::string, std::size_t> per_desc;
  for (const auto& s : p.subproblems) lb = std::max(lb, ++per_desc[s.description]);
  for (std::size_t i = 0; i < p.subproblems.size(); ++i) {
    lb = std::max(lb, static_cast<std::size_t>(g.depth[i] + g.height[i]) + 1);
  }
  return lb;
}

/// List scheduling: each step takes, in subproblem-id order, every
/// subproblem whose predecessors are finished and whose resources are free.
inline ScheduleResult greedy_schedule(const Problem& p) {
  const std::size_t n = p.subproblems.size();
  std::vector<int> step_of(n, -1);
  std::size_t done = 0;
  int step = 0;
  while (done < n) {
    std::set<std::string> used_desc;
    std::map<Rule, int> used_prog;
    bool progressed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (step_of[i] >= 0) continue;
      const Subproblem& s = p.subproblems[i];
      bool ready = true;
      for (auto [a, b] : p.constraints.dependencies) {
        if (b == i && (step_of[a] < 0 || step_of[a] >= step)) ready = false;
      }
      if (!ready || used_desc.count(s.description) || used_prog[s.rule] >= p.instances(s.rule)) continue;
      used_desc.insert(s.description);
      ++used_prog[s.rule];
      step_of[i] = step;
      ++done;
      progressed = true;
    }
    if (!progressed) throw StructuralError("no schedulable subproblem; constraints are unsatisfiable");
    ++step;
  }
  ScheduleResult r;
  r.makespan = static_cast<std::size_t>(step);
  r.schedule = detail::bind_instances(p, step_of, r.makespan);
  return r;
}

inline ScheduleResult min_makespan(const Problem& p, Mode mode) {
  if (mode == Mode::Greedy) return greedy_schedule(p);
  if (p.subproblems.size() > kExhaustiveLimit) {
    throw CapacityError("exhaustive search is limited to " + std::to_string(kExhaustiveLimit) + " subproblems; " +
                        std::to_string(p.subproblems.size()) + " requested");
  }
  ScheduleResult best = greedy_schedule(p);
  const detail::Graph g = detail::build_graph(p);
  std::uint64_t nodes = 0;
  for (std::size_t t = makespan_lower_bound(p); t < best.makespan; ++t) {
    detail::Search search(p, g, static_cast<int>(t));
    const bool found = search.solve();
    nodes += search.nodes();
    if (found) {
      best.makespan = t;
      best.schedule = detail::bind_instances(p, search.step_of(), t);
      break;
    }
  }
  best.nodes = nodes;
  return best;
}

inline ScheduleResult min_makespan(const SystemSpec& spec, Mode mode) {
  return min_makespan(generate_subproblems(spec), mode);
}

/// Exact non-negative rational.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t n, std::int64_t d) {
    if (d == 0) throw ParameterError("zero denominator");
    if (d < 0) n = -n, d = -d;
    const std::int64_t g = std::gcd(n, d);
    return {n / (g ? g : 1), d / (g ? g : 1)};
  }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Steps taken when every subproblem of the system runs alone.
inline std::size_t sequential_makespan(const SystemSpec& spec) { return generate_subproblems(spec).subproblems.size(); }

inline Rational speedup(const SystemSpec& spec, const SystemSpec& baseline = SystemSpec::split(),
                        Mode mode = Mode::Exhaustive) {
  const auto seq = static_cast<std::int64_t>(sequential_makespan(baseline));
  const auto par = static_cast<std::int64_t>(min_makespan(spec, mode).makespan);
  return Rational::make(seq, par);
}

/// Ratio of the minimum makespans of two parallel systems.
inline Rational relative_speedup(const SystemSpec& spec, const SystemSpec& reference, Mode mode = Mode::Exhaustive) {
  const auto ref = static_cast<std::int64_t>(min_makespan(reference, mode).makespan);
  const auto par = static_cast<std::int64_t>(min_makespan(spec, mode).makespan);
  return Rational::make(ref, par);
}

}  // namespace parcell::sched
