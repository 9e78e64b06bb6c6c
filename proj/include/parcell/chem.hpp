#pragma once

// Atoms, programs, descriptions and the primitive actions on them.
//
// Every object is made of unit-mass typed atoms.  Actions only move atoms
// between containers (cytosol pools, zippers, programs), so the total atom
// count of a closed system never changes.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rng.hpp"

namespace parcell {

class SequencingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class PairingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Kind : std::uint8_t { A, B, C, D, E, F, X, Y, Z, Seq };

inline constexpr int kKindCount = 10;
inline constexpr std::array<int, kKindCount> kLengths{42, 62, 55, 63, 74, 92, 89, 8, 43, 367};
inline constexpr std::array<Kind, 9> kCellKinds{Kind::A, Kind::B, Kind::C, Kind::D, Kind::E,
                                                Kind::F, Kind::X, Kind::Y, Kind::Z};
inline constexpr std::array<Kind, 6> kPipelineKinds{Kind::A, Kind::B, Kind::C,
                                                    Kind::D, Kind::E, Kind::F};
// Leading executable atoms of X; the rest is inert payload.
inline constexpr int kXPrologue = 8;

inline int length_of(Kind k) { return kLengths[static_cast<std::size_t>(k)]; }

inline std::string_view kind_name(Kind k) {
  static constexpr std::array<std::string_view, kKindCount> names{"A", "B", "C", "D", "E",
                                                                  "F", "X", "Y", "Z", "Seq"};
  return names[static_cast<std::size_t>(k)];
}

inline Kind parse_kind(std::string_view s) {
  for (int i = 0; i < kKindCount; ++i) {
    if (kind_name(static_cast<Kind>(i)) == s) return static_cast<Kind>(i);
  }
  throw std::invalid_argument("unknown program kind: " + std::string(s));
}

inline bool is_pipeline(Kind k) { return k <= Kind::F; }

using Tag = std::uint8_t;
using Tags = std::vector<Tag>;

// Free atoms of one compartment, counted per tag.
class Cytosol {
 public:
  explicit Cytosol(int alphabet = 16) : counts_(static_cast<std::size_t>(alphabet), 0) {}

  int alphabet() const { return static_cast<int>(counts_.size()); }
  long count(Tag t) const { return counts_[t]; }
  long total() const { return total_; }
  bool has(Tag t) const { return counts_[t] > 0; }
  const std::vector<long>& counts() const { return counts_; }

  bool take(Tag t) {
    if (counts_[t] == 0) return false;
    --counts_[t];
    --total_;
    return true;
  }

  void add(Tag t, long k = 1) {
    counts_[t] += k;
    total_ += k;
  }

  void add(const Tags& tags) {
    for (Tag t : tags) add(t);
  }

  // Moves everything into `other`.
  void drain_into(Cytosol& other) {
    for (std::size_t t = 0; t < counts_.size(); ++t) other.add(static_cast<Tag>(t), counts_[t]);
    std::fill(counts_.begin(), counts_.end(), 0);
    total_ = 0;
  }

 private:
  std::vector<long> counts_;
  long total_ = 0;
};

enum class GroupState : std::uint8_t { Neutral, Give, Take, Open, Close, Export };

inline std::string_view state_name(GroupState s) {
  static constexpr std::array<std::string_view, 6> names{"neutral", "give",  "take",
                                                         "open",    "close", "export"};
  return names[static_cast<std::size_t>(s)];
}

enum class Conformation : std::uint8_t { Ready, Forward, Turnaround, Reverse, Done };

inline std::string_view conformation_name(Conformation c) {
  static constexpr std::array<std::string_view, 5> names{"ready", "forward", "turnaround",
                                                         "reverse", "done"};
  return names[static_cast<std::size_t>(c)];
}

struct Atom {
  Tag tag = 0;
};

struct Program {
  Kind kind = Kind::A;
  int instance = 0;
  Tags tags;
  int phase = 0;
  int aux = 0;
  std::uint64_t ops = 0;
  bool executing = false;

  std::size_t mass() const { return tags.size(); }
  std::size_t length() const { return tags.size(); }
};

// Description of a program laid out for traversal.  `front` and `back` are
// stacks with their tops at the vector ends; the sequence reads front bottom
// to top, then focus, then back top to bottom.
struct Zipper {
  Kind kind = Kind::A;
  int instance = 0;
  Tags front;
  std::optional<Tag> focus;
  Tags back;
  Tags daughter_front;
  Tags copy;     // reversed partial description copy
  Tags nascent;  // reversed partial program copy
  Conformation conformation = Conformation::Ready;
  int stamp = 0;

  std::size_t length() const { return front.size() + (focus ? 1 : 0) + back.size(); }
  std::size_t mass() const { return length() + daughter_front.size() + copy.size() + nascent.size(); }
  bool forward_complete() const { return conformation == Conformation::Forward && back.size() == 1; }

  Tag at(std::size_t p) const {
    if (p < front.size()) return front[p];
    if (p == front.size()) return *focus;
    return back[back.size() - (p - front.size())];
  }

  Tags sequence() const {
    Tags out;
    out.reserve(length());
    for (std::size_t p = 0; p < length(); ++p) out.push_back(at(p));
    return out;
  }
};

using Item = std::variant<Atom, Program, Zipper>;

inline std::size_t item_mass(const Item& it) {
  return std::visit(
      [](const auto& v) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Atom>) {
          return 1;
        } else {
          return v.mass();
        }
      },
      it);
}

using GroupId = int;

struct Group {
  GroupId id = -1;
  GroupState state = GroupState::Neutral;
  std::vector<Item> items;
  int site = -1;
  int pile = -1;

  std::size_t mass() const {
    std::size_t m = 0;
    for (const auto& it : items) m += item_mass(it);
    return m;
  }

  // The program that executes on behalf of the group, if any.  Export
  // bundles are inert cargo.
  Program* actor() {
    if (state == GroupState::Export || items.empty()) return nullptr;
    return std::get_if<Program>(&items.front());
  }
  const Program* actor() const { return const_cast<Group*>(this)->actor(); }

  Zipper* zipper() {
    for (auto& it : items) {
      if (auto* z = std::get_if<Zipper>(&it)) return z;
    }
    return nullptr;
  }
  const Zipper* zipper() const { return const_cast<Group*>(this)->zipper(); }

  // A zipper standing alone in its group.
  Zipper* lone_zipper() {
    if (items.size() != 1) return nullptr;
    return std::get_if<Zipper>(&items.front());
  }
};

inline Zipper make_zipper(Kind kind, int instance, const Tags& tags) {
  if (tags.size() < 4) throw std::invalid_argument("description shorter than 4 atoms");
  Zipper z;
  z.kind = kind;
  z.instance = instance;
  z.front = {tags[0]};
  z.focus = tags[1];
  z.back.assign(tags.rbegin(), tags.rend() - 2);
  return z;
}

inline Tags random_tags(std::size_t n, int alphabet, Rng& rng) {
  Tags t(n);
  for (auto& x : t) x = static_cast<Tag>(rng.below(static_cast<std::uint64_t>(alphabet)));
  return t;
}

inline Zipper make_description(Kind kind, int instance, int alphabet, Rng& rng) {
  return make_zipper(kind, instance, random_tags(static_cast<std::size_t>(length_of(kind)), alphabet, rng));
}

inline Program make_program(Kind kind, int instance, Tags tags) {
  Program p;
  p.kind = kind;
  p.instance = instance;
  p.tags = std::move(tags);
  return p;
}

enum class StepStatus : std::uint8_t { Consumed, Stalled, ForwardComplete, ReverseComplete };

struct StepResult {
  StepStatus status = StepStatus::Stalled;
  Tag tag = 0;

  bool stalled() const { return status == StepStatus::Stalled; }
};

// Copies the single front atom onto the daughter front.
inline StepResult copy_front(Zipper& z, Cytosol& cyt) {
  if (z.conformation != Conformation::Ready || z.front.size() != 1 || !z.daughter_front.empty()) {
    throw SequencingError("copy_front needs a ready zipper");
  }
  const Tag t = z.front.back();
  if (!cyt.take(t)) return {StepStatus::Stalled, t};
  z.daughter_front.push_back(t);
  z.conformation = Conformation::Forward;
  return {StepStatus::Consumed, t};
}

inline StepResult traverse_forward_step(Zipper& z, Cytosol& cyt) {
  if (z.conformation != Conformation::Ready && z.conformation != Conformation::Forward) {
    throw SequencingError("forward step outside forward conformation");
  }
  if (z.back.size() <= 1) throw SequencingError("forward traversal already complete");
  const Tag t = *z.focus;
  if (!cyt.take(t)) return {StepStatus::Stalled, t};
  z.conformation = Conformation::Forward;
  z.front.push_back(t);
  z.daughter_front.push_back(t);
  z.focus = z.back.back();
  z.back.pop_back();
  return {z.back.size() == 1 ? StepStatus::ForwardComplete : StepStatus::Consumed, t};
}

// Forward-complete -> Turnaround -> Reverse.
inline void advance_conformation(Zipper& z) {
  if (z.forward_complete()) {
    z.conformation = Conformation::Turnaround;
  } else if (z.conformation == Conformation::Turnaround) {
    z.conformation = Conformation::Reverse;
  } else {
    throw SequencingError("no conformation change available");
  }
}

// The first two steps finish the description copy with the two atoms the
// forward pass never reached.  Each later step adds one atom to the program
// copy, moves one daughter atom into the description copy and walks the
// mother zipper back toward its ready layout.
inline StepResult traverse_reverse_step(Zipper& z, Cytosol& cyt) {
  if (z.conformation != Conformation::Reverse) throw SequencingError("reverse step outside reverse conformation");
  const std::size_t len = z.length();
  if (z.copy.size() < 2) {
    const Tag t = z.at(len - 1 - z.copy.size());
    if (!cyt.take(t)) return {StepStatus::Stalled, t};
    z.copy.push_back(t);
    return {StepStatus::Consumed, t};
  }
  const Tag t = z.at(len - 1 - z.nascent.size());
  if (!cyt.take(t)) return {StepStatus::Stalled, t};
  z.nascent.push_back(t);
  if (!z.daughter_front.empty()) {
    z.copy.push_back(z.daughter_front.back());
    z.daughter_front.pop_back();
  }
  if (z.front.size() > 1) {
    z.back.push_back(*z.focus);
    z.focus = z.front.back();
    z.front.pop_back();
  }
  if (z.nascent.size() == len) {
    z.conformation = Conformation::Done;
    return {StepStatus::ReverseComplete, t};
  }
  return {StepStatus::Consumed, t};
}

// Detaches the finished program and description copies and leaves the
// mother zipper ready for another pass.
inline std::pair<Program, Zipper> take_products(Zipper& z) {
  if (z.conformation != Conformation::Done) throw SequencingError("products not finished");
  Program p = make_program(z.kind, z.instance, Tags(z.nascent.rbegin(), z.nascent.rend()));
  Zipper d = make_zipper(z.kind, z.instance, Tags(z.copy.rbegin(), z.copy.rend()));
  z.nascent.clear();
  z.copy.clear();
  z.conformation = Conformation::Ready;
  return {std::move(p), std::move(d)};
}

inline Tags smash(const Program& p) {
  if (p.executing) throw SequencingError("cannot smash a program mid-action");
  return p.tags;
}

inline Group bundle_export(Program x, Zipper d) {
  if (x.kind != d.kind) {
    throw PairingError("export pair mismatch: " + std::string(kind_name(x.kind)) + " with phi(" +
                       std::string(kind_name(d.kind)) + ")");
  }
  const auto len = static_cast<std::size_t>(length_of(x.kind));
  if (x.length() != len || d.length() != len || d.mass() != len) {
    throw PairingError("export pair incomplete");
  }
  Group g;
  g.state = GroupState::Export;
  g.items.emplace_back(std::move(x));
  g.items.emplace_back(std::move(d));
  return g;
}

inline bool is_matched_export(const Group& g) {
  if (g.items.size() != 2) return false;
  const auto* p = std::get_if<Program>(&g.items[0]);
  const auto* z = std::get_if<Zipper>(&g.items[1]);
  return p && z && p->kind == z->kind;
}

inline nlohmann::json to_json(const Zipper& z) {
  return {{"kind", kind_name(z.kind)},
          {"instance", z.instance},
          {"front", z.front},
          {"focus", z.focus ? nlohmann::json(*z.focus) : nlohmann::json(nullptr)},
          {"back", z.back},
          {"daughter_front", z.daughter_front},
          {"copy", z.copy},
          {"nascent", z.nascent},
          {"conformation", conformation_name(z.conformation)},
          {"stamp", z.stamp}};
}

inline nlohmann::json to_json(const Program& p) {
  return {{"kind", kind_name(p.kind)}, {"instance", p.instance}, {"length", p.length()},
          {"phase", p.phase},          {"ops", p.ops}};
}

inline nlohmann::json to_json(const Group& g) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& it : g.items) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Atom>) {
            items.push_back({{"atom", v.tag}});
          } else if constexpr (std::is_same_v<T, Program>) {
            items.push_back({{"program", to_json(v)}});
          } else {
            items.push_back({{"zipper", to_json(v)}});
          }
        },
        it);
  }
  return {{"id", g.id}, {"state", state_name(g.state)}, {"mass", g.mass()},
          {"site", g.site}, {"pile", g.pile}, {"items", items}};
}

}  // namespace parcell
