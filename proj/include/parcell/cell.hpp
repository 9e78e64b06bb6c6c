#pragma once

// Artificial cells on the substrate.
//
// A parallel cell carries one gene (program + description zipper) of each
// kind A..F, X, Y, Z, with n_B copies of B and n_E copies of E.  Programs
// A..F form a synthesis pipeline that any zipper passes through in order:
//
//   A  copy the front atom                 (Ready -> Forward)
//   B  forward traversal, one atom a step  (Forward, back shrinking to 1)
//   C  turnaround                           (-> Turnaround)
//   D  turnaround                           (-> Reverse)
//   E  reverse traversal building x' and phi(x)'
//   F  bundle x' + phi(x)' for export, mark the mother zipper open
//
// A program binds a zipper into its own group for the duration of its stage,
// then releases it.  Idle programs step toward eligible zippers on
// neighbouring sites.  X buds the pile and smashes itself into the daughter's
// cytosol; Z' closes the septum once the daughter has synthesized Y''.
//
// The sequential cell runs all of this as one stage machine in one group.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chem.hpp"
#include "pile.hpp"
#include "rng.hpp"

namespace parcell {

struct RateConfig {
  double D0 = 1.0;
  double beta = 0.1;
  double kappa = 1.0;
  double processor_rate = 1.0;

  void validate() const {
    if (!(D0 > 0 && beta > 0 && kappa > 0 && processor_rate > 0)) {
      throw std::invalid_argument("all rates must be strictly positive");
    }
  }
};

struct GenomeConfig {
  int n_B = 1;
  int n_E = 1;
  int tag_alphabet = 16;
  long cytosol_target = 320;

  void validate() const {
    if (n_B < 1 || n_E < 1) throw std::invalid_argument("n_B and n_E must be at least 1");
    if (tag_alphabet < 1 || tag_alphabet > 256) throw std::invalid_argument("tag alphabet must be 1..256");
    if (cytosol_target < 0) throw std::invalid_argument("cytosol target must be non-negative");
  }

  int copies(Kind k) const { return k == Kind::B ? n_B : k == Kind::E ? n_E : 1; }

  long genome_mass() const {
    long m = 0;
    for (Kind k : kCellKinds) m += 2L * length_of(k) * copies(k);
    return m;
  }
};

inline constexpr long kSequentialGenomeMass = 2L * 367;
// Atoms the sequential cell hands to its daughter's cytosol.
inline constexpr int kSequentialCytosolTransfer = 89;

struct WorldConfig {
  int width = 48;
  int height = 48;
  double site_capacity = 150.0;
  long reservoir_per_tag = 50000;
};

// Slows the B and E stages working on one particular zipper during one
// cycle of its cell.
struct Throttle {
  Kind kind = Kind::B;
  int instance = -1;
  double factor = 1.0;
  int cycle = 1;

  bool active() const { return instance >= 0; }
};

enum class Lifecycle : std::uint8_t { Budding, Synthesizing, Verifying, Closing };

inline std::string_view lifecycle_name(Lifecycle l) {
  static constexpr std::array<std::string_view, 4> names{"budding", "synthesizing", "verifying", "closing"};
  return names[static_cast<std::size_t>(l)];
}

struct CellState {
  bool sequential = false;
  int cycle = 1;
  int generation = 0;
  int parent = -1;
  int fissions = 0;
  bool y_proof = false;
  double cycle_start_t = 0.0;
  std::uint64_t ops = 0;
  std::uint64_t cycle_start_ops = 0;
  long genome_mass = 0;
};

struct Census {
  std::array<int, kKindCount> complete{};
  std::array<int, kKindCount> in_flight{};

  int complete_of(Kind k) const { return complete[static_cast<std::size_t>(k)]; }
  int in_flight_of(Kind k) const { return in_flight[static_cast<std::size_t>(k)]; }
};

struct GenerationRecord {
  int mother = -1;
  int daughter = -1;
  int cycle = 0;
  double t = 0.0;
  double replication_time = 0.0;
  std::uint64_t replication_ops = 0;
  long genome_mass = 0;
  long cell_mass = 0;
  Census daughter_census;
  int race_events = 0;
  bool complement_ok = true;
};

enum class Action : std::uint8_t { None, Approach, Bind, Work };

struct Plan {
  Action action = Action::None;
  int site = -1;
  GroupId target = -1;
};

struct GroupRates {
  GroupId id = -1;
  double diffuse = 0.0;
  double execute = 0.0;
};

class World {
 public:
  World(WorldConfig wc, GenomeConfig gc, RateConfig rc, std::uint64_t seed)
      : sub(wc.width, wc.height, gc.tag_alphabet, wc.site_capacity),
        reservoir(gc.tag_alphabet),
        genome(gc),
        rates(rc),
        config(wc),
        rng(seed) {
    gc.validate();
    rc.validate();
    for (int t = 0; t < gc.tag_alphabet; ++t) reservoir.add(static_cast<Tag>(t), wc.reservoir_per_tag);
  }

  Substrate sub;
  Cytosol reservoir;
  std::vector<CellState> cells;
  GenomeConfig genome;
  RateConfig rates;
  WorldConfig config;
  Throttle throttle;
  Rng rng;
  double t = 0.0;
  std::uint64_t total_ops = 0;
  std::vector<GenerationRecord> records;
  std::vector<std::string> violations;

  // ---- construction ------------------------------------------------------

  int init_mother(int cx, int cy) {
    const int p = new_cell();
    std::vector<Group> parts;
    for (Kind k : kCellKinds) {
      for (int i = 0; i < genome.copies(k); ++i) {
        const Tags tags = random_tags(static_cast<std::size_t>(length_of(k)), genome.tag_alphabet, rng);
        Group prog;
        prog.items.emplace_back(make_program(k, i, tags));
        parts.push_back(std::move(prog));
        Group desc;
        desc.items.emplace_back(make_zipper(k, i, tags));
        parts.push_back(std::move(desc));
      }
    }
    place(p, cx, cy, std::move(parts), genome.genome_mass());
    cells[static_cast<std::size_t>(p)].genome_mass = genome_mass(p);
    return p;
  }

  int build_sequential_cell(int cx, int cy) {
    const int p = new_cell();
    cells[static_cast<std::size_t>(p)].sequential = true;
    const Tags tags = random_tags(static_cast<std::size_t>(length_of(Kind::Seq)), genome.tag_alphabet, rng);
    Group g;
    g.items.emplace_back(make_program(Kind::Seq, 0, tags));
    g.items.emplace_back(make_zipper(Kind::Seq, 0, tags));
    std::vector<Group> parts;
    parts.push_back(std::move(g));
    place(p, cx, cy, std::move(parts), kSequentialGenomeMass);
    cells[static_cast<std::size_t>(p)].genome_mass = genome_mass(p);
    return p;
  }

  // ---- accounting --------------------------------------------------------

  long total_mass() const {
    long m = reservoir.total();
    for (int p = 0; p < sub.pile_count(); ++p) m += sub.pile_mass(p);
    return m;
  }

  long genome_mass(int p) const {
    long m = 0;
    for (int s : sub.pile(p).sites) {
      for (GroupId g : sub.site(s).stack) {
        const Group& grp = sub.group(g);
        if (grp.state == GroupState::Export) continue;
        for (const auto& it : grp.items) {
          if (const auto* pr = std::get_if<Program>(&it)) m += static_cast<long>(pr->length());
          if (const auto* z = std::get_if<Zipper>(&it)) m += static_cast<long>(z->length());
        }
      }
    }
    return m;
  }

  // Per kind: complete (program, description) pairs outside export bundles,
  // and intermediates still in flight (bundles, zippers mid-pipeline).
  Census gene_census(int p, std::initializer_list<Role> roles = {Role::Body, Role::Vacuole, Role::Septum,
                                                                 Role::Daughter}) const {
    std::array<int, kKindCount> progs{};
    std::array<int, kKindCount> zips{};
    Census c;
    for (int s : sub.pile(p).sites) {
      if (std::find(roles.begin(), roles.end(), sub.site(s).role) == roles.end()) continue;
      for (GroupId g : sub.site(s).stack) {
        const Group& grp = sub.group(g);
        if (grp.state == GroupState::Export) {
          if (is_matched_export(grp)) ++c.in_flight[kidx(std::get<Program>(grp.items[0]).kind)];
          continue;
        }
        if (carrying(grp)) {
          ++progs[kidx(std::get<Program>(grp.items[0]).kind)];
          ++c.in_flight[kidx(std::get<Program>(grp.items[1]).kind)];
          continue;
        }
        for (const auto& it : grp.items) {
          if (const auto* pr = std::get_if<Program>(&it)) ++progs[kidx(pr->kind)];
          if (const auto* z = std::get_if<Zipper>(&it)) {
            ++zips[kidx(z->kind)];
            if (z->conformation != Conformation::Ready) ++c.in_flight[kidx(z->kind)];
          }
        }
      }
    }
    for (std::size_t k = 0; k < progs.size(); ++k) c.complete[k] = std::min(progs[k], zips[k]);
    return c;
  }

  Lifecycle lifecycle(int p) const {
    const Pile& P = sub.pile(p);
    if (!P.has_bud()) return Lifecycle::Budding;
    for (GroupId g : sub.site(P.septum).stack) {
      const Program* pr = sub.group(g).actor();
      if (pr && pr->kind == Kind::Z) return Lifecycle::Closing;
    }
    return cell(p).y_proof ? Lifecycle::Verifying : Lifecycle::Synthesizing;
  }

  const CellState& cell(int p) const { return cells[static_cast<std::size_t>(p)]; }
  CellState& cell(int p) { return cells[static_cast<std::size_t>(p)]; }

  int cycle_of(int p, Role r) const { return r == Role::Daughter ? 1 : cell(p).cycle; }

  // ---- rates -------------------------------------------------------------

  std::vector<GroupRates> group_rates_at(int s) const {
    std::vector<GroupRates> out;
    const Site& st = sub.site(s);
    if (st.stack.empty()) return out;
    const double dirs = static_cast<double>(sub.diffusion_targets(s).size());
    int runnable = 0;
    std::vector<char> run(st.stack.size(), 0);
    for (std::size_t i = 0; i < st.stack.size(); ++i) {
      run[i] = plan(st.stack[i]).action != Action::None ? 1 : 0;
      runnable += run[i];
    }
    for (std::size_t i = 0; i < st.stack.size(); ++i) {
      const Group& g = sub.group(st.stack[i]);
      GroupRates r;
      r.id = g.id;
      r.diffuse = rates.D0 / static_cast<double>(g.mass()) * dirs;
      if (run[i]) r.execute = rates.processor_rate / runnable * throttle_factor(g);
      out.push_back(r);
    }
    return out;
  }

  double boundary_rate(int s) const {
    const Site& st = sub.site(s);
    if (st.pile < 0 || st.role != Role::Body || !sub.is_boundary(s)) return 0.0;
    return rates.beta;
  }

  double import_rate(int s) const {
    const Site& st = sub.site(s);
    if (st.pile < 0 || (st.role != Role::Body && st.role != Role::Daughter) || !sub.is_boundary(s)) return 0.0;
    return deficient_tags(st.pile, st.role).empty() ? 0.0 : rates.kappa;
  }

  std::vector<Tag> deficient_tags(int p, Role r) const {
    std::vector<Tag> out;
    const long per_tag = std::max<long>(1, genome.cytosol_target / genome.tag_alphabet);
    const Cytosol& pool = sub.pile(p).pool(r);
    for (int t = 0; t < genome.tag_alphabet; ++t) {
      if (pool.count(static_cast<Tag>(t)) < per_tag && reservoir.has(static_cast<Tag>(t))) {
        out.push_back(static_cast<Tag>(t));
      }
    }
    return out;
  }

  // ---- event application -------------------------------------------------

  // Returns false when the move is refused by the boundary between
  // compartments; the group stays put.
  bool apply_diffuse(GroupId gid) {
    const Group& g = sub.group(gid);
    const auto targets = sub.diffusion_targets(g.site);
    if (targets.empty()) return false;
    const int to = targets[rng.below(targets.size())];
    const Compartment from_c = sub.compartment(g.site);
    const Compartment to_c = sub.compartment(to);
    if (!permeability(g.state, from_c, to_c, sub.pile(g.pile).septum_open)) return false;
    sub.move_group(gid, to);
    if (sub.group(gid).state == GroupState::Export && from_c == Compartment::Mother && to_c == Compartment::Daughter) {
      unpack(gid);
    }
    return true;
  }

  bool apply_boundary(int s) {
    const int p = sub.site(s).pile;
    const int dir = static_cast<int>(rng.below(4));
    return sub.try_boundary_move(p, s, dir);
  }

  bool apply_import(int s) {
    const Site& st = sub.site(s);
    const auto tags = deficient_tags(st.pile, st.role);
    if (tags.empty()) return false;
    const Tag tag = tags[rng.below(tags.size())];
    reservoir.take(tag);
    sub.pile(st.pile).pool(st.role).add(tag);
    sub.touch_pile(st.pile);
    if (!reservoir.has(tag)) sub.changes().everything = true;
    return true;
  }

  // One quantum of work by the program heading group `gid`.
  bool apply_execute(GroupId gid) {
    const Plan pl = plan(gid);
    if (pl.action == Action::None) return false;
    const int p = sub.group(gid).pile;
    bool done = true;
    switch (pl.action) {
      case Action::Approach:
        sub.move_group(gid, pl.site);
        break;
      case Action::Bind:
        bind(gid, pl.target);
        break;
      case Action::Work:
        done = work(gid);
        break;
      case Action::None:
        break;
    }
    if (!done) return false;
    if (sub.alive(gid)) {
      if (Program* pr = sub.group(gid).actor()) ++pr->ops;
      sub.touch_site(sub.group(gid).site);
    }
    ++cell(p).ops;
    ++total_ops;
    sub.touch_pile(p);
    return true;
  }

  // ---- decisions -----------------------------------------------------------

  Plan plan(GroupId gid) const {
    const Group& g = sub.group(gid);
    const Program* pr = g.actor();
    if (!pr) return {};
    const Role role = sub.site(g.site).role;
    if (cell(g.pile).sequential || pr->kind == Kind::Seq) return plan_sequential(g, *pr, role);
    if (is_pipeline(pr->kind)) return plan_pipeline(g, *pr, role);
    if (pr->kind == Kind::X) return plan_x(g, *pr, role);
    if (pr->kind == Kind::Z) return plan_z(g, role);
    return {};
  }

  bool runnable(GroupId gid) const { return plan(gid).action != Action::None; }

  static bool stage_accepts(Kind stage, const Zipper& z, int cycle) {
    if (z.kind == Kind::Seq) return false;
    switch (stage) {
      case Kind::A: return z.conformation == Conformation::Ready && z.stamp < cycle;
      case Kind::B: return z.conformation == Conformation::Forward && z.back.size() > 1;
      case Kind::C: return z.forward_complete();
      case Kind::D: return z.conformation == Conformation::Turnaround;
      case Kind::E: return z.conformation == Conformation::Reverse;
      case Kind::F: return z.conformation == Conformation::Done;
      default: return false;
    }
  }

  bool has_program(int p, Role r, Kind k) const {
    for (int s : sub.pile(p).sites) {
      if (sub.site(s).role != r) continue;
      for (GroupId g : sub.site(s).stack) {
        const Program* pr = sub.group(g).actor();
        if (pr && pr->kind == k && pr->phase == 0) return true;
      }
    }
    return false;
  }

 private:
  static std::size_t kidx(Kind k) { return static_cast<std::size_t>(k); }

  int new_cell() {
    const int p = sub.create_pile();
    cells.resize(static_cast<std::size_t>(sub.pile_count()));
    cell(p).cycle_start_t = t;
    return p;
  }

  void place(int p, int cx, int cy, std::vector<Group> parts, long genome_atoms) {
    const long per_tag = genome.cytosol_target / genome.tag_alphabet;
    const double mass = static_cast<double>(genome_atoms + per_tag * genome.tag_alphabet);
    const int n = std::max(1, static_cast<int>(std::ceil(mass / sub.capacity())));
    const auto sites = sub.block_sites(cx, cy, n);
    if (static_cast<int>(sites.size()) < n) throw std::runtime_error("insufficient space for a new cell");
    for (int s : sites) sub.add_site(p, s, Role::Body);
    for (auto& g : parts) {
      const int s = sites[rng.below(sites.size())];
      sub.add_group(std::move(g), s);
    }
    for (int t = 0; t < genome.tag_alphabet; ++t) {
      const long k = std::min(per_tag, reservoir.count(static_cast<Tag>(t)));
      for (long i = 0; i < k; ++i) reservoir.take(static_cast<Tag>(t));
      sub.pile(p).pool(Role::Body).add(static_cast<Tag>(t), k);
    }
  }

  double throttle_factor(const Group& g) const {
    if (!throttle.active() || cell(g.pile).cycle != throttle.cycle) return 1.0;
    const Program* pr = g.actor();
    if (!pr || (pr->kind != Kind::B && pr->kind != Kind::E)) return 1.0;
    const Zipper* z = g.zipper();
    if (z && z->kind == throttle.kind && z->instance == throttle.instance) return throttle.factor;
    return 1.0;
  }

  // F with a finished (program, description) pair in tow.
  static bool carrying(const Group& g) {
    const Program* pr = g.actor();
    return pr && pr->kind == Kind::F && g.items.size() == 3;
  }

  static Zipper* held(Group& g) {
    if (g.items.size() != 2) return nullptr;
    return std::get_if<Zipper>(&g.items[1]);
  }
  static const Zipper* held(const Group& g) { return held(const_cast<Group&>(g)); }

  static Tag reverse_need(const Zipper& z) {
    const std::size_t len = z.length();
    return z.copy.size() < 2 ? z.at(len - 1 - z.copy.size()) : z.at(len - 1 - z.nascent.size());
  }

  // First step of a shortest path inside the compartment from the group's
  // site to the nearest site satisfying `goal`, or -1.
  template <class Goal>
  int first_hop(const Group& g, Role role, Goal goal) const {
    std::vector<std::pair<int, int>> queue{{g.site, -1}};  // (site, first hop)
    std::size_t head = 0;
    auto seen = [&](int s) {
      for (const auto& q : queue) {
        if (q.first == s) return true;
      }
      return false;
    };
    while (head < queue.size()) {
      const auto [u, hop] = queue[head++];
      for (int d = 0; d < 4; ++d) {
        const int t = sub.neighbor(u, d);
        if (t < 0 || sub.site(t).pile != g.pile || sub.site(t).role != role || seen(t)) continue;
        const int first = hop < 0 ? t : hop;
        if (goal(t)) return first;
        queue.emplace_back(t, first);
      }
    }
    return -1;
  }

  // Binds an eligible zipper on the program's own site, or steps toward the
  // nearest one in the same compartment.
  template <class Pred>
  Plan seek(const Group& g, Role role, Pred accept) const {
    auto target_at = [&](int s) -> GroupId {
      for (GroupId other : sub.site(s).stack) {
        if (other == g.id) continue;
        const Group& o = sub.group(other);
        const Zipper* z = o.items.size() == 1 ? std::get_if<Zipper>(&o.items[0]) : nullptr;
        if (z && o.state != GroupState::Export && accept(*z)) return other;
      }
      return -1;
    };
    if (const GroupId here = target_at(g.site); here >= 0) return {Action::Bind, g.site, here};
    const int hop = first_hop(g, role, [&](int t) { return target_at(t) >= 0; });
    return hop < 0 ? Plan{} : Plan{Action::Approach, hop, -1};
  }

  // Daughter site across the shared boundary from a mother contact site.
  int delivery_target(int s) const {
    for (int d = 0; d < 4; ++d) {
      const int t = sub.neighbor(s, d);
      if (t >= 0 && sub.site(t).pile == sub.site(s).pile && sub.site(t).role == Role::Daughter) return t;
    }
    return -1;
  }

  // F carrying a finished pair walks it to the septum boundary.
  Plan plan_delivery(const Group& g) const {
    const Pile& P = sub.pile(g.pile);
    if (!P.has_bud() || !P.septum_open || delivery_target(g.site) >= 0) return {Action::Work, g.site, -1};
    const int hop = first_hop(g, Role::Body, [&](int t) { return delivery_target(t) >= 0; });
    return hop < 0 ? Plan{Action::Work, g.site, -1} : Plan{Action::Approach, hop, -1};
  }

  Plan plan_pipeline(const Group& g, const Program& pr, Role role) const {
    if (role != Role::Body && role != Role::Daughter) return {};
    if (carrying(g)) return plan_delivery(g);
    const Cytosol& pool = sub.pile(g.pile).pool(role);
    if (const Zipper* z = held(g)) {
      bool ok = false;
      switch (pr.kind) {
        case Kind::A: ok = pool.has(z->front.back()); break;
        case Kind::B: ok = pool.has(*z->focus); break;
        case Kind::C:
        case Kind::D:
        case Kind::F: ok = true; break;
        case Kind::E: ok = pool.has(reverse_need(*z)); break;
        default: break;
      }
      return ok ? Plan{Action::Work, g.site, -1} : Plan{};
    }
    if (g.items.size() != 1) return {};
    if (pr.kind == Kind::F && role == Role::Body && sub.pile(g.pile).septum_open) {
      // Stranded export bundles go out first.
      auto stranded = [&](int s) -> GroupId {
        for (GroupId other : sub.site(s).stack) {
          if (sub.group(other).state == GroupState::Export) return other;
        }
        return -1;
      };
      if (const GroupId here = stranded(g.site); here >= 0) return {Action::Bind, g.site, here};
      const int hop = first_hop(g, role, [&](int t) { return stranded(t) >= 0; });
      if (hop >= 0) return {Action::Approach, hop, -1};
    }
    const int cycle = cycle_of(g.pile, role);
    // Until it has proved its viability the daughter only starts on Y.
    const bool proving = role == Role::Daughter && !cell(g.pile).y_proof;
    return seek(g, role, [&](const Zipper& z) {
      return stage_accepts(pr.kind, z, cycle) && (!proving || pr.kind != Kind::A || z.kind == Kind::Y);
    });
  }

  Plan plan_x(const Group& g, const Program& pr, Role role) const {
    if (pr.phase == 1) return role == Role::Daughter ? Plan{Action::Work, g.site, -1} : Plan{};
    if (role != Role::Body || g.items.size() != 1 || sub.pile(g.pile).has_bud()) return {};
    if (sub.bud_centre(g.site)) return {Action::Work, g.site, -1};
    const int hop = first_hop(g, role, [&](int t) { return sub.bud_centre(t).has_value(); });
    return hop < 0 ? Plan{} : Plan{Action::Approach, hop, -1};
  }

  Plan plan_z(const Group& g, Role role) const {
    const Pile& P = sub.pile(g.pile);
    if (role == Role::Daughter) {
      if (!P.has_bud() || !cell(g.pile).y_proof || !has_program(g.pile, Role::Daughter, Kind::X)) return {};
      return {Action::Work, g.site, -1};
    }
    if (role != Role::Septum) return {};
    return {Action::Work, g.site, -1};
  }

  Plan plan_sequential(const Group& g, const Program& pr, Role role) const {
    if (pr.kind != Kind::Seq || role != Role::Body) return {};
    const Pile& P = sub.pile(g.pile);
    const Cytosol& pool = P.pool(Role::Body);
    const Zipper* z = held(g);
    if (!z) {
      if (g.items.size() != 1) return {};
      const int cycle = cell(g.pile).cycle;
      return seek(g, role, [&](const Zipper& zz) {
        return zz.kind == Kind::Seq && zz.conformation == Conformation::Ready && zz.stamp < cycle;
      });
    }
    bool ok = false;
    switch (pr.phase) {
      case 0: ok = !P.has_bud() && sub.bud_centre(g.site).has_value(); break;
      case 1: ok = pool.has(z->front.back()); break;
      case 2: ok = pool.has(*z->focus); break;
      case 3: ok = true; break;
      case 4: ok = pool.has(reverse_need(*z)); break;
      case 5: ok = pool.total() > 0; break;
      case 6: ok = P.has_bud(); break;
      case 7: ok = P.has_bud() && sub.site(P.septum).stack.empty(); break;
      default: break;
    }
    return ok ? Plan{Action::Work, g.site, -1} : Plan{};
  }

  // ---- actions -------------------------------------------------------------

  void bind(GroupId gid, GroupId target) {
    if (sub.group(target).state == GroupState::Export) {
      Group e = sub.remove_group(target);
      Group& f = sub.group(gid);
      f.items.push_back(std::move(e.items[0]));
      f.items.push_back(std::move(e.items[1]));
      return;
    }
    Group zg = sub.remove_group(target);
    Zipper z = std::get<Zipper>(std::move(zg.items[0]));
    Group& g = sub.group(gid);
    const Program& pr = *g.actor();
    if (pr.kind == Kind::A || pr.kind == Kind::Seq) z.stamp = cycle_of(g.pile, sub.site(g.site).role);
    g.items.emplace_back(std::move(z));
  }

  GroupId release(GroupId gid, GroupState state) {
    Group& g = sub.group(gid);
    Group out;
    out.state = state;
    out.items.emplace_back(std::move(g.items[1]));
    g.items.pop_back();
    const int s = g.site;
    return sub.add_group(std::move(out), s);
  }

  bool work(GroupId gid) {
    Group& g = sub.group(gid);
    Program& pr = *g.actor();
    if (cell(g.pile).sequential || pr.kind == Kind::Seq) return work_sequential(gid);
    switch (pr.kind) {
      case Kind::A:
      case Kind::B:
      case Kind::C:
      case Kind::D:
      case Kind::E:
      case Kind::F:
        return work_pipeline(gid);
      case Kind::X:
        return work_x(gid);
      case Kind::Z:
        return work_z(gid);
      default:
        return false;
    }
  }

  bool work_pipeline(GroupId gid) {
    Group& g = sub.group(gid);
    const Kind stage = g.actor()->kind;
    const Role role = sub.site(g.site).role;
    Cytosol& pool = sub.pile(g.pile).pool(role);
    Zipper& z = *held(g);
    switch (stage) {
      case Kind::A:
        if (copy_front(z, pool).stalled()) return false;
        release(gid, GroupState::Neutral);
        return true;
      case Kind::B: {
        const auto r = traverse_forward_step(z, pool);
        if (r.stalled()) return false;
        if (r.status == StepStatus::ForwardComplete) release(gid, GroupState::Neutral);
        return true;
      }
      case Kind::C:
      case Kind::D:
        advance_conformation(z);
        release(gid, GroupState::Neutral);
        return true;
      case Kind::E: {
        const auto r = traverse_reverse_step(z, pool);
        if (r.stalled()) return false;
        if (r.status == StepStatus::ReverseComplete) release(gid, GroupState::Neutral);
        return true;
      }
      case Kind::F:
        if (carrying(g)) {
          deliver(gid);
        } else {
          finish(gid, role);
        }
        return true;
      default:
        return false;
    }
  }

  void finish(GroupId gid, Role role) {
    Group& g = sub.group(gid);
    const int p = g.pile;
    const int s = g.site;
    Zipper& z = *held(g);
    auto [x, d] = take_products(z);
    if (x.kind == Kind::Y && role == Role::Daughter) cell(p).y_proof = true;
    const int cycle = cycle_of(p, role);
    if (role == Role::Body && x.kind == Kind::X && !sub.pile(p).has_bud() && !has_program(p, Role::Body, Kind::X)) {
      // A cell that has spent its X keeps the first new copy for itself and
      // recycles the spare description; the zipper goes round again.
      sub.pile(p).pool(Role::Body).add(d.sequence());
      z.stamp = cycle - 1;
      release(gid, GroupState::Neutral);
      Group resident;
      resident.items.emplace_back(std::move(x));
      sub.add_group(std::move(resident), s);
      return;
    }
    const GroupState next = z.stamp == cycle ? GroupState::Open : GroupState::Neutral;
    release(gid, next);
    Group export_group = bundle_export(std::move(x), std::move(d));
    const Pile& P = sub.pile(p);
    if (role == Role::Body && P.has_bud() && P.septum_open) {
      Group& f = sub.group(gid);
      f.items.push_back(std::move(export_group.items[0]));
      f.items.push_back(std::move(export_group.items[1]));
      return;
    }
    sub.add_group(std::move(export_group), s);
  }

  // Hands the carried pair over as an export group, across the boundary
  // into the daughter when standing at it, otherwise in place.
  void deliver(GroupId gid) {
    Group& f = sub.group(gid);
    const int s = f.site;
    Program x = std::get<Program>(std::move(f.items[1]));
    Zipper d = std::get<Zipper>(std::move(f.items[2]));
    f.items.resize(1);
    const GroupId e = sub.add_group(bundle_export(std::move(x), std::move(d)), s);
    const Pile& P = sub.pile(sub.group(e).pile);
    const int target = P.has_bud() && P.septum_open ? delivery_target(s) : -1;
    if (target >= 0 && permeability(GroupState::Export, sub.compartment(s), sub.compartment(target), P.septum_open)) {
      sub.move_group(e, target);
      unpack(e);
    }
  }

  // An export bundle entering the daughter splits into its program and its
  // description.
  void unpack(GroupId gid) {
    Group e = sub.remove_group(gid);
    const int s = e.site;
    Group prog;
    prog.items.emplace_back(std::move(e.items[0]));
    Group desc;
    desc.items.emplace_back(std::move(e.items[1]));
    std::get<Zipper>(desc.items[0]).stamp = 0;
    sub.add_group(std::move(prog), s);
    sub.add_group(std::move(desc), s);
  }

  bool work_x(GroupId gid) {
    Group& g = sub.group(gid);
    Program& pr = *g.actor();
    const int p = g.pile;
    if (pr.phase == 0) {
      const int anchor = g.site;
      const auto bud = sub.create_bud(p, anchor);
      if (!bud) return false;
      pr.phase = 1;
      for (int r : bud->ring) {
        if (r >= 0 && std::abs(sub.x_of(r) - sub.x_of(anchor)) + std::abs(sub.y_of(r) - sub.y_of(anchor)) == 1) {
          sub.move_group(gid, r);
          break;
        }
      }
      return true;
    }
    Group x = sub.remove_group(gid);
    sub.pile(p).pool(Role::Daughter).add(smash(std::get<Program>(x.items[0])));
    return true;
  }

  bool work_z(GroupId gid) {
    Group& g = sub.group(gid);
    const int p = g.pile;
    const int septum = sub.pile(p).septum;
    const Role role = sub.site(g.site).role;
    if (role == Role::Daughter) {
      if (sub.touches_role(g.site, Role::Septum)) {
        g.state = GroupState::Close;
        if (!permeability(g.state, Compartment::Daughter, Compartment::Septum, true)) return false;
        sub.move_group(gid, septum);
        sub.group(gid).state = GroupState::Neutral;
        return true;
      }
      for (int d = 0; d < 4; ++d) {
        const int t = sub.neighbor(g.site, d);
        if (t >= 0 && sub.site(t).pile == p && sub.site(t).role == Role::Daughter &&
            sub.touches_role(t, Role::Septum)) {
          sub.move_group(gid, t);
          return true;
        }
      }
      return false;
    }
    for (GroupId other : sub.site(septum).stack) {
      if (other == gid) continue;
      const auto contacts = sub.contact_sites(p);
      if (contacts.empty()) return false;
      sub.group(other).state = GroupState::Close;
      if (!permeability(GroupState::Close, Compartment::Septum, Compartment::Mother, true)) return false;
      sub.move_group(other, contacts[rng.below(contacts.size())]);
      return true;
    }
    close_and_eject(p, gid);
    return true;
  }

  bool work_sequential(GroupId gid) {
    Group& g = sub.group(gid);
    Program& pr = *g.actor();
    const int p = g.pile;
    Pile& P = sub.pile(p);
    Cytosol& pool = P.pool(Role::Body);
    Zipper& z = *held(g);
    switch (pr.phase) {
      case 0:
        if (!sub.create_bud(p, g.site)) return false;
        pr.phase = 1;
        return true;
      case 1:
        if (copy_front(z, pool).stalled()) return false;
        pr.phase = 2;
        return true;
      case 2: {
        const auto r = traverse_forward_step(z, pool);
        if (r.stalled()) return false;
        if (r.status == StepStatus::ForwardComplete) {
          pr.phase = 3;
          pr.aux = 0;
        }
        return true;
      }
      case 3:
        ++pr.aux;
        if (pr.aux == 2) advance_conformation(z);
        if (pr.aux == 4) {
          advance_conformation(z);
          pr.phase = 4;
          pr.aux = 0;
        }
        return true;
      case 4: {
        const auto r = traverse_reverse_step(z, pool);
        if (r.stalled()) return false;
        if (r.status == StepStatus::ReverseComplete) pr.phase = 5;
        return true;
      }
      case 5: {
        const int T = genome.tag_alphabet;
        for (int k = 0; k < T; ++k) {
          const Tag tag = static_cast<Tag>((pr.aux + k) % T);
          if (pool.take(tag)) {
            P.pool(Role::Daughter).add(tag);
            if (++pr.aux == kSequentialCytosolTransfer) {
              pr.phase = 6;
              pr.aux = 0;
            }
            return true;
          }
        }
        return false;
      }
      case 6: {
        auto [x, d] = take_products(z);
        int target = -1;
        for (int r : sub.ring_of(P.septum)) {
          if (sub.touches_role(r, Role::Body)) {
            target = r;
            break;
          }
        }
        Group prog;
        prog.items.emplace_back(std::move(x));
        Group desc;
        desc.items.emplace_back(std::move(d));
        sub.add_group(std::move(prog), target);
        sub.add_group(std::move(desc), target);
        sub.group(gid).actor()->phase = 7;
        return true;
      }
      case 7:
        pr.phase = 0;
        close_and_eject(p, -1);
        return true;
      default:
        return false;
    }
  }

  void close_and_eject(int p, GroupId closer) {
    const int septum = sub.pile(p).septum;
    const Census mother = gene_census(p, {Role::Body});
    const int race = mother.in_flight_of(Kind::B) + mother.in_flight_of(Kind::E);
    if (closer >= 0) {
      for (int r : sub.ring_of(septum)) {
        if (sub.touches_role(r, Role::Septum)) {
          sub.move_group(closer, r);
          break;
        }
      }
      sub.group(closer).state = GroupState::Neutral;
    }
    sub.pile(p).septum_open = false;
    for (int s : sub.pile(p).sites) {
      if (sub.site(s).role != Role::Body) continue;
      for (GroupId g : sub.site(s).stack) {
        Group& grp = sub.group(g);
        if (grp.state == GroupState::Open || grp.state == GroupState::Close) grp.state = GroupState::Neutral;
      }
      sub.touch_site(s);
    }
    const long mass_before = sub.pile_mass(p);
    CellState& mc = cell(p);
    ++mc.cycle;
    const auto [m, q] = sub.eject_septum(p);
    sub.fill_hole(q, septum);
    cells.resize(static_cast<std::size_t>(sub.pile_count()));
    CellState& dc = cell(q);
    CellState& mother_cell = cell(m);
    dc.sequential = mother_cell.sequential;
    dc.generation = mother_cell.generation + 1;
    dc.parent = m;
    dc.cycle_start_t = t;
    dc.genome_mass = genome_mass(q);

    GenerationRecord rec;
    rec.mother = m;
    rec.daughter = q;
    rec.cycle = mother_cell.cycle - 1;
    rec.t = t;
    rec.replication_time = t - mother_cell.cycle_start_t;
    rec.replication_ops = mother_cell.ops - mother_cell.cycle_start_ops;
    rec.genome_mass = mother_cell.genome_mass;
    rec.cell_mass = mass_before;
    rec.daughter_census = gene_census(q);
    rec.race_events = race;
    if (mother_cell.sequential) {
      rec.complement_ok = rec.daughter_census.complete_of(Kind::Seq) >= 1;
    } else {
      for (Kind k : kCellKinds) rec.complement_ok = rec.complement_ok && rec.daughter_census.complete_of(k) >= 1;
    }
    if (!rec.complement_ok) {
      violations.push_back("daughter " + std::to_string(q) + " lacks part of the gene complement");
    }
    records.push_back(rec);
    mother_cell.cycle_start_t = t;
    mother_cell.cycle_start_ops = mother_cell.ops;
    mother_cell.y_proof = false;
    ++mother_cell.fissions;
    sub.touch_pile(m);
    sub.touch_pile(q);
  }
};

// Consistency checks used by the invariant suite.
struct InvariantReport {
  long mass = 0;
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
};

inline InvariantReport check_invariants(const World& w, long expected_mass) {
  InvariantReport r;
  r.mass = w.total_mass();
  if (r.mass != expected_mass) {
    r.problems.push_back("mass " + std::to_string(r.mass) + " != " + std::to_string(expected_mass));
  }
  for (int p = 0; p < w.sub.pile_count(); ++p) {
    if (!w.sub.connected(p)) r.problems.push_back("pile " + std::to_string(p) + " disconnected");
  }
  for (GroupId g = 0; g < w.sub.group_capacity(); ++g) {
    if (!w.sub.alive(g)) continue;
    const Group& grp = w.sub.group(g);
    if (grp.state == GroupState::Export && !is_matched_export(grp)) {
      r.problems.push_back("export group " + std::to_string(g) + " is not a matched pair");
    }
  }
  for (const auto& v : w.violations) r.problems.push_back(v);
  return r;
}

inline nlohmann::json to_json(const GenerationRecord& r) {
  nlohmann::json census = nlohmann::json::object();
  for (int k = 0; k < kKindCount; ++k) {
    const int c = r.daughter_census.complete[static_cast<std::size_t>(k)];
    if (c > 0) census[std::string(kind_name(static_cast<Kind>(k)))] = c;
  }
  return {{"mother", r.mother},
          {"daughter", r.daughter},
          {"cycle", r.cycle},
          {"t", r.t},
          {"replication_time", r.replication_time},
          {"replication_ops", r.replication_ops},
          {"genome_mass", r.genome_mass},
          {"cell_mass", r.cell_mass},
          {"daughter_census", census},
          {"race_events", r.race_events}};
}

}  // namespace parcell
