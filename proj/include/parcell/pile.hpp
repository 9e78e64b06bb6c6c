#pragma once

// Lattice substrate hosting roving piles.
//
// A pile is a 4-connected set of lattice sites.  Each site holds a stack of
// groups.  Sites carry a role (body, vacuole, septum, daughter); the body is
// reported as the cell compartment, or as the mother while a bud is attached.
// The septum acts as a portal: besides its four daughter neighbours it is
// adjacent to every mother site that touches the daughter.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chem.hpp"

namespace parcell {

class TopologyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Compartment : std::uint8_t { Cell, Vacuole, Mother, Septum, Daughter };

inline std::string_view compartment_name(Compartment c) {
  static constexpr std::array<std::string_view, 5> names{"cell", "vacuole", "mother", "septum",
                                                         "daughter"};
  return names[static_cast<std::size_t>(c)];
}

enum class Role : std::uint8_t { Body, Vacuole, Septum, Daughter };
inline constexpr int kRoleCount = 4;

inline bool compartments_adjacent(Compartment a, Compartment b) {
  auto pair = [&](Compartment x, Compartment y) { return (a == x && b == y) || (a == y && b == x); };
  return pair(Compartment::Cell, Compartment::Vacuole) || pair(Compartment::Mother, Compartment::Septum) ||
         pair(Compartment::Septum, Compartment::Daughter) || pair(Compartment::Mother, Compartment::Daughter);
}

inline bool permeability(GroupState state, Compartment from, Compartment to, bool septum_open) {
  if (from == to) return true;
  if (!compartments_adjacent(from, to)) {
    throw TopologyError("compartments " + std::string(compartment_name(from)) + " and " +
                        std::string(compartment_name(to)) + " are not adjacent");
  }
  switch (state) {
    case GroupState::Give:
      return from == Compartment::Cell && to == Compartment::Vacuole;
    case GroupState::Take:
      return from == Compartment::Vacuole && to == Compartment::Cell;
    case GroupState::Open:
      return from == Compartment::Mother && to == Compartment::Septum;
    case GroupState::Close:
      return (from == Compartment::Septum && to == Compartment::Mother) ||
             (from == Compartment::Daughter && to == Compartment::Septum);
    case GroupState::Export:
      return septum_open && from == Compartment::Mother && to == Compartment::Daughter;
    case GroupState::Neutral:
      return false;
  }
  return false;
}

struct Site {
  int pile = -1;
  Role role = Role::Body;
  std::vector<GroupId> stack;
};

struct Pile {
  int id = -1;
  bool alive = true;
  std::vector<int> sites;
  std::array<int, kRoleCount> role_count{};
  int septum = -1;
  bool septum_open = false;
  std::vector<Cytosol> cytosol;  // indexed by Role

  bool has_bud() const { return septum >= 0; }
  int count(Role r) const { return role_count[static_cast<std::size_t>(r)]; }
  Cytosol& pool(Role r) { return cytosol[static_cast<std::size_t>(r)]; }
  const Cytosol& pool(Role r) const { return cytosol[static_cast<std::size_t>(r)]; }
};

struct Bud {
  int septum = -1;
  std::array<int, 8> ring{};
};

// Sites and piles touched since the last drain; the engine uses these to
// refresh rates.
struct Changes {
  std::vector<int> sites;
  std::vector<int> piles;
  bool everything = false;

  void clear() {
    sites.clear();
    piles.clear();
    everything = false;
  }
};

class Substrate {
 public:
  static constexpr std::array<int, 4> kDx{0, 1, 0, -1};
  static constexpr std::array<int, 4> kDy{-1, 0, 1, 0};

  Substrate(int width, int height, int alphabet = 16, double site_capacity = 150.0)
      : width_(width),
        height_(height),
        alphabet_(alphabet),
        capacity_(site_capacity),
        sites_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height)),
        pos_in_pile_(sites_.size(), -1),
        mark_(sites_.size(), 0) {
    if (width < 3 || height < 3) throw std::invalid_argument("lattice too small");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int alphabet() const { return alphabet_; }
  double capacity() const { return capacity_; }
  void set_capacity(double c) { capacity_ = c; }
  int site_count() const { return static_cast<int>(sites_.size()); }
  int index(int x, int y) const { return y * width_ + x; }
  int x_of(int s) const { return s % width_; }
  int y_of(int s) const { return s / width_; }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  int neighbor(int s, int dir) const {
    const int x = x_of(s) + kDx[static_cast<std::size_t>(dir)];
    const int y = y_of(s) + kDy[static_cast<std::size_t>(dir)];
    return in_bounds(x, y) ? index(x, y) : -1;
  }

  int offset(int s, int dx, int dy) const {
    const int x = x_of(s) + dx;
    const int y = y_of(s) + dy;
    return in_bounds(x, y) ? index(x, y) : -1;
  }

  const Site& site(int s) const { return sites_[static_cast<std::size_t>(s)]; }
  Pile& pile(int id) { return piles_[static_cast<std::size_t>(id)]; }
  const Pile& pile(int id) const { return piles_[static_cast<std::size_t>(id)]; }
  int pile_count() const { return static_cast<int>(piles_.size()); }

  Group& group(GroupId g) { return groups_[static_cast<std::size_t>(g)]; }
  const Group& group(GroupId g) const { return groups_[static_cast<std::size_t>(g)]; }
  bool alive(GroupId g) const { return g >= 0 && g < group_capacity() && alive_[static_cast<std::size_t>(g)]; }
  int group_capacity() const { return static_cast<int>(groups_.size()); }

  std::uint64_t site_writes() const { return site_writes_; }
  Changes& changes() { return changes_; }

  Compartment compartment(int s) const {
    const Site& st = site(s);
    switch (st.role) {
      case Role::Body:
        return pile(st.pile).has_bud() ? Compartment::Mother : Compartment::Cell;
      case Role::Vacuole:
        return Compartment::Vacuole;
      case Role::Septum:
        return Compartment::Septum;
      case Role::Daughter:
        return Compartment::Daughter;
    }
    return Compartment::Cell;
  }

  // ---- construction ----------------------------------------------------

  int create_pile() {
    Pile p;
    p.id = static_cast<int>(piles_.size());
    p.cytosol.assign(kRoleCount, Cytosol(alphabet_));
    piles_.push_back(std::move(p));
    touch_pile(static_cast<int>(piles_.size()) - 1);
    return static_cast<int>(piles_.size()) - 1;
  }

  void add_site(int p, int s, Role role = Role::Body) {
    Site& st = sites_[static_cast<std::size_t>(s)];
    if (st.pile >= 0) throw TopologyError("site already claimed");
    st.pile = p;
    st.role = role;
    Pile& P = pile(p);
    pos_in_pile_[static_cast<std::size_t>(s)] = static_cast<int>(P.sites.size());
    P.sites.push_back(s);
    ++P.role_count[static_cast<std::size_t>(role)];
    ++site_writes_;
    touch_site(s);
  }

  void set_role(int s, Role role) {
    Site& st = sites_[static_cast<std::size_t>(s)];
    Pile& P = pile(st.pile);
    --P.role_count[static_cast<std::size_t>(st.role)];
    st.role = role;
    ++P.role_count[static_cast<std::size_t>(role)];
    ++site_writes_;
    touch_site(s);
  }

  // Compact square-ish block of `n` sites centred at (cx, cy).
  std::vector<int> block_sites(int cx, int cy, int n) const {
    std::vector<std::pair<int, int>> cand;
    const int r = 1 + static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) cand.emplace_back(dx, dy);
    }
    std::stable_sort(cand.begin(), cand.end(), [](auto a, auto b) {
      const int ra = std::max(std::abs(a.first), std::abs(a.second));
      const int rb = std::max(std::abs(b.first), std::abs(b.second));
      if (ra != rb) return ra < rb;
      return a.first * a.first + a.second * a.second < b.first * b.first + b.second * b.second;
    });
    std::vector<int> out;
    for (auto [dx, dy] : cand) {
      if (static_cast<int>(out.size()) == n) break;
      if (!in_bounds(cx + dx, cy + dy)) continue;
      const int s = index(cx + dx, cy + dy);
      if (site(s).pile < 0) out.push_back(s);
    }
    return out;
  }

  GroupId add_group(Group g, int s) {
    const Site& st = site(s);
    if (st.pile < 0) throw TopologyError("group placed off any pile");
    g.id = static_cast<GroupId>(groups_.size());
    g.site = s;
    g.pile = st.pile;
    groups_.push_back(std::move(g));
    alive_.push_back(1);
    sites_[static_cast<std::size_t>(s)].stack.push_back(groups_.back().id);
    born_.push_back(groups_.back().id);
    touch_site(s);
    return groups_.back().id;
  }

  Group remove_group(GroupId id) {
    Group& g = group(id);
    auto& stack = sites_[static_cast<std::size_t>(g.site)].stack;
    stack.erase(std::find(stack.begin(), stack.end(), id));
    alive_[static_cast<std::size_t>(id)] = 0;
    touch_site(g.site);
    Group out = std::move(g);
    g.items.clear();
    died_.push_back(id);
    return out;
  }

  void move_group(GroupId id, int to) {
    Group& g = group(id);
    auto& from = sites_[static_cast<std::size_t>(g.site)].stack;
    from.erase(std::find(from.begin(), from.end(), id));
    touch_site(g.site);
    g.site = to;
    g.pile = site(to).pile;
    sites_[static_cast<std::size_t>(to)].stack.push_back(id);
    touch_site(to);
  }

  std::vector<GroupId> drain_born() { return std::exchange(born_, {}); }
  std::vector<GroupId> drain_died() { return std::exchange(died_, {}); }

  void touch_site(int s) { changes_.sites.push_back(s); }
  void touch_pile(int p) { changes_.piles.push_back(p); }

  // ---- queries ---------------------------------------------------------

  bool is_boundary(int s) const {
    const int p = site(s).pile;
    if (p < 0) return false;
    for (int d = 0; d < 4; ++d) {
      const int t = neighbor(s, d);
      if (t < 0 || site(t).pile != p) return true;
    }
    return false;
  }

  bool touches_role(int s, Role r) const {
    const int p = site(s).pile;
    for (int d = 0; d < 4; ++d) {
      const int t = neighbor(s, d);
      if (t >= 0 && site(t).pile == p && site(t).role == r) return true;
    }
    return false;
  }

  std::vector<int> ring_of(int centre) const {
    std::vector<int> out;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx != 0 || dy != 0) out.push_back(offset(centre, dx, dy));
      }
    }
    return out;
  }

  // Mother sites sharing an edge with the daughter.
  std::vector<int> contact_sites(int p) const {
    std::vector<int> out;
    const Pile& P = pile(p);
    if (!P.has_bud()) return out;
    for (int r : ring_of(P.septum)) {
      for (int d = 0; d < 4; ++d) {
        const int t = neighbor(r, d);
        if (t >= 0 && site(t).pile == p && site(t).role == Role::Body &&
            std::find(out.begin(), out.end(), t) == out.end()) {
          out.push_back(t);
        }
      }
    }
    return out;
  }

  std::vector<int> diffusion_targets(int s) const {
    std::vector<int> out;
    const Site& st = site(s);
    if (st.pile < 0) return out;
    for (int d = 0; d < 4; ++d) {
      const int t = neighbor(s, d);
      if (t >= 0 && site(t).pile == st.pile) out.push_back(t);
    }
    const Pile& P = pile(st.pile);
    if (P.has_bud()) {
      if (st.role == Role::Septum) {
        for (int c : contact_sites(st.pile)) out.push_back(c);
      } else if (st.role == Role::Body && touches_role(s, Role::Daughter)) {
        out.push_back(P.septum);
      }
    }
    return out;
  }

  long compartment_mass(int p, Role r) const {
    const Pile& P = pile(p);
    long m = P.pool(r).total();
    for (int s : P.sites) {
      if (site(s).role != r) continue;
      for (GroupId g : site(s).stack) m += static_cast<long>(group(g).mass());
    }
    return m;
  }

  long pile_mass(int p) const {
    long m = 0;
    for (int r = 0; r < kRoleCount; ++r) m += compartment_mass(p, static_cast<Role>(r));
    return m;
  }

  // Footprint and every compartment 4-connected.
  bool connected(int p) const {
    const Pile& P = pile(p);
    if (!P.alive) return true;
    auto all = [&](int s) { return site(s).pile == p; };
    if (reach(P.sites.empty() ? -1 : P.sites.front(), -1, all) != static_cast<int>(P.sites.size())) return false;
    for (int r = 0; r < kRoleCount; ++r) {
      const Role role = static_cast<Role>(r);
      if (P.count(role) == 0) continue;
      auto in = [&](int s) { return site(s).pile == p && site(s).role == role; };
      int start = -1;
      for (int s : P.sites) {
        if (site(s).role == role) {
          start = s;
          break;
        }
      }
      if (reach(start, -1, in) != P.count(role)) return false;
    }
    return true;
  }

  // ---- boundary dynamics -------------------------------------------------

  // Removing `s` keeps the set selected by `in` connected.  Uses the Moore
  // ring of `s` first and falls back to a flood fill.
  template <class In>
  bool removal_keeps_connected(int s, In in, int set_size) const {
    std::array<int, 4> nb{};
    int k = 0;
    for (int d = 0; d < 4; ++d) {
      const int t = neighbor(s, d);
      if (t >= 0 && in(t)) nb[static_cast<std::size_t>(k++)] = t;
    }
    if (k <= 1) return true;
    static constexpr std::array<int, 8> rx{0, 1, 1, 1, 0, -1, -1, -1};
    static constexpr std::array<int, 8> ry{-1, -1, 0, 1, 1, 1, 0, -1};
    std::array<int, 8> run{};
    std::array<bool, 8> present{};
    int all_in = 0;
    for (int i = 0; i < 8; ++i) {
      const int t = offset(s, rx[static_cast<std::size_t>(i)], ry[static_cast<std::size_t>(i)]);
      present[static_cast<std::size_t>(i)] = t >= 0 && in(t);
      all_in += present[static_cast<std::size_t>(i)] ? 1 : 0;
    }
    if (all_in < 8) {
      int first_gap = 0;
      while (present[static_cast<std::size_t>(first_gap)]) ++first_gap;
      int label = -1;
      for (int j = 1; j <= 8; ++j) {
        const int i = (first_gap + j) % 8;
        if (!present[static_cast<std::size_t>(i)]) {
          run[static_cast<std::size_t>(i)] = -1;
          continue;
        }
        const int prev = (i + 7) % 8;
        if (!present[static_cast<std::size_t>(prev)]) ++label;
        run[static_cast<std::size_t>(i)] = label;
      }
      // Edge neighbours sit at even ring positions.
      int common = -2;
      bool local = true;
      for (int i = 0; i < 8; i += 2) {
        if (!present[static_cast<std::size_t>(i)]) continue;
        if (common == -2) common = run[static_cast<std::size_t>(i)];
        else if (run[static_cast<std::size_t>(i)] != common) local = false;
      }
      if (local) return true;
      return reach(nb[0], s, in) == set_size - 1;
    }
    return true;
  }

  template <class In>
  int reach(int start, int skip, In in) const {
    if (start < 0) return 0;
    ++epoch_;
    std::vector<int> queue{start};
    mark_[static_cast<std::size_t>(start)] = epoch_;
    std::size_t head = 0;
    while (head < queue.size()) {
      const int u = queue[head++];
      for (int d = 0; d < 4; ++d) {
        const int t = neighbor(u, d);
        if (t < 0 || t == skip || mark_[static_cast<std::size_t>(t)] == epoch_ || !in(t)) continue;
        mark_[static_cast<std::size_t>(t)] = epoch_;
        queue.push_back(t);
      }
    }
    return static_cast<int>(queue.size());
  }

  bool body_removable(int p, int s) const {
    const Pile& P = pile(p);
    auto all = [&](int t) { return site(t).pile == p; };
    auto body = [&](int t) { return site(t).pile == p && site(t).role == Role::Body; };
    return removal_keeps_connected(s, all, static_cast<int>(P.sites.size())) &&
           removal_keeps_connected(s, body, P.count(Role::Body));
  }

  // One boundary move of body site `s` toward `dir`.  Growth into a free
  // site needs the body at or above capacity density; retraction into the
  // body needs room to spare; otherwise the boundary slides.
  bool try_boundary_move(int p, int s, int dir) {
    const Site& src = site(s);
    if (src.pile != p || src.role != Role::Body || !is_boundary(s)) return false;
    const int t = neighbor(s, dir);
    if (t < 0) return false;
    const Pile& P = pile(p);
    const int n = P.count(Role::Body);
    const double mass = static_cast<double>(compartment_mass(p, Role::Body));
    if (site(t).pile < 0) {
      if (mass >= capacity_ * n) {
        add_site(p, t, Role::Body);
        return true;
      }
      if (n == 1 && P.has_bud()) return false;
      bool anchored = n == 1;
      for (int d = 0; d < 4 && !anchored; ++d) {
        const int u = neighbor(t, d);
        anchored = u >= 0 && u != s && site(u).pile == p && site(u).role == Role::Body;
      }
      if (!anchored || !body_removable(p, s)) return false;
      add_site(p, t, Role::Body);
      move_stack(s, t);
      release_site(s);
      return true;
    }
    if (site(t).pile == p && site(t).role == Role::Body) {
      if (n <= 1 || mass > capacity_ * (n - 1)) return false;
      if (!body_removable(p, s)) return false;
      move_stack(s, t);
      release_site(s);
      return true;
    }
    return false;
  }

  // ---- budding and fission ---------------------------------------------

  std::optional<int> bud_centre(int s) const {
    const Site& st = site(s);
    if (st.pile < 0 || st.role != Role::Body || pile(st.pile).has_bud() || !is_boundary(s)) return std::nullopt;
    static constexpr std::array<std::pair<int, int>, 12> offsets{{{2, 0}, {-2, 0}, {0, 2}, {0, -2},
                                                                  {2, -1}, {2, 1}, {-2, -1}, {-2, 1},
                                                                  {-1, 2}, {1, 2}, {-1, -2}, {1, -2}}};
    for (auto [dx, dy] : offsets) {
      const int cx = x_of(s) + dx;
      const int cy = y_of(s) + dy;
      bool free = true;
      for (int j = -1; j <= 1 && free; ++j) {
        for (int i = -1; i <= 1 && free; ++i) {
          free = in_bounds(cx + i, cy + j) && site(index(cx + i, cy + j)).pile < 0;
        }
      }
      if (free) return index(cx, cy);
    }
    return std::nullopt;
  }

  // Claims a free 3x3 block next to `anchor`: the centre becomes the septum
  // and the eight surrounding sites the daughter.  Nine site writes.
  std::optional<Bud> create_bud(int p, int anchor) {
    if (pile(p).has_bud()) return std::nullopt;
    if (site(anchor).pile != p) return std::nullopt;
    const auto c = bud_centre(anchor);
    if (!c) return std::nullopt;
    Bud bud;
    bud.septum = *c;
    add_site(p, *c, Role::Septum);
    const auto ring = ring_of(*c);
    for (std::size_t i = 0; i < 8; ++i) {
      bud.ring[i] = ring[i];
      add_site(p, ring[i], Role::Daughter);
    }
    Pile& P = pile(p);
    P.septum = *c;
    P.septum_open = true;
    touch_pile(p);
    return bud;
  }

  // Releases the empty septum and turns the daughter into a pile of its own.
  std::pair<int, int> eject_septum(int p) {
    if (!pile(p).has_bud()) throw SequencingError("no septum to eject");
    const int c = pile(p).septum;
    if (!site(c).stack.empty()) throw SequencingError("septum still holds groups");
    const auto ring = ring_of(c);
    release_site(c);
    const int q = create_pile();
    for (int r : ring) {
      detach_site(r);
      add_site(q, r, Role::Body);
      for (GroupId g : site(r).stack) group(g).pile = q;
    }
    Pile& P = pile(p);
    P.septum = -1;
    P.septum_open = false;
    P.pool(Role::Daughter).drain_into(pile(q).pool(Role::Body));
    touch_pile(p);
    touch_pile(q);
    return {p, q};
  }

  // Fills the one-site hole left in an annular pile.
  bool fill_hole(int q, int hole) {
    if (hole < 0 || site(hole).pile >= 0) return false;
    bool adj = false;
    for (int d = 0; d < 4; ++d) {
      const int t = neighbor(hole, d);
      adj = adj || (t >= 0 && site(t).pile == q);
    }
    if (!adj) return false;
    add_site(q, hole, Role::Body);
    return true;
  }

  // ---- rendering ---------------------------------------------------------

  std::string render() const {
    std::ostringstream os;
    for (int y = 0; y < height_; ++y) {
      for (int x = 0; x < width_; ++x) {
        const Site& st = site(index(x, y));
        char ch = '.';
        if (st.pile >= 0) {
          switch (compartment(index(x, y))) {
            case Compartment::Cell: ch = 'c'; break;
            case Compartment::Vacuole: ch = 'v'; break;
            case Compartment::Mother: ch = 'm'; break;
            case Compartment::Septum: ch = 's'; break;
            case Compartment::Daughter: ch = 'd'; break;
          }
        }
        os << ch;
      }
      os << '\n';
    }
    return os.str();
  }

  nlohmann::json snapshot() const {
    nlohmann::json piles = nlohmann::json::array();
    for (const Pile& P : piles_) {
      if (!P.alive || P.sites.empty()) continue;
      nlohmann::json sites = nlohmann::json::array();
      std::vector<int> sorted = P.sites;
      std::sort(sorted.begin(), sorted.end());
      for (int s : sorted) {
        sites.push_back({{"x", x_of(s)},
                         {"y", y_of(s)},
                         {"compartment", compartment_name(compartment(s))},
                         {"stack", site(s).stack}});
      }
      piles.push_back({{"id", P.id}, {"septum_open", P.septum_open}, {"sites", sites}});
    }
    return {{"width", width_}, {"height", height_}, {"piles", piles}};
  }

 private:
  void detach_site(int s) {
    Site& st = sites_[static_cast<std::size_t>(s)];
    Pile& P = pile(st.pile);
    const int i = pos_in_pile_[static_cast<std::size_t>(s)];
    const int last = P.sites.back();
    P.sites[static_cast<std::size_t>(i)] = last;
    pos_in_pile_[static_cast<std::size_t>(last)] = i;
    P.sites.pop_back();
    pos_in_pile_[static_cast<std::size_t>(s)] = -1;
    --P.role_count[static_cast<std::size_t>(st.role)];
    touch_pile(st.pile);
    st.pile = -1;
    st.role = Role::Body;
  }

  void release_site(int s) {
    detach_site(s);
    ++site_writes_;
    touch_site(s);
  }

  void move_stack(int from, int to) {
    auto moving = std::exchange(sites_[static_cast<std::size_t>(from)].stack, {});
    for (GroupId g : moving) {
      group(g).site = to;
      group(g).pile = site(to).pile;
      sites_[static_cast<std::size_t>(to)].stack.push_back(g);
    }
    touch_site(from);
    touch_site(to);
  }

  int width_;
  int height_;
  int alphabet_;
  double capacity_;
  std::vector<Site> sites_;
  std::vector<int> pos_in_pile_;
  mutable std::vector<int> mark_;
  mutable int epoch_ = 0;
  std::vector<Pile> piles_;
  std::vector<Group> groups_;
  std::vector<char> alive_;
  std::vector<GroupId> born_;
  std::vector<GroupId> died_;
  std::uint64_t site_writes_ = 0;
  Changes changes_;
};

}  // namespace parcell
