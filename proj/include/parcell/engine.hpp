#pragma once

// Continuous-time event scheduler.
//
// Every possible event has a rate: each group can diffuse and execute, each
// site can move its boundary and import an atom.  Rates live in two sum
// trees, so drawing the next event is logarithmic in the number of slots.
// After an event only the slots near what it touched are recomputed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cell.hpp"

namespace parcell {

class SumTree {
 public:
  explicit SumTree(std::size_t n = 0) { resize(n); }

  std::size_t size() const { return n_; }

  void resize(std::size_t n) {
    std::vector<double> old(n_);
    for (std::size_t i = 0; i < n_; ++i) old[i] = get(i);
    std::size_t cap = 1;
    while (cap < n) cap <<= 1;
    cap_ = cap;
    n_ = n;
    tree_.assign(2 * cap_, 0.0);
    for (std::size_t i = 0; i < std::min(old.size(), n); ++i) tree_[cap_ + i] = old[i];
    for (std::size_t i = cap_ - 1; i >= 1; --i) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
  }

  double get(std::size_t i) const { return tree_[cap_ + i]; }
  double total() const { return tree_.size() > 1 ? tree_[1] : 0.0; }

  void set(std::size_t i, double v) {
    std::size_t k = cap_ + i;
    if (tree_[k] == v) return;
    tree_[k] = v;
    // Parents are recomputed from their children, so rounding never drifts.
    for (k >>= 1; k >= 1; k >>= 1) tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
  }

  // Leaf whose cumulative interval contains x, 0 <= x < total().
  std::size_t find(double x) const {
    std::size_t k = 1;
    while (k < cap_) {
      if (x < tree_[2 * k] || tree_[2 * k + 1] <= 0.0) {
        k = 2 * k;
      } else {
        x -= tree_[2 * k];
        k = 2 * k + 1;
      }
    }
    std::size_t i = k - cap_;
    if (tree_[k] <= 0.0) {
      // Rounding at an interval edge; take the nearest positive leaf.
      std::size_t j = i;
      while (j > 0 && tree_[cap_ + j] <= 0.0) --j;
      if (tree_[cap_ + j] > 0.0) return j;
      j = i;
      while (j + 1 < n_ && tree_[cap_ + j] <= 0.0) ++j;
      return j;
    }
    return i;
  }

 private:
  std::size_t n_ = 0;
  std::size_t cap_ = 1;
  std::vector<double> tree_ = std::vector<double>(2, 0.0);
};

// Direct-method draw over an explicit rate list: the waiting time is
// -ln(u)/R and the event is the first index whose cumulative rate exceeds vR.
// Returns nothing when every rate is zero.
inline std::optional<std::pair<double, std::size_t>> sample_next_event(const std::vector<double>& rates, double u,
                                                                       double v) {
  double total = 0.0;
  for (double r : rates) total += r;
  if (!(total > 0.0)) return std::nullopt;
  const double dt = -std::log(u) / total;
  const double x = v * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (rates[i] <= 0.0) continue;
    last = i;
    acc += rates[i];
    if (x < acc) return std::make_pair(dt, i);
  }
  return std::make_pair(dt, last);
}

enum class EventType : std::uint8_t { Execute, Diffuse, Boundary, Import };
inline constexpr int kEventTypes = 4;

inline std::string_view event_name(EventType e) {
  static constexpr std::array<std::string_view, kEventTypes> names{"execute", "diffuse", "boundary", "import"};
  return names[static_cast<std::size_t>(e)];
}

struct Event {
  EventType type = EventType::Execute;
  int subject = -1;
  int site = -1;
  double t = 0.0;
  bool accepted = false;
};

struct RunSummary {
  std::uint64_t events = 0;
  std::array<std::uint64_t, kEventTypes> by_type{};
  std::array<std::uint64_t, kEventTypes> rejected{};
  bool stopped = false;    // predicate satisfied
  bool quiescent = false;  // no event had positive rate
  bool timed_out = false;
};

class Engine {
 public:
  explicit Engine(World& w, bool full_recompute = false) : w_(w), full_(full_recompute) { rebuild(); }

  World& world() { return w_; }
  const World& world() const { return w_; }

  void set_trace(std::ostream* os) { trace_ = os; }

  double total_rate() const { return groups_.total() + sites_.total(); }
  double group_rate(GroupId g, EventType e) const {
    const std::size_t i = 2 * static_cast<std::size_t>(g) + (e == EventType::Execute ? 1 : 0);
    return i < groups_.size() ? groups_.get(i) : 0.0;
  }
  double site_rate(int s, EventType e) const {
    return sites_.get(2 * static_cast<std::size_t>(s) + (e == EventType::Import ? 1 : 0));
  }

  // Recomputes every slot from scratch.
  void rebuild() {
    w_.sub.changes().clear();
    w_.sub.drain_born();
    w_.sub.drain_died();
    groups_ = SumTree(2 * static_cast<std::size_t>(std::max(1, w_.sub.group_capacity())));
    sites_ = SumTree(2 * static_cast<std::size_t>(w_.sub.site_count()));
    marks_.assign(static_cast<std::size_t>(w_.sub.site_count()), 0);
    for (int s = 0; s < w_.sub.site_count(); ++s) refresh_site(s);
  }

  // Draws and applies one event.  Returns nothing if no event can occur or
  // the next one would fall after t_max (the clock then stops at t_max).
  std::optional<Event> step(double t_max = INFINITY) {
    const double total = total_rate();
    if (!(total > 0.0)) return std::nullopt;
    const double u = w_.rng.uniform_open_closed();
    const double v = w_.rng.uniform();
    const double dt = -std::log(u) / total;
    if (w_.t + dt > t_max) {
      w_.t = t_max;
      return std::nullopt;
    }
    w_.t += dt;
    Event ev;
    ev.t = w_.t;
    const double x = v * total;
    if (x < groups_.total() && groups_.total() > 0.0) {
      const std::size_t k = groups_.find(x);
      ev.subject = static_cast<int>(k / 2);
      ev.type = k % 2 ? EventType::Execute : EventType::Diffuse;
      ev.site = w_.sub.group(ev.subject).site;
      ev.accepted = ev.type == EventType::Execute ? w_.apply_execute(ev.subject) : w_.apply_diffuse(ev.subject);
    } else {
      const std::size_t k = sites_.find(std::max(0.0, x - groups_.total()));
      ev.site = static_cast<int>(k / 2);
      ev.type = k % 2 ? EventType::Import : EventType::Boundary;
      ev.subject = w_.sub.site(ev.site).pile;
      ev.accepted = ev.type == EventType::Import ? w_.apply_import(ev.site) : w_.apply_boundary(ev.site);
    }
    if (trace_) {
      *trace_ << nlohmann::json{{"t", ev.t}, {"kind", event_name(ev.type)}, {"subject", ev.subject}, {"site", ev.site}}
                     .dump()
              << '\n';
    }
    update();
    return ev;
  }

  RunSummary run_until(const std::function<bool(const World&)>& stop, double t_max,
                       std::uint64_t max_events = UINT64_MAX,
                       const std::function<void(const Event&)>& on_event = {}) {
    RunSummary r;
    while (r.events < max_events) {
      if (stop && stop(w_)) {
        r.stopped = true;
        return r;
      }
      if (!(total_rate() > 0.0)) {
        r.quiescent = true;
        return r;
      }
      const auto ev = step(t_max);
      if (!ev) {
        r.timed_out = true;
        return r;
      }
      ++r.events;
      ++r.by_type[static_cast<std::size_t>(ev->type)];
      if (!ev->accepted) ++r.rejected[static_cast<std::size_t>(ev->type)];
      if (on_event) on_event(*ev);
    }
    if (stop && stop(w_)) r.stopped = true;
    return r;
  }

 private:
  void refresh_site(int s) {
    sites_.set(2 * static_cast<std::size_t>(s), w_.boundary_rate(s));
    sites_.set(2 * static_cast<std::size_t>(s) + 1, w_.import_rate(s));
    for (const GroupRates& g : w_.group_rates_at(s)) {
      groups_.set(2 * static_cast<std::size_t>(g.id), g.diffuse);
      groups_.set(2 * static_cast<std::size_t>(g.id) + 1, g.execute);
    }
  }

  void mark(int s, std::vector<int>& out) {
    if (marks_[static_cast<std::size_t>(s)] == epoch_) return;
    marks_[static_cast<std::size_t>(s)] = epoch_;
    out.push_back(s);
  }

  void update() {
    Substrate& sub = w_.sub;
    const std::size_t need = 2 * static_cast<std::size_t>(sub.group_capacity());
    if (need > groups_.size()) {
      std::size_t n = groups_.size();
      while (n < need) n *= 2;
      groups_.resize(n);
    }
    for (GroupId g : sub.drain_died()) {
      groups_.set(2 * static_cast<std::size_t>(g), 0.0);
      groups_.set(2 * static_cast<std::size_t>(g) + 1, 0.0);
    }
    sub.drain_born();
    Changes& ch = sub.changes();
    if (full_ || ch.everything) {
      ch.clear();
      for (int s = 0; s < sub.site_count(); ++s) refresh_site(s);
      return;
    }
    ++epoch_;
    std::vector<int> dirty;
    // Bud placement looks three sites out; plans, boundary status and
    // diffusion targets look less far.
    for (int s : ch.sites) {
      for (int dy = -kReach; dy <= kReach; ++dy) {
        for (int dx = -kReach; dx <= kReach; ++dx) {
          const int t = sub.offset(s, dx, dy);
          if (t >= 0) mark(t, dirty);
        }
      }
    }
    // Idle programs search their whole compartment.
    std::vector<int> piles = ch.piles;
    for (int s : dirty) {
      if (sub.site(s).pile >= 0) piles.push_back(sub.site(s).pile);
    }
    std::sort(piles.begin(), piles.end());
    piles.erase(std::unique(piles.begin(), piles.end()), piles.end());
    for (int p : piles) {
      for (int s : sub.pile(p).sites) mark(s, dirty);
    }
    ch.clear();
    for (int s : dirty) refresh_site(s);
  }

  static constexpr int kReach = 3;

  World& w_;
  bool full_;
  SumTree groups_;
  SumTree sites_;
  std::vector<int> marks_;
  int epoch_ = 0;
  std::ostream* trace_ = nullptr;
};

}  // namespace parcell
