#include <parcell/pile.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace parcell;

namespace {

constexpr std::array<GroupState, 6> kStates{GroupState::Neutral, GroupState::Give,  GroupState::Take,
                                            GroupState::Open,    GroupState::Close, GroupState::Export};

int rect_pile(Substrate& sub, int x0, int y0, int w, int h) {
  const int p = sub.create_pile();
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) sub.add_site(p, sub.index(x, y));
  }
  return p;
}

int occupied(const Substrate& sub) {
  int n = 0;
  for (int s = 0; s < sub.site_count(); ++s) n += sub.site(s).pile >= 0 ? 1 : 0;
  return n;
}

}  // namespace

TEST(Permeability, FixedTable) {
  using C = Compartment;
  EXPECT_TRUE(permeability(GroupState::Give, C::Cell, C::Vacuole, false));
  EXPECT_TRUE(permeability(GroupState::Take, C::Vacuole, C::Cell, false));
  EXPECT_TRUE(permeability(GroupState::Open, C::Mother, C::Septum, true));
  EXPECT_TRUE(permeability(GroupState::Close, C::Septum, C::Mother, true));
  EXPECT_TRUE(permeability(GroupState::Close, C::Daughter, C::Septum, true));
  EXPECT_TRUE(permeability(GroupState::Export, C::Mother, C::Daughter, true));
  EXPECT_FALSE(permeability(GroupState::Export, C::Mother, C::Daughter, false));
  EXPECT_FALSE(permeability(GroupState::Neutral, C::Mother, C::Daughter, true));
  EXPECT_FALSE(permeability(GroupState::Give, C::Vacuole, C::Cell, false));
  EXPECT_FALSE(permeability(GroupState::Open, C::Septum, C::Mother, true));
}

TEST(Permeability, OnlyListedCombinationsPass) {
  using C = Compartment;
  const std::set<std::tuple<GroupState, C, C>> allowed{
      {GroupState::Give, C::Cell, C::Vacuole},       {GroupState::Take, C::Vacuole, C::Cell},
      {GroupState::Open, C::Mother, C::Septum},      {GroupState::Close, C::Septum, C::Mother},
      {GroupState::Close, C::Daughter, C::Septum},   {GroupState::Export, C::Mother, C::Daughter}};
  constexpr std::array<C, 5> all{C::Cell, C::Vacuole, C::Mother, C::Septum, C::Daughter};
  int checked = 0;
  for (GroupState st : kStates) {
    for (C a : all) {
      for (C b : all) {
        if (a == b) {
          EXPECT_TRUE(permeability(st, a, b, true));
          continue;
        }
        if (!compartments_adjacent(a, b)) {
          EXPECT_THROW(permeability(st, a, b, true), TopologyError);
          continue;
        }
        EXPECT_EQ(permeability(st, a, b, true), allowed.count({st, a, b}) == 1);
        EXPECT_EQ(permeability(st, a, b, true), permeability(st, a, b, true));
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, 6 * 8);
}

TEST(Permeability, NonAdjacentThrows) {
  EXPECT_THROW(permeability(GroupState::Open, Compartment::Cell, Compartment::Septum, true), TopologyError);
  EXPECT_THROW(permeability(GroupState::Give, Compartment::Vacuole, Compartment::Daughter, true), TopologyError);
}

TEST(Boundary, CutVertexIsNotRemoved) {
  Substrate sub(8, 8);
  const int p = sub.create_pile();
  // An L shape whose corner joins the two arms.
  for (int s : {sub.index(2, 2), sub.index(3, 2), sub.index(3, 3)}) sub.add_site(p, s);
  // Retracting the corner into either arm would split the other one off.
  EXPECT_FALSE(sub.try_boundary_move(p, sub.index(3, 2), 2));
  EXPECT_FALSE(sub.try_boundary_move(p, sub.index(3, 2), 3));
  EXPECT_TRUE(sub.connected(p));
  EXPECT_EQ(sub.pile(p).sites.size(), 3u);
}

TEST(Boundary, GrowthIntoFreeSiteWhenFull) {
  Substrate sub(8, 8, 16, 10.0);
  const int p = sub.create_pile();
  sub.add_site(p, sub.index(3, 3));
  Group g;
  g.items.emplace_back(Program{Kind::Y, 0, Tags(12, 0)});
  sub.add_group(std::move(g), sub.index(3, 3));
  EXPECT_TRUE(sub.try_boundary_move(p, sub.index(3, 3), 1));
  EXPECT_EQ(sub.pile(p).sites.size(), 2u);
  EXPECT_TRUE(sub.connected(p));
}

TEST(Boundary, OtherPilesBlock) {
  Substrate sub(8, 8, 16, 1.0);
  const int p = rect_pile(sub, 1, 1, 1, 1);
  rect_pile(sub, 2, 1, 1, 1);
  Group g;
  g.items.emplace_back(Program{Kind::Y, 0, Tags(8, 0)});
  sub.add_group(std::move(g), sub.index(1, 1));
  EXPECT_FALSE(sub.try_boundary_move(p, sub.index(1, 1), 1));
}

// Every footprint reachable from a 2x2 pile by any sequence of boundary
// moves, found by breadth-first search over whole footprints.
TEST(BoundaryProperty, TwoByTwoShrinkEnumeration) {
  using Footprint = std::vector<int>;
  auto build = [](const Footprint& f, Substrate& sub) {
    const int p = sub.create_pile();
    for (int s : f) sub.add_site(p, s);
    return p;
  };
  constexpr int W = 6;
  Substrate probe(W, W);
  Footprint start{probe.index(2, 2), probe.index(3, 2), probe.index(2, 3), probe.index(3, 3)};
  std::set<Footprint> seen{start};
  std::vector<Footprint> queue{start};
  std::size_t min_size = start.size();
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Footprint cur = queue[head];
    for (int s : cur) {
      for (int d = 0; d < 4; ++d) {
        Substrate sub(W, W);
        const int p = build(cur, sub);
        if (!sub.try_boundary_move(p, s, d)) {
          Footprint same = sub.pile(p).sites;
          std::sort(same.begin(), same.end());
          EXPECT_EQ(same, cur);
          continue;
        }
        ASSERT_TRUE(sub.connected(p));
        Footprint next = sub.pile(p).sites;
        std::sort(next.begin(), next.end());
        ASSERT_GE(next.size(), 1u);
        min_size = std::min(min_size, next.size());
        if (seen.insert(next).second) queue.push_back(next);
      }
    }
  }
  EXPECT_EQ(min_size, 1u);
  EXPECT_GT(seen.size(), 4u);
}

TEST(BoundaryProperty, RandomMovesKeepPilesConnected) {
  Substrate sub(20, 20, 16, 40.0);
  const int p = rect_pile(sub, 6, 6, 4, 4);
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    Group g;
    g.items.emplace_back(Program{Kind::B, i, Tags(static_cast<std::size_t>(20 + i), 0)});
    const auto& sites = sub.pile(p).sites;
    sub.add_group(std::move(g), sites[rng.below(sites.size())]);
  }
  const long mass = sub.pile_mass(p);
  for (int i = 0; i < 5000; ++i) {
    const auto& sites = sub.pile(p).sites;
    const int s = sites[rng.below(sites.size())];
    sub.try_boundary_move(p, s, static_cast<int>(rng.below(4)));
    ASSERT_TRUE(sub.connected(p)) << "after move " << i;
    ASSERT_EQ(sub.pile_mass(p), mass);
  }
}

TEST(Bud, AnnulusAroundSeptum) {
  Substrate sub(12, 12);
  const int p = rect_pile(sub, 2, 2, 3, 3);
  const int anchor = sub.index(4, 3);
  ASSERT_TRUE(sub.bud_centre(anchor).has_value());
  const auto bud = sub.create_bud(p, anchor);
  ASSERT_TRUE(bud.has_value());
  EXPECT_EQ(sub.site(bud->septum).role, Role::Septum);
  EXPECT_EQ(sub.pile(p).count(Role::Septum), 1);
  EXPECT_EQ(sub.pile(p).count(Role::Daughter), 8);
  for (int r : bud->ring) {
    EXPECT_EQ(sub.site(r).role, Role::Daughter);
    EXPECT_EQ(std::max(std::abs(sub.x_of(r) - sub.x_of(bud->septum)), std::abs(sub.y_of(r) - sub.y_of(bud->septum))),
              1);
  }
  EXPECT_TRUE(sub.pile(p).septum_open);
  EXPECT_TRUE(sub.connected(p));
  EXPECT_EQ(sub.compartment(anchor), Compartment::Mother);
  EXPECT_FALSE(sub.contact_sites(p).empty());
}

TEST(Bud, WritesIndependentOfPileSize) {
  auto writes_for = [](int w, int h) {
    Substrate sub(40, 40);
    const int p = rect_pile(sub, 2, 2, w, h);
    const int anchor = sub.index(2 + w - 1, 2);
    const std::uint64_t before = sub.site_writes();
    EXPECT_TRUE(sub.create_bud(p, anchor).has_value());
    return sub.site_writes() - before;
  };
  const auto small = writes_for(5, 4);
  const auto large = writes_for(20, 10);
  EXPECT_EQ(small, large);
  EXPECT_LE(small, 9u);
}

TEST(Bud, CrowdedNeighbourhoodRejected) {
  Substrate sub(12, 12);
  const int p = rect_pile(sub, 2, 2, 3, 3);
  rect_pile(sub, 5, 0, 7, 12);
  rect_pile(sub, 0, 5, 5, 7);
  const int occ = occupied(sub);
  EXPECT_FALSE(sub.create_bud(p, sub.index(4, 4)).has_value());
  EXPECT_FALSE(sub.pile(p).has_bud());
  EXPECT_EQ(occupied(sub), occ);
}

TEST(Bud, SecondBudRefused) {
  Substrate sub(16, 16);
  const int p = rect_pile(sub, 4, 4, 3, 3);
  ASSERT_TRUE(sub.create_bud(p, sub.index(6, 5)).has_value());
  EXPECT_FALSE(sub.create_bud(p, sub.index(4, 5)).has_value());
}

TEST(Eject, SplitsIntoTwoConnectedPiles) {
  Substrate sub(16, 16);
  const int p = rect_pile(sub, 3, 3, 4, 4);
  ASSERT_TRUE(sub.create_bud(p, sub.index(6, 4)).has_value());
  const int septum = sub.pile(p).septum;
  const int before = occupied(sub);
  const auto [m, q] = sub.eject_septum(p);
  EXPECT_EQ(m, p);
  EXPECT_NE(q, p);
  EXPECT_EQ(occupied(sub), before - 1);
  EXPECT_EQ(sub.site(septum).pile, -1);
  EXPECT_EQ(sub.pile(q).sites.size(), 8u);
  EXPECT_EQ(sub.pile(m).sites.size(), 16u);
  EXPECT_TRUE(sub.connected(m));
  EXPECT_TRUE(sub.connected(q));
  for (int s : sub.pile(q).sites) {
    EXPECT_EQ(sub.site(s).role, Role::Body);
    EXPECT_EQ(std::count(sub.pile(m).sites.begin(), sub.pile(m).sites.end(), s), 0);
  }
  EXPECT_FALSE(sub.pile(m).has_bud());
  EXPECT_TRUE(sub.fill_hole(q, septum));
  EXPECT_EQ(sub.pile(q).sites.size(), 9u);
  EXPECT_TRUE(sub.connected(q));
}

TEST(Eject, OccupiedSeptumRefused) {
  Substrate sub(16, 16);
  const int p = rect_pile(sub, 3, 3, 4, 4);
  const auto bud = sub.create_bud(p, sub.index(6, 4));
  ASSERT_TRUE(bud.has_value());
  Group z;
  z.items.emplace_back(Program{Kind::Z, 0, Tags(43, 0)});
  sub.add_group(std::move(z), bud->septum);
  EXPECT_THROW(sub.eject_septum(p), SequencingError);
}

TEST(Eject, DaughterCytosolTravelsWithDaughter) {
  Substrate sub(16, 16);
  const int p = rect_pile(sub, 3, 3, 4, 4);
  ASSERT_TRUE(sub.create_bud(p, sub.index(6, 4)).has_value());
  sub.pile(p).pool(Role::Daughter).add(3, 81);
  const auto [m, q] = sub.eject_septum(p);
  EXPECT_EQ(sub.pile(q).pool(Role::Body).total(), 81);
  EXPECT_EQ(sub.pile(m).pool(Role::Daughter).total(), 0);
}

TEST(Diffusion, SeptumPortalJoinsContactSites) {
  Substrate sub(16, 16);
  const int p = rect_pile(sub, 3, 3, 4, 4);
  const auto bud = sub.create_bud(p, sub.index(6, 4));
  ASSERT_TRUE(bud.has_value());
  const auto contacts = sub.contact_sites(p);
  ASSERT_FALSE(contacts.empty());
  const auto from_septum = sub.diffusion_targets(bud->septum);
  for (int c : contacts) {
    EXPECT_NE(std::find(from_septum.begin(), from_septum.end(), c), from_septum.end());
    const auto back = sub.diffusion_targets(c);
    EXPECT_NE(std::find(back.begin(), back.end(), bud->septum), back.end());
  }
}
