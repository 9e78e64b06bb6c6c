#include <parcell/engine.hpp>

#include <gtest/gtest.h>

using namespace parcell;

namespace {

World make_world(std::uint64_t seed, int n_b, int n_e) {
  GenomeConfig g;
  g.n_B = n_b;
  g.n_E = n_e;
  return World(WorldConfig{}, g, RateConfig{}, seed);
}

int fissions_of(const World& w, int mother) {
  int k = 0;
  for (const auto& r : w.records) k += r.mother == mother ? 1 : 0;
  return k;
}

// Runs the engine until `mother` has divided `k` times.
bool run_fissions(World& w, Engine& e, int mother, int k, double t_max = 2e5) {
  while (fissions_of(w, mother) < k) {
    if (!e.step(t_max)) return false;
  }
  return true;
}

std::vector<GenerationRecord> records_of(const World& w, int mother) {
  std::vector<GenerationRecord> out;
  for (const auto& r : w.records) {
    if (r.mother == mother) out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(Genome, MassFromProgramLengths) {
  // Sum of the nine program lengths, each paired with a description.
  EXPECT_EQ(2 * (42 + 62 + 55 + 63 + 74 + 92 + 89 + 8 + 43), 1056);
  World w = make_world(1, 1, 1);
  const int p = w.init_mother(24, 24);
  EXPECT_EQ(w.genome_mass(p), 1056);
  EXPECT_EQ(w.genome.genome_mass(), 1056);
}

TEST(Genome, ExtraCopiesAddOnePairEach) {
  for (int n = 1; n <= 6; ++n) {
    World w = make_world(static_cast<std::uint64_t>(n), n, n);
    const int p = w.init_mother(24, 24);
    EXPECT_EQ(w.genome_mass(p), 1056 + 124L * (n - 1) + 148L * (n - 1)) << "n=" << n;
  }
  World w = make_world(2, 4, 4);
  EXPECT_EQ(w.genome_mass(w.init_mother(24, 24)), 1872);
}

TEST(Genome, InitialCensus) {
  World w = make_world(3, 3, 2);
  const int p = w.init_mother(24, 24);
  const Census c = w.gene_census(p);
  EXPECT_EQ(c.complete_of(Kind::B), 3);
  EXPECT_EQ(c.complete_of(Kind::E), 2);
  for (Kind k : {Kind::A, Kind::C, Kind::D, Kind::F, Kind::X, Kind::Y, Kind::Z}) EXPECT_EQ(c.complete_of(k), 1);
  for (int k = 0; k < kKindCount; ++k) EXPECT_EQ(c.in_flight[static_cast<std::size_t>(k)], 0);
  EXPECT_EQ(w.lifecycle(p), Lifecycle::Budding);
  EXPECT_EQ(w.sub.pile(p).pool(Role::Body).total(), 320);
}

TEST(Genome, InvalidConfigRejected) {
  GenomeConfig g;
  g.n_B = 0;
  EXPECT_THROW(World(WorldConfig{}, g, RateConfig{}, 1), std::invalid_argument);
  RateConfig r;
  r.beta = 0.0;
  EXPECT_THROW(World(WorldConfig{}, GenomeConfig{}, r, 1), std::invalid_argument);
}

TEST(Sequential, GenomeIsOnePair) {
  World w = make_world(1, 1, 1);
  const int p = w.build_sequential_cell(24, 24);
  EXPECT_EQ(w.genome_mass(p), 734);
  EXPECT_EQ(length_of(Kind::Seq) * 2, 734);
  const Census c = w.gene_census(p);
  EXPECT_EQ(c.complete_of(Kind::Seq), 1);
}

TEST(Sequential, NeverMoreThanOneRunnableProgram) {
  World w = make_world(4, 1, 1);
  const int p = w.build_sequential_cell(24, 24);
  Engine e(w);
  while (w.records.empty()) {
    ASSERT_TRUE(e.step(1e5));
    int runnable = 0;
    for (int s : w.sub.pile(p).sites) {
      for (GroupId g : w.sub.site(s).stack) runnable += w.runnable(g) ? 1 : 0;
    }
    ASSERT_LE(runnable, 1);
  }
  const auto& r = w.records.front();
  EXPECT_TRUE(r.complement_ok);
  EXPECT_EQ(r.daughter_census.complete_of(Kind::Seq), 1);
  EXPECT_EQ(r.genome_mass, 734);
  EXPECT_GT(r.replication_time, 0.0);
}

TEST(Fission, DaughterReceivesFullComplement) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    World w = make_world(seed, 2, 2);
    const int p = w.init_mother(24, 24);
    const long mass = w.total_mass();
    Engine e(w);
    ASSERT_TRUE(run_fissions(w, e, p, 1));
    const auto& r = w.records.front();
    EXPECT_TRUE(r.complement_ok);
    for (Kind k : kCellKinds) EXPECT_GE(r.daughter_census.complete_of(k), 1) << kind_name(k);
    EXPECT_EQ(r.cycle, 1);
    EXPECT_GT(r.replication_ops, 0u);
    EXPECT_GE(r.cell_mass, r.genome_mass);
    EXPECT_EQ(w.total_mass(), mass);
    EXPECT_TRUE(check_invariants(w, mass).ok());
    EXPECT_TRUE(w.sub.connected(r.mother));
    EXPECT_TRUE(w.sub.connected(r.daughter));
    EXPECT_FALSE(w.sub.pile(r.mother).has_bud());
  }
}

TEST(Fission, CleanCycleCopiesEveryGene) {
  World w = make_world(6, 1, 1);
  const int p = w.init_mother(24, 24);
  Engine e(w);
  ASSERT_TRUE(run_fissions(w, e, p, 1));
  const auto& r = w.records.front();
  ASSERT_EQ(r.race_events, 0);
  for (Kind k : kCellKinds) EXPECT_EQ(r.daughter_census.complete_of(k), 1) << kind_name(k);
  // The mother keeps every description; X is spent and rebuilt next cycle.
  const Census m = w.gene_census(p);
  for (Kind k : kCellKinds) {
    if (k != Kind::X) EXPECT_GE(m.complete_of(k) + m.in_flight_of(k), 1) << kind_name(k);
  }
  bool has_x_description = false;
  for (int s : w.sub.pile(p).sites) {
    for (GroupId g : w.sub.site(s).stack) {
      const Zipper* z = w.sub.group(g).zipper();
      has_x_description = has_x_description || (z && z->kind == Kind::X);
    }
  }
  EXPECT_TRUE(has_x_description);
}

TEST(Fission, DaughterDividesInTurn) {
  World w = make_world(8, 1, 1);
  const int p = w.init_mother(24, 24);
  const long mass = w.total_mass();
  Engine e(w);
  ASSERT_TRUE(run_fissions(w, e, p, 1));
  const int d = w.records.front().daughter;
  EXPECT_EQ(w.cell(d).generation, 1);
  ASSERT_TRUE(run_fissions(w, e, d, 1));
  const auto rec = records_of(w, d).front();
  EXPECT_TRUE(rec.complement_ok);
  EXPECT_TRUE(check_invariants(w, mass).ok());
}

// Slowing one extra B copy makes the septum close before it is finished.
TEST(Race, DeficitMovesToNextDaughter) {
  World w = make_world(1, 3, 1);
  w.throttle = Throttle{Kind::B, 2, 0.01, 1};
  const int p = w.init_mother(24, 24);
  Engine e(w);
  ASSERT_TRUE(run_fissions(w, e, p, 2));
  const auto recs = records_of(w, p);
  ASSERT_EQ(recs[0].race_events, 1);
  EXPECT_EQ(recs[0].daughter_census.complete_of(Kind::B), 2);
  ASSERT_EQ(recs[1].race_events, 0);
  EXPECT_EQ(recs[1].daughter_census.complete_of(Kind::B), 4);
  EXPECT_TRUE(recs[0].complement_ok);
  EXPECT_TRUE(recs[1].complement_ok);
}

TEST(RaceProperty, CensusArithmeticOverSeeds) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    World w = make_world(seed, 3, 1);
    w.throttle = Throttle{Kind::B, 2, 0.01, 1};
    const int p = w.init_mother(24, 24);
    Engine e(w);
    ASSERT_TRUE(run_fissions(w, e, p, 2));
    const auto recs = records_of(w, p);
    const int b1 = recs[0].daughter_census.complete_of(Kind::B);
    const int b2 = recs[1].daughter_census.complete_of(Kind::B);
    EXPECT_GE(recs[0].race_events, 1) << "seed " << seed;
    EXPECT_EQ(b1 + recs[0].race_events, 3) << "seed " << seed;
    EXPECT_EQ(b2, 3 + recs[0].race_events - recs[1].race_events) << "seed " << seed;
  }
}

// At the moment of fission, complete B genes in mother and daughter plus
// unfinished ones in the mother account for two genomes' worth.
TEST(RaceProperty, GeneConservationAtFission) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    World w = make_world(seed, 3, 2);
    if (seed % 2 == 0) w.throttle = Throttle{Kind::B, 1, 0.02, 1};
    const int p = w.init_mother(24, 24);
    Engine e(w);
    Census mother_at_fission;
    while (w.records.empty()) {
      ASSERT_TRUE(e.step(2e5));
      if (!w.records.empty()) mother_at_fission = w.gene_census(p);
    }
    const auto& r = w.records.front();
    for (auto [k, n] : {std::pair{Kind::B, 3}, std::pair{Kind::E, 2}}) {
      const int total = mother_at_fission.complete_of(k) + r.daughter_census.complete_of(k) +
                        (r.race_events > 0 ? mother_at_fission.in_flight_of(k) : 0);
      EXPECT_EQ(total, 2 * n) << kind_name(k) << " seed " << seed;
    }
  }
}

TEST(Lifecycle, ZWaitsForYProof) {
  World w = make_world(5, 1, 1);
  const int p = w.init_mother(24, 24);
  Engine e(w);
  bool saw_daughter_z_before_proof = false;
  while (w.records.empty()) {
    ASSERT_TRUE(e.step(1e5));
    const Pile& P = w.sub.pile(p);
    if (!P.has_bud()) continue;
    for (GroupId g : w.sub.site(P.septum).stack) {
      const Program* pr = w.sub.group(g).actor();
      if (pr && pr->kind == Kind::Z) ASSERT_TRUE(w.cell(p).y_proof);
    }
    if (w.cell(p).y_proof) continue;
    for (int s : P.sites) {
      if (w.sub.site(s).role != Role::Daughter) continue;
      for (GroupId g : w.sub.site(s).stack) {
        const Program* pr = w.sub.group(g).actor();
        if (pr && pr->kind == Kind::Z) {
          saw_daughter_z_before_proof = true;
          EXPECT_FALSE(w.runnable(g));
        }
      }
    }
  }
  EXPECT_TRUE(saw_daughter_z_before_proof);
}

TEST(Lifecycle, BuddingPrecedesExport) {
  World w = make_world(9, 2, 2);
  const int p = w.init_mother(24, 24);
  Engine e(w);
  Lifecycle last = Lifecycle::Budding;
  bool exported = false;
  while (w.records.empty()) {
    ASSERT_TRUE(e.step(1e5));
    if (!w.records.empty()) break;
    const Pile& P = w.sub.pile(p);
    if (P.has_bud()) {
      for (int s : P.sites) {
        if (w.sub.site(s).role == Role::Daughter && !w.sub.site(s).stack.empty()) exported = true;
      }
    } else {
      EXPECT_FALSE(exported);
    }
    const Lifecycle now = w.lifecycle(p);
    EXPECT_GE(static_cast<int>(now), static_cast<int>(last));
    last = now;
  }
  EXPECT_TRUE(exported);
}

TEST(Invariants, MassConservedThroughCycles) {
  World w = make_world(12, 2, 2);
  w.init_mother(24, 24);
  const long mass = w.total_mass();
  Engine e(w);
  for (int i = 0; i < 50000; ++i) {
    if (!e.step(2e5)) break;
    if (i % 97 == 0) ASSERT_TRUE(check_invariants(w, mass).ok()) << "event " << i;
  }
  EXPECT_TRUE(check_invariants(w, mass).ok());
}

TEST(Records, JsonFields) {
  World w = make_world(3, 1, 1);
  const int p = w.init_mother(24, 24);
  Engine e(w);
  ASSERT_TRUE(run_fissions(w, e, p, 1));
  const auto j = to_json(w.records.front());
  for (const char* key : {"mother", "daughter", "cycle", "t", "replication_time", "replication_ops", "genome_mass",
                          "cell_mass", "daughter_census", "race_events"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["daughter_census"]["Y"], 1);
}
