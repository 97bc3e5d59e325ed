#include <gtest/gtest.h>

#include <set>

#include "gcwn/equivalence.hpp"
#include "helpers.hpp"
#include "support/generators.hpp"

using namespace gcwn;
using namespace gcwn::unit;

namespace {

// Naive greatest fixpoint straight from the definitions, on the spaces the
// checker explored.
class Oracle {
 public:
  Oracle(const BisimResult& r) : r_(r) {}

  bool related() {
    const std::size_t na = r_.left.states.size(), nb = r_.right.states.size();
    std::set<StatePair> rel;
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) rel.insert({i, j});
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (auto it = rel.begin(); it != rel.end();) {
        if (survives(*it, rel, false) && survives(*it, rel, true)) {
          ++it;
        } else {
          it = rel.erase(it);
          changed = true;
        }
      }
    }
    return rel.count({0, 0}) > 0;
  }

 private:
  static std::set<std::size_t> reach(const StateSpace& s, std::size_t from, bool tau_only) {
    std::set<std::size_t> seen{from};
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& e : s.edges) {
        if (seen.count(e.from) && (!tau_only || e.label.is_tau()) && seen.insert(e.to).second) grew = true;
      }
    }
    return seen;
  }

  std::set<std::size_t> answers(const StateSpace& s, std::size_t y, const Label& l, bool swapped) {
    if (r_.barbed) return reach(s, y, false);
    if (l.is_tau()) return reach(s, y, true);
    std::set<std::size_t> out;
    for (const auto& [p, q] : r_.relation) {
      if ((swapped ? q : p) != l.location) continue;
      Label m = l;
      m.location = swapped ? p : q;
      for (std::size_t mid : reach(s, y, true)) {
        for (const auto& e : s.edges) {
          if (e.from != mid || !(e.label == m)) continue;
          auto after = reach(s, e.to, true);
          out.insert(after.begin(), after.end());
        }
      }
    }
    return out;
  }

  bool survives(const StatePair& p, const std::set<StatePair>& rel, bool swapped) {
    const StateSpace& a = swapped ? r_.right : r_.left;
    const StateSpace& b = swapped ? r_.left : r_.right;
    const std::size_t x = swapped ? p.right : p.left, y = swapped ? p.left : p.right;
    if (r_.barbed) {
      for (const auto& c : barbs(a.states[x])) {
        bool found = false;
        for (std::size_t t : reach(b, y, false)) found = found || barbs(b.states[t]).count(c);
        if (!found) return false;
      }
    }
    for (const auto& e : a.edges) {
      if (e.from != x) continue;
      bool ok = false;
      for (std::size_t t : answers(b, y, e.label, swapped)) {
        ok = ok || rel.count(swapped ? StatePair{t, e.to} : StatePair{e.to, t});
      }
      if (!ok) return false;
    }
    return true;
  }

  const BisimResult& r_;
};

void expect_checked(const BisimResult& r) {
  std::string why;
  if (r.verdict == Verdict::Related) {
    EXPECT_TRUE(verify_witness(r, &why)) << why;
  } else if (r.verdict == Verdict::NotRelated) {
    EXPECT_TRUE(verify_certificate(r, &why)) << why;
  }
}

}  // namespace

TEST(Relation, Helpers) {
  auto e = make_relation({{L("2"), L("3")}, {L("1"), L("3")}, {L("1"), L("3")}});
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].first, L("1"));
  EXPECT_EQ(to_string(e), "{(1,3), (2,3)}");
  EXPECT_EQ(inverse(e)[0], (LocPair{L("3"), L("1")}));
}

TEST(WeakBisim, TransferProtocolMatchesSpecification) {
  auto m = case_study("ex4");
  const auto env = m.environment();
  auto r = weak_bisim(net(m, "Sys"), make_relation({{L("1"), L("3")}, {L("2"), L("3")}}),
                      net(m, "Spec"), env);
  EXPECT_EQ(r.verdict, Verdict::Related);
  EXPECT_EQ(r.witness.size(), 4u);
  expect_checked(r);

  auto only_one = weak_bisim(net(m, "Sys"), make_relation({{L("1"), L("3")}}), net(m, "Spec"), env);
  EXPECT_EQ(only_one.verdict, Verdict::NotRelated);
  expect_checked(only_one);

  auto none = weak_bisim(net(m, "Sys"), {}, net(m, "Spec"), env);
  EXPECT_EQ(none.verdict, Verdict::NotRelated);
  ASSERT_FALSE(none.certificate.empty());
  expect_checked(none);

  EXPECT_THROW(weak_bisim(net(m, "Sys"), make_relation({{L("9"), L("3")}}), net(m, "Spec"), env), Error);
}

TEST(WeakBisim, SerializationIsStable) {
  auto m = case_study("ex4");
  const auto e = make_relation({{L("1"), L("3")}, {L("2"), L("3")}});
  auto a = serialize(weak_bisim(net(m, "Sys"), e, net(m, "Spec"), m.environment()));
  auto b = serialize(weak_bisim(net(m, "Sys"), e, net(m, "Spec"), m.environment()));
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("verdict: Related"), std::string::npos);
}

TEST(BarbedBisim, AttackIsObservable) {
  auto m = case_study("aran");
  auto r = weak_barbed_bisim(net(m, "M"), net(m, "N"), m.environment());
  EXPECT_EQ(r.verdict, Verdict::NotRelated);
  expect_checked(r);
  auto self = weak_barbed_bisim(net(m, "M"), net(m, "M"), m.environment());
  EXPECT_EQ(self.verdict, Verdict::Related);
  expect_checked(self);
}

TEST(BarbedBisim, TruncationIsInconclusive) {
  auto m = case_study("aran");
  BisimOptions o;
  o.bounds.max_states = 3;
  auto r = weak_barbed_bisim(net(m, "M"), net(m, "M"), m.environment(), o);
  EXPECT_EQ(r.verdict, Verdict::Inconclusive);
}

TEST(Search, FindsSmallestRelation) {
  auto m = case_study("ex4");
  auto s = search_E(net(m, "Sys"), net(m, "Spec"), m.environment());
  EXPECT_EQ(s.verdict, Verdict::Related);
  ASSERT_TRUE(s.relation.has_value());
  EXPECT_EQ(*s.relation, make_relation({{L("1"), L("3")}, {L("2"), L("3")}}));
  EXPECT_THROW(search_E(net(m, "Sys"), net(m, "Spec"), m.environment(), {}, 1), Error);
}

TEST(Contexts, AdaptedLinks) {
  const LocRelation e = make_relation({{L("1"), L("3")}, {L("2"), L("3")}});
  const std::vector<LocPair> c = {{L("o"), L("1")}, {L("o"), L("2")}};
  const auto d = derive_links(c, e);
  EXPECT_EQ(d, (std::vector<LocPair>{{L("o"), L("3")}}));
  EXPECT_TRUE(adapted(c, d, e));
  // Linking o to only one of 1 and 2 is not adapted to E.
  EXPECT_FALSE(adapted({{L("o"), L("1")}}, d, e));

  auto m = case_study("ex4");
  auto o = parse("net O { nodes { o: c1(x).0; } }");
  EXPECT_THROW(parallel_extend(net(o, "O"), {{L("o"), L("1")}}, net(m, "Sys"), e, net(m, "Spec"),
                               m.environment(), d),
               Error);
  auto ext = parallel_extend(net(o, "O"), c, net(m, "Sys"), e, net(m, "Spec"), m.environment());
  EXPECT_EQ(weak_bisim(ext.left, ext.relation, ext.right, m.environment()).verdict, Verdict::Related);
}

TEST(Contexts, HoleIsReplaced) {
  auto m = case_study("ex1");
  auto n = context_apply(bare_hole(), net(m, "N"), m.environment());
  EXPECT_TRUE(congruent(n, net(m, "N"), m.environment()));
}

TEST(Probe, TransferProtocolSurvivesContexts) {
  auto m = case_study("ex4");
  auto r = soundness_probe(net(m, "Sys"), make_relation({{L("1"), L("3")}, {L("2"), L("3")}}),
                           net(m, "Spec"), m.environment(), 10, 3);
  EXPECT_EQ(r.precondition, Verdict::Related);
  EXPECT_EQ(r.trials.size(), 10u);
  EXPECT_EQ(r.failures, 0u);
  auto again = soundness_probe(net(m, "Sys"), make_relation({{L("1"), L("3")}, {L("2"), L("3")}}),
                               net(m, "Spec"), m.environment(), 10, 3);
  EXPECT_EQ(to_string(r), to_string(again));
}

TEST(Differential, CheckerAgreesWithNaiveFixpoint) {
  gcwn::testing::Rng rng(42);
  std::size_t related = 0, refuted = 0;
  for (int i = 0; i < 150; ++i) {
    gcwn::testing::GenParams gp;
    gp.max_nodes = 3;
    gp.max_depth = 4;
    gp.definitions = 0;
    auto a = gcwn::testing::random_network(rng, gp);
    Network right;
    if (rng.chance(1, 2)) {
      std::map<Location, Location> rename;
      for (const auto& p : a.network.topology.locations) rename[p] = Location("n" + p.name);
      right = gcwn::testing::relocate(gcwn::testing::congruent_variant(a.network, a.env, rng), rename);
    } else {
      gp.location_prefix = "n";
      right = gcwn::testing::random_network(rng, gp).network;
    }
    LocRelation e;
    for (const auto& p : a.network.topology.locations) {
      for (const auto& q : right.topology.locations) {
        if (rng.chance(1, 2) || q.name == "n" + p.name) e.emplace_back(p, q);
      }
    }
    e = make_relation(e);
    auto weak = weak_bisim(a.network, e, right, a.env);
    ASSERT_NE(weak.verdict, Verdict::Inconclusive);
    EXPECT_EQ(weak.verdict == Verdict::Related, Oracle(weak).related()) << "instance " << i;
    expect_checked(weak);
    (weak.verdict == Verdict::Related ? related : refuted)++;

    auto barbed = weak_barbed_bisim(a.network, right, a.env);
    EXPECT_EQ(barbed.verdict == Verdict::Related, Oracle(barbed).related()) << "instance " << i;
    expect_checked(barbed);
  }
  EXPECT_GT(related, 10u);
  EXPECT_GT(refuted, 10u);
}
