#include <gtest/gtest.h>

#include <algorithm>

#include "gcwn/normal.hpp"
#include "helpers.hpp"

using namespace gcwn;
using namespace gcwn::unit;

namespace {

bool has(const std::vector<Diagnostic>& ds, DiagnosticKind k) {
  return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.kind == k; });
}

Network one(const std::string& text) { return net(parse(text), "N"); }

std::string key(const std::string& text) {
  auto m = parse(text);
  return normalize_network(net(m, "N"), m.environment()).key;
}

}  // namespace

TEST(Topology, SortsAndDeduplicates) {
  auto t = Topology::make({L("b"), L("10"), L("2"), L("2")}, {edge(L("b"), L("2")), edge(L("2"), L("b"))});
  ASSERT_EQ(t.locations.size(), 3u);
  EXPECT_EQ(t.locations[0], L("2"));
  EXPECT_EQ(t.locations[1], L("10"));
  EXPECT_EQ(t.locations[2], L("b"));
  EXPECT_EQ(t.edges.size(), 1u);
  EXPECT_TRUE(t.adjacent(L("b"), L("2")));
  EXPECT_FALSE(t.adjacent(L("b"), L("10")));
}

TEST(Topology, ComposeAddsCrossEdges) {
  auto g = Topology::make({L("1"), L("2")}, {edge(L("1"), L("2"))});
  auto h = Topology::make({L("3")}, {});
  auto gh = topology_compose(g, h, {{L("2"), L("3")}});
  EXPECT_EQ(gh.locations.size(), 3u);
  EXPECT_TRUE(gh.adjacent(L("2"), L("3")));
  EXPECT_FALSE(gh.adjacent(L("1"), L("3")));
  EXPECT_THROW(topology_compose(g, g, {}), Error);
}

TEST(Validate, ReportsEachProblem) {
  EXPECT_TRUE(validate(one("net N { nodes { 1: c!(0).0; } }"), {}).empty());
  EXPECT_TRUE(has(validate(one("net N { nodes { 1: c!(x).0; } }"), {}), DiagnosticKind::OpenVariable));
  EXPECT_TRUE(has(validate(one("net N { nodes { 1: 0; } edges { 1 -- 1; } }"), {}),
                  DiagnosticKind::SelfLoop));
  EXPECT_TRUE(has(validate(one("net N { nodes { 1: 0; } edges { 1 -- 2; } }"), {}),
                  DiagnosticKind::EdgeOutOfRange));
  auto m = parse("A(x) := A(x);\nnet N { nodes { 1: A(0); 2: B(); } }");
  auto ds = validate(net(m, "N"), m.environment());
  EXPECT_TRUE(has(ds, DiagnosticKind::UnguardedRecursion));
  EXPECT_TRUE(has(ds, DiagnosticKind::UnknownConstant));
}

TEST(Network, ComposeRenamesClashingRestrictions) {
  auto m = parse("net A { nodes { 1: c!(0).0; } restrict { c } }\n"
                 "net B { nodes { 2: c(x).0; } }");
  auto both = network_compose(net(m, "A"), net(m, "B"), {{L("1"), L("2")}}, m.environment());
  ASSERT_EQ(both.restricted.size(), 1u);
  EXPECT_NE(both.restricted[0], C("c"));
  // The restricted output can no longer reach the free input.
  EXPECT_TRUE(barbs(both, m.environment()).empty());
}

TEST(Normal, SumLaws) {
  const std::string base = "net N { nodes { 1: a!(0).0 + b(x).0; } }";
  EXPECT_EQ(key(base), key("net N { nodes { 1: b(y).0 + a!(0).0; } }"));
  EXPECT_EQ(key(base), key("net N { nodes { 1: (b(y).0 + 0) + a!(0).0; } }"));
  EXPECT_EQ(key(base), key("net N { nodes { 1: if 1 < 2 then (a!(0).0 + b(x).0) else 0; } }"));
  // Sums keep duplicates.
  EXPECT_NE(key("net N { nodes { 1: a!(0).0; } }"), key("net N { nodes { 1: a!(0).0 + a!(0).0; } }"));
}

TEST(Normal, RestrictionIsUpToRenaming) {
  EXPECT_EQ(key("net N { nodes { 1: a!(0).0; 2: a(x).0; } restrict { a } }"),
            key("net N { nodes { 1: z!(0).0; 2: z(x).0; } restrict { z } }"));
  EXPECT_EQ(key("net N { nodes { 1: 0; } restrict { a } }"), key("net N { nodes { 1: 0; } }"));
  EXPECT_NE(key("net N { nodes { 1: a!(0).0; } restrict { a } }"), key("net N { nodes { 1: a!(0).0; } }"));
}

TEST(Normal, AliasesDoNotDependOnNamesWhenBranchesTie) {
  // Both sums print alike with the restricted names masked.
  EXPECT_EQ(key("net N { nodes { 1: b(x).0 + a(x).0; 2: b!(0).a!(1).0; } restrict { a, b } }"),
            key("net N { nodes { 1: b(x).0 + r(x).0; 2: b!(0).r!(1).0; } restrict { r, b } }"));
}

TEST(Normal, UnfoldsExactlyToAGuard) {
  auto m = parse("A() := c!(0).A();\nnet N { nodes { 1: A(); } }");
  auto nn = normalize_network(net(m, "N"), m.environment());
  EXPECT_EQ(nn.key, "1: c!(0).A()");
  auto again = normalize_network(nn.network, m.environment());
  EXPECT_EQ(again.key, nn.key);
}

TEST(Normal, Barbs) {
  auto m = case_study("ex1");
  EXPECT_EQ(barbs(net(m, "N"), m.environment()), (std::set<Channel>{C("c"), C("d")}));
  EXPECT_EQ(barbs(net(m, "NC"), m.environment()), (std::set<Channel>{C("d")}));
  EXPECT_TRUE(barbs(one("net N { nodes { 1: 0; 2: c(x).0; } }"), {}).empty());
}

TEST(Normal, CanonicalPrintNamesBinders) {
  auto p = proc::input(C("c"), "x", proc::output(C("d"), expr::var("x"), proc::nil()));
  EXPECT_EQ(canonical_print(p, {}), "c($0).d!($0).0");
}
