#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "gcwn/normal.hpp"
#include "helpers.hpp"

using namespace gcwn;
using namespace gcwn::unit;

namespace {

ParseError parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "parsed: " << text;
  return ParseError({}, "", {});
}

}  // namespace

TEST(Parser, ThreeNodeNetwork) {
  auto m = parse(
      "net N {\n"
      "  nodes { 1: c!(0).0; 2: c(x).0 + d!(1).0; 3: c(y).0 + d(x).0; }\n"
      "  edges { 1 -- 2; 1 -- 3; }\n"
      "}\n");
  const Network& n = net(m, "N");
  EXPECT_EQ(n.topology.locations.size(), 3u);
  EXPECT_EQ(n.topology.edges, (std::vector<LocPair>{{L("1"), L("2")}, {L("1"), L("3")}}));
  EXPECT_EQ(to_string(n.at(L("2"))), "c(x).0 + d!(1).0");
  EXPECT_TRUE(n.restricted.empty());
}

TEST(Parser, NilPrintsAsZero) {
  EXPECT_EQ(to_string(proc::nil()), "0");
  auto m = parse("net N { nodes { 1: 0; } }");
  EXPECT_EQ(to_string(net(m, "N").at(L("1"))), "0");
}

TEST(Parser, UnclosedBraceIsPositioned) {
  auto e = parse_error("net N {\n  nodes { 1: 0; }\n");
  EXPECT_EQ(e.position().line, 3u);
  EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
  EXPECT_FALSE(e.expected().empty());
}

TEST(Parser, ErrorsNameTheExpectedTokens) {
  auto e = parse_error("net N { nodes { 1: c!(0) } }");
  EXPECT_EQ(e.position().line, 1u);
  EXPECT_EQ(e.position().column, 26u);
  bool dot = false;
  for (const auto& t : e.expected()) dot = dot || t == "'.'";
  EXPECT_TRUE(dot) << e.what();
}

TEST(Parser, NetworkExpressions) {
  auto m = case_study("ex3");
  const Network& n = net(m, "N");
  EXPECT_EQ(n.topology.locations.size(),
            net(m, "N1").topology.locations.size() + net(m, "N2").topology.locations.size() +
                net(m, "N3").topology.locations.size());
  auto r = parse("net A { nodes { 1: c!(0).0; } }\nnet B = A \\ {c};");
  EXPECT_EQ(net(r, "B").restricted, std::vector<Channel>{C("c")});
  auto clash = parse_error("net A { nodes { 1: 0; } }\nnet B = A | A;");
  EXPECT_EQ(clash.code(), ErrorCode::OverlappingLocations);
  EXPECT_EQ(clash.position().line, 2u);
}

TEST(Parser, DefinitionsUniverseAndImports) {
  auto m = parse(
      "import fst;\n"
      "universe { 0, 'a, (1, 2) }\n"
      "P(x) := c!(fst((x, 1))).P(x)[c/d];\n"
      "net N { nodes { 1: P(0); } }\n");
  ASSERT_EQ(m.definitions.size(), 1u);
  EXPECT_EQ(m.definitions[0].params, std::vector<Variable>{"x"});
  ASSERT_TRUE(m.universe.has_value());
  EXPECT_EQ(m.universe->size(), 3u);
  EXPECT_EQ(m.imports, std::vector<std::string>{"fst"});
  EXPECT_TRUE(validate(m).empty());
  EXPECT_FALSE(validate(parse("import nosuch;\nnet N { nodes { 1: 0; } }")).empty());
}

TEST(Parser, ExpressionPrecedence) {
  auto m = parse("net N { nodes { 1: if 1 + 2 * 3 = 7 && !(1 = 2) || false then c!(0).0 else 0; } }");
  EXPECT_EQ(canonical_print(net(m, "N").at(L("1")), m.environment()), "c!(0).0");
  EXPECT_THROW(parse("net N { nodes { 1: if 1 < 2 < 3 then 0 else 0; } }"), ParseError);
}

TEST(Printer, RoundTripsCaseStudies) {
  for (const char* file : {"ex1", "ex3", "ex4", "aran", "abp"}) {
    auto m = case_study(file);
    const std::string text = print(m);
    auto again = parse(text);
    EXPECT_TRUE(same(m, again)) << file;
    EXPECT_EQ(print(again), text) << file;
  }
}

TEST(Printer, KeepsSumAndCallStructure) {
  auto m = parse("A() := c!(0).0;\nnet N { nodes { 1: a!(0).0 + (b!(0).0 + A()[d/c]); } }");
  const std::string text = print(m);
  EXPECT_NE(text.find("a!(0).0 + (b!(0).0 + A[d/c])"), std::string::npos) << text;
  EXPECT_TRUE(same(m, parse(text)));
}
