#include <gtest/gtest.h>

#include <memory>
#include <string>

#include <json.hpp>

#include "gcwn/gcwn.h"

namespace {

struct Model {
  gcwn_model* m = nullptr;
  ~Model() { gcwn_model_free(m); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  gcwn_free_string(s);
  return out;
}

std::string case_path(const char* name) {
  return std::string(GCWN_CASE_DIR) + "/" + name + ".gcwn";
}

}  // namespace

TEST(CApi, ParseErrorsAreReported) {
  Model m;
  EXPECT_EQ(gcwn_model_parse("net N {", &m.m), GCWN_ERR_SYNTAX);
  EXPECT_EQ(m.m, nullptr);
  EXPECT_NE(std::string(gcwn_last_error()).find("line 1, column 8"), std::string::npos) << gcwn_last_error();
  EXPECT_EQ(gcwn_model_load("/nonexistent/file.gcwn", &m.m), GCWN_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(gcwn_model_parse(nullptr, &m.m), GCWN_ERR_INVALID_ARGUMENT);
}

TEST(CApi, BarbsAndNetworks) {
  Model m;
  ASSERT_EQ(gcwn_model_load(case_path("ex1").c_str(), &m.m), GCWN_OK) << gcwn_last_error();
  char* out = nullptr;
  ASSERT_EQ(gcwn_model_networks(m.m, &out), GCWN_OK);
  EXPECT_EQ(take(out), "N\nNC\n");
  ASSERT_EQ(gcwn_barbs(m.m, "N", GCWN_FORMAT_JSON, &out), GCWN_OK);
  auto j = nlohmann::json::parse(take(out));
  EXPECT_EQ(j["barbs"], nlohmann::json::array({"c", "d"}));
  ASSERT_EQ(gcwn_barbs(m.m, "NC", GCWN_FORMAT_TEXT, &out), GCWN_OK);
  EXPECT_EQ(take(out), "{d}\n");
  EXPECT_EQ(gcwn_barbs(m.m, "Missing", GCWN_FORMAT_TEXT, &out), GCWN_ERR_UNKNOWN_NETWORK);
}

TEST(CApi, BisimStatuses) {
  Model m;
  ASSERT_EQ(gcwn_model_load(case_path("ex4").c_str(), &m.m), GCWN_OK);
  gcwn_bisim_options o;
  gcwn_bisim_options_init(&o);
  o.relation = "(1,3),(2,3)";
  char* out = nullptr;
  EXPECT_EQ(gcwn_bisim(m.m, "Sys", "Spec", &o, &out), GCWN_OK);
  EXPECT_NE(take(out).find("verdict: Related"), std::string::npos);
  o.relation = "(1,3)";
  EXPECT_EQ(gcwn_bisim(m.m, "Sys", "Spec", &o, &out), GCWN_NEGATIVE);
  gcwn_free_string(out);
  o.relation = "(1,";
  EXPECT_EQ(gcwn_bisim(m.m, "Sys", "Spec", &o, &out), GCWN_ERR_INVALID_ARGUMENT);
  o.relation = nullptr;
  o.search = 1;
  o.format = GCWN_FORMAT_JSON;
  ASSERT_EQ(gcwn_bisim(m.m, "Sys", "Spec", &o, &out), GCWN_OK);
  auto j = nlohmann::json::parse(take(out));
  EXPECT_EQ(j["verdict"], "Related");
  o.search_cap = 1;
  EXPECT_EQ(gcwn_bisim(m.m, "Sys", "Spec", &o, &out), GCWN_ERR_BUDGET);
}

TEST(CApi, BudgetAndReduce) {
  Model m;
  ASSERT_EQ(gcwn_model_load(case_path("aran").c_str(), &m.m), GCWN_OK);
  gcwn_reduce_options r;
  gcwn_reduce_options_init(&r);
  r.find_barb = "s";
  char* out = nullptr;
  ASSERT_EQ(gcwn_reduce(m.m, "M", &r, &out), GCWN_OK) << gcwn_last_error();
  EXPECT_NE(take(out).find("s!"), std::string::npos);
  EXPECT_EQ(gcwn_reduce(m.m, "N", &r, &out), GCWN_NEGATIVE);
  gcwn_free_string(out);
  gcwn_lts_options l;
  gcwn_lts_options_init(&l);
  l.bounds.max_states = 2;
  l.bounds.strict = 1;
  EXPECT_EQ(gcwn_lts(m.m, "M", &l, &out), GCWN_ERR_BUDGET);
}

TEST(CApi, HarmonyAndProbe) {
  Model m;
  ASSERT_EQ(gcwn_model_load(case_path("ex3").c_str(), &m.m), GCWN_OK);
  gcwn_harmony_options h;
  gcwn_harmony_options_init(&h);
  char* out = nullptr;
  EXPECT_EQ(gcwn_harmony(m.m, "N", &h, &out), GCWN_OK);
  gcwn_free_string(out);
  h.inject_bug = 1;
  EXPECT_EQ(gcwn_harmony(m.m, "N", &h, &out), GCWN_NEGATIVE);
  gcwn_free_string(out);
  EXPECT_STRNE(gcwn_version(), "");
}
