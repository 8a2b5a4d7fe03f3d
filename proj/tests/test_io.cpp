#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace opinion;

namespace {

std::string error_of(const Json& j) {
  try {
    game_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(GameJson, ParsesTriangle) {
  auto j = Json::parse(R"({"n": 3, "edges": [[0,1,"1"],[1,2,"0.5"],[0,2,"1"]], "beliefs": ["0","0.25","1/3"]})");
  auto g = game_from_json(j);
  EXPECT_EQ(g.players(), 3u);
  EXPECT_EQ(g.graph().edges().size(), 3u);
  EXPECT_EQ(g.graph().scaled_weight(1, 2), 5);
  EXPECT_EQ(g.belief(2), Rational(1, 3));
}

TEST(GameJson, ErrorsNameTheField) {
  auto bad_belief = Json::parse(R"({"n": 2, "edges": [[0,1,"1"]], "beliefs": ["0","1.5"]})");
  EXPECT_NE(error_of(bad_belief).find("$.beliefs[1]"), std::string::npos);

  auto disconnected = Json::parse(R"({"n": 3, "edges": [[0,1,"1"]], "beliefs": ["0","0","0"]})");
  EXPECT_NE(error_of(disconnected).find("not connected"), std::string::npos);

  auto negative = Json::parse(R"({"n": 2, "edges": [[0,1,"-1"]], "beliefs": ["0","0"]})");
  EXPECT_NE(error_of(negative).find("edges[0]"), std::string::npos);

  auto malformed = Json::parse(R"({"n": 2, "edges": [[0,1,"x"]], "beliefs": ["0","0"]})");
  EXPECT_NE(error_of(malformed).find("$.edges[0][2]"), std::string::npos);

  auto float_weight = Json::parse(R"({"n": 2, "edges": [[0,1,0.5]], "beliefs": ["0","0"]})");
  EXPECT_NE(error_of(float_weight).find("$.edges[0][2]"), std::string::npos);

  auto short_beliefs = Json::parse(R"({"n": 2, "edges": [[0,1,"1"]], "beliefs": ["0"]})");
  EXPECT_NE(error_of(short_beliefs).find("$.beliefs"), std::string::npos);

  EXPECT_NE(error_of(Json::parse(R"({"edges": []})")).find("$.n"), std::string::npos);
}

TEST(GameJson, RoundTripIsExact) {
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 30; ++rep) {
    auto g = oracle::random_game(rng, 2 + rep % 9, rep % 4);
    auto c = rep % 3 == 0 ? integer_version(canonicalize_beliefs(g)) : g;
    auto back = game_from_json(Json::parse(game_to_json(c).dump()));
    EXPECT_EQ(back, c);
  }
}

TEST(GameJson, ExactStrings) {
  EXPECT_EQ(exact_string(Rational(7, 20)), "0.35");
  EXPECT_EQ(exact_string(Rational(1, 3)), "1/3");
  EXPECT_EQ(exact_string(Rational(4)), "4");
}
