#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "gamemetrics/game_io.hpp"
#include "gamemetrics/random_games.hpp"

using namespace gamemetrics;

namespace {

std::string parse_error(const std::string& text) {
  try {
    parse_game(text);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

const char* kTiny = R"({
  "interval": [0, 1],
  "states": ["a", "b"],
  "variables": {"r": {"a": 0, "b": 1}},
  "moves1": {"a": ["go"], "b": ["go"]},
  "trans": [
    {"state": "a", "m1": "go", "dist": {"b": 1}},
    {"state": "b", "m1": "go", "dist": {"b": 1}}
  ]
})";

}  // namespace

TEST(GameIo, SampleFilesMatchFixtures) {
  EXPECT_EQ(load_game(fixtures::game_path("fig3.game")), fixtures::fig3(0.1));
  EXPECT_EQ(load_game(fixtures::game_path("fig3eps0.game")), fixtures::fig3(0.0));
  EXPECT_EQ(load_game(fixtures::game_path("fig2.game")), fixtures::fig2());
  EXPECT_EQ(load_game(fixtures::game_path("fig2_modified.game")), fixtures::fig2(2.0, 0.0));
  EXPECT_EQ(load_game(fixtures::game_path("mismatch.game")), fixtures::mismatch());
}

TEST(GameIo, MinimalGameWithDefaults) {
  const auto g = parse_game(std::string(kTiny));
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(g.moves2[0], std::vector<std::string>{kDefaultMove});
  EXPECT_TRUE(validate(g).empty());
}

TEST(GameIo, ErrorsCarryLocations) {
  EXPECT_NE(parse_error("{").find("syntax"), std::string::npos);
  EXPECT_NE(parse_error("[]").find("game"), std::string::npos);

  auto j = Json::parse(kTiny);
  j["extra"] = 1;
  EXPECT_NE(parse_error(j.dump()).find("extra"), std::string::npos);

  j = Json::parse(kTiny);
  j["trans"][1]["dist"]["b"] = "one";
  EXPECT_NE(parse_error(j.dump()).find("trans[1].dist.b"), std::string::npos) << parse_error(j.dump());

  j = Json::parse(kTiny);
  j["trans"][0]["dist"] = {{"nowhere", 1}};
  EXPECT_NE(parse_error(j.dump()).find("trans[0]"), std::string::npos);
  EXPECT_NE(parse_error(j.dump()).find("nowhere"), std::string::npos);

  j = Json::parse(kTiny);
  j.erase("states");
  EXPECT_NE(parse_error(j.dump()).find("states"), std::string::npos);

  j = Json::parse(kTiny);
  j["interval"] = {0};
  EXPECT_NE(parse_error(j.dump()).find("interval"), std::string::npos);

  try {
    load_game("/no/such/file.game");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("/no/such/file.game"), std::string::npos);
  }
}

TEST(GameIo, StructuralProblemsAreLeftToValidate) {
  auto j = Json::parse(kTiny);
  j["trans"][0]["dist"] = {{"b", 0.5}};
  const auto g = parse_game(j);
  EXPECT_FALSE(validate(g).empty());
}

TEST(GameIo, Round9) {
  EXPECT_EQ(round9(0.1 + 0.2), 0.3);
  EXPECT_EQ(round9(2.0 / 3.0), 0.666666667);
  EXPECT_EQ(round9(0.0), 0.0);
  EXPECT_TRUE(std::isinf(round9(std::numeric_limits<double>::infinity())));
}

TEST(GameIoProperty, RoundTrip) {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = trial % 3 == 2 ? random_reachability_game(rng)
                                  : random_game(rng, {6, 3, 2, trial % 3 == 1});
    const auto back = parse_game(dump_game(g));
    EXPECT_EQ(back, g) << dump_game(g);
    EXPECT_EQ(dump_game(back), dump_game(g));
  }
}
