#include "temp_dir.hpp"

#include "levelk/app/run_config.hpp"
#include "levelk/core/errors.hpp"

#include <gtest/gtest.h>

#include <map>
#include <sstream>

using namespace levelk;
using namespace levelk::app;

namespace {

RunConfig parse_text(const std::string& text, RunConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

}  // namespace

TEST(Config, DefaultsMatchTrainerSettings) {
  const RunConfig c;
  EXPECT_EQ(get_value(c, "trainer.memory_capacity"), "50000");
  EXPECT_EQ(get_value(c, "trainer.learning_rate"), "0.0013");
  EXPECT_EQ(get_value(c, "trainer.gamma"), "0.95");
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParsesKeysCommentsAndLists) {
  const auto c = parse_text(
      "# desk run\n"
      "seed = 9\n"
      "\n"
      "env.v_nom=11.5   # m/s\n"
      "curriculum.populations = 4, 8,12\n"
      "eval.traffic = level2\n");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.env.v_nom, 11.5);
  EXPECT_EQ(c.curriculum.populations, (std::vector<int>{4, 8, 12}));
  EXPECT_EQ(c.traffic.composition, hierarchy::TrafficComposition::all_level(2));
}

TEST(Config, RejectsBadInputWithLineNumbers) {
  try {
    parse_text("seed = 1\nno equals sign\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  try {
    parse_text("seed = 1\n\nbogus.key = 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
  EXPECT_THROW(parse_text("env.dt = fast\n"), ConfigError);
  EXPECT_THROW(parse_text("trainer.batch_size = -4\n"), ConfigError);
}

TEST(Config, SerializeRoundTripsEveryKey) {
  RunConfig c;
  c.seed = 123;
  c.env.v_nom = 0.1 + 0.2;
  c.trainer.gamma = 0.9;
  c.curriculum.populations = {5, 7};
  c.ramp_lanes = {6, 7};
  const auto text = serialize(c);
  const auto back = parse_text(text);
  EXPECT_EQ(serialize(back), text);
  EXPECT_EQ(back.env.v_nom, 0.1 + 0.2);
  EXPECT_EQ(digest(back), digest(c));
  for (const auto& key : config_keys()) {
    EXPECT_NE(text.find(key.name + " = "), std::string::npos) << key.name;
    EXPECT_FALSE(key.description.empty()) << key.name;
  }
}

TEST(Config, DigestTracksContent) {
  RunConfig a;
  RunConfig b;
  EXPECT_EQ(digest(a), digest(b));
  b.env.d_far += 1;
  EXPECT_NE(digest(a), digest(b));
  EXPECT_EQ(digest(a).size(), 16u);
  EXPECT_EQ(a.training_options().config_digest, digest(a));
}

TEST(Config, EnvironmentOverrides) {
  std::map<std::string, std::string> env = {{"LEVELK_SEED", "77"},
                                            {"LEVELK_TRAINER_GAMMA", "0.5"},
                                            {"LEVELK_PATHS_STORE", "/tmp/s"},
                                            {"UNRELATED", "x"}};
  RunConfig c;
  apply_environment(c, [&](const char* name) -> const char* {
    const auto it = env.find(name);
    return it == env.end() ? nullptr : it->second.c_str();
  });
  EXPECT_EQ(c.seed, 77u);
  EXPECT_EQ(c.trainer.gamma, 0.5);
  EXPECT_EQ(get_value(c, "paths.store"), "/tmp/s");
}

TEST(Config, VersionedDirectories) {
  oracle::TempDir dir;
  EXPECT_EQ(versioned_directory(dir / "run"), dir / "run");
  EXPECT_EQ(versioned_directory(dir / "run"), dir / "run.1");
  EXPECT_EQ(versioned_directory(dir / "run"), dir / "run.2");
  EXPECT_TRUE(std::filesystem::is_directory(dir / "run.2"));
}
