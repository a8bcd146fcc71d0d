// Copyright 2026 The oarlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "oarlab/config.hpp"
#include "oarlab/run.hpp"

namespace oarlab {
namespace {

const std::filesystem::path kConfigDir = OARLAB_CONFIG_DIR;

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string config_error(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& error) {
    return error.what();
  }
  return {};
}

TEST(Config, ShippedProfilesLoadAndValidate) {
  for (const char* name : {"default.ini", "ci.ini"}) {
    const auto config = load_config(kConfigDir / name);
    EXPECT_NO_THROW(config.validate()) << name;
  }
  const auto ci = load_config(kConfigDir / "ci.ini");
  EXPECT_EQ(ci.name, "ci");
}

TEST(Config, ShippedProfilesListEveryKey) {
  const std::regex assignment(R"(^\s*([a-z0-9_]+)\s*=)");
  const std::regex section(R"(^\s*\[([a-z_]+)\]\s*$)");
  for (const char* name : {"default.ini", "ci.ini"}) {
    std::ifstream in(kConfigDir / name);
    std::set<std::string> keys;
    std::string current;
    std::string line;
    std::smatch match;
    while (std::getline(in, line)) {
      if (std::regex_match(line, match, section)) {
        current = match[1];
      } else if (std::regex_search(line, match, assignment)) {
        keys.insert(current + "." + match[1].str());
      }
    }
    for (const auto& spec : config_schema()) {
      EXPECT_EQ(keys.count(spec.key), 1u) << name << " lacks " << spec.key;
    }
    EXPECT_EQ(keys.size(), config_schema().size()) << name;
  }
}

TEST(Config, SnapshotRoundTrips) {
  auto config = load_config(kConfigDir / "default.ini");
  apply_override(config, "train.learning_rate=0.000123456789");
  apply_override(config, "credit.method=oar_p");
  apply_override(config, "credit.tau=0.35");
  apply_override(config, "eval.greedy=true");
  const std::string text = snapshot(config);
  const auto reparsed = parse_config(text, "snapshot");
  EXPECT_EQ(snapshot(reparsed), text);
  EXPECT_EQ(reparsed.train.adam.learning_rate, 0.000123456789);
  EXPECT_EQ(reparsed.train.credit.method, oar::trainer::CreditMethod::kOarP);
  EXPECT_TRUE(reparsed.eval.greedy);
}

TEST(Config, EveryProblemIsReportedAtOnce) {
  const std::string message = config_error("[model]\nd_model = wide\nbogus = 1\n[train]\nsteps = -3\n[nope]\nx = 1\n");
  ASSERT_FALSE(message.empty());
  for (const char* key : {"model.d_model", "model.bogus", "train.steps", "nope.x"}) {
    EXPECT_NE(message.find(key), std::string::npos) << key << " missing from: " << message;
  }
}

TEST(Config, EnumeratedValuesListOptions) {
  const std::string credit = config_error("[credit]\nmethod = magic\n");
  for (const char* option : {"vanilla", "random", "entropy", "oar_p", "oar_g"}) {
    EXPECT_NE(credit.find(option), std::string::npos) << credit;
  }
  EXPECT_FALSE(config_error("[credit]\nprobe = median\n").empty());
  EXPECT_FALSE(config_error("[credit]\ntau_mode = sometimes\n").empty());
  EXPECT_FALSE(config_error("[eval]\ngreedy = maybe\n").empty());
}

TEST(Config, OverridesGoThroughTheSchema) {
  RunConfig config;
  apply_override(config, "run.seed=42");
  EXPECT_EQ(config.train.seed, 42u);
  apply_override(config, "model.d_model=24");
  EXPECT_EQ(config.model.d_model, 24u);
  EXPECT_THROW(apply_override(config, "model.d_model"), ConfigError);
  EXPECT_THROW(apply_override(config, "model.depth=3"), ConfigError);
  EXPECT_THROW(apply_override(config, "train.clip_low=abc"), ConfigError);
}

TEST(Config, DerivedModuleConfigsShareSettings) {
  auto config = load_config(kConfigDir / "ci.ini");
  apply_override(config, "run.workers=3");
  apply_override(config, "task.max_difficulty=2");
  const auto train = config.train_config();
  EXPECT_EQ(train.workers, 3u);
  EXPECT_EQ(train.rollout.workers, 3u);
  EXPECT_EQ(train.max_difficulty, 2);
  EXPECT_EQ(train.credit.temperature, train.rollout.temperature);
  EXPECT_EQ(config.sft_config().max_difficulty, 2);
  EXPECT_EQ(config.eval_config().max_difficulty, 2);
  EXPECT_EQ(config.eval_config().task.max_value, config.task.max_value);
}

TEST(Config, MissingFileIsAConfigError) {
  try {
    (void)load_config("/nonexistent/oarlab.ini");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& error) {
    EXPECT_NE(std::string(error.what()).find("/nonexistent/oarlab.ini"), std::string::npos);
  }
}

TEST(RunNames, EncodeTheSettingsThatDistinguishRuns) {
  auto config = load_config(kConfigDir / "ci.ini");
  apply_override(config, "model.init_seed=4");
  EXPECT_EQ(run_name(config, "pretrain"), "ci-pretrain-s4");
  apply_override(config, "credit.method=vanilla");
  apply_override(config, "run.seed=2");
  EXPECT_EQ(run_name(config, "train"), "ci-train-vanilla-s2");
  apply_override(config, "credit.method=oar_p");
  apply_override(config, "credit.tau=0.3");
  apply_override(config, "credit.probe=lt_logits");
  EXPECT_EQ(run_name(config, "train"), "ci-train-oar_p-tau0.3-beta2-lt_logits-s2");
  apply_override(config, "credit.force_degenerate=true");
  EXPECT_EQ(run_name(config, "train"), "ci-train-oar_p-tau0.3-beta2-lt_logits-degenerate-s2");
}

}  // namespace
}  // namespace oarlab
