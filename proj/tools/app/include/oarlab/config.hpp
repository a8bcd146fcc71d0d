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


#ifndef OARLAB_CONFIG_HPP
#define OARLAB_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "oar/common/error.hpp"
#include "oar/evaluation/variance.hpp"
#include "oar/policy/config.hpp"
#include "oar/tasks/vocabulary.hpp"
#include "oar/trainer/rollout.hpp"
#include "oar/trainer/sft.hpp"
#include "oar/trainer/trainer.hpp"

namespace oarlab {

/// Settings of the evaluation studies run by `oarlab eval`.
struct StudyConfig {
  /// Correct trajectories collected for the oracle and recall studies.
  std::size_t trajectories = 500;
  /// Upper bound on sampled responses while filling the corpus.
  std::size_t max_attempts = 20000;
  std::uint64_t seed = 7;
  std::uint64_t task_seed = 5001;
  std::size_t band_repeats = 1000;
  std::size_t variance_length = 50;
  std::size_t variance_trials = 10000;
  oar::evaluation::LatentDistribution variance_distribution = oar::evaluation::LatentDistribution::kGaussian;
  double variance_mean = 0.0;
  double variance_stddev = 1.0;
  std::size_t timing_prompts = 4;
  std::size_t timing_repeats = 3;
};

/// Complete, typed configuration of one oarlab run.
struct RunConfig {
  std::string name = "run";
  oar::policy::PolicyConfig model = oar::tasks::task_policy_config();
  std::uint64_t init_seed = 3;
  oar::tasks::TaskConfig task;
  int min_difficulty = 1;
  int max_difficulty = 3;
  oar::trainer::SftConfig sft;
  oar::trainer::TrainConfig train;
  std::size_t checkpoint_every = 0;
  std::string warmstart;
  oar::trainer::EvalConfig eval;
  StudyConfig study;
  std::size_t workers = 1;

  /// Core-module configs with the shared task, difficulty and worker settings applied.
  [[nodiscard]] oar::trainer::SftConfig sft_config() const;
  [[nodiscard]] oar::trainer::TrainConfig train_config() const;
  [[nodiscard]] oar::trainer::EvalConfig eval_config() const;

  void validate() const;
};

enum class ValueType { kInteger, kUnsigned, kReal, kBoolean, kString };

struct KeySpec {
  std::string key;
  ValueType type;
  std::function<std::string(const RunConfig&)> get;
  /// Receives text already checked against `type`.
  std::function<void(RunConfig&, const std::string&)> set;
};

/// Every accepted key, as "section.name", in snapshot order.
const std::vector<KeySpec>& config_schema();

/// Thrown with every offending key listed when a file or override is rejected.
class ConfigError : public oar::Error {
 public:
  using oar::Error::Error;
};

/// Parses INI text. Unknown keys and ill-typed values are reported together.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Applies one "section.name=value" override through the typed schema.
void apply_override(RunConfig& config, const std::string& assignment);
void set_value(RunConfig& config, const std::string& key, const std::string& value);

/// INI text that round-trips through parse_config to an identical config.
std::string snapshot(const RunConfig& config);

}  // namespace oarlab

#endif  // OARLAB_CONFIG_HPP
