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


#ifndef OARLAB_COMMANDS_HPP
#define OARLAB_COMMANDS_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oar/trainer/step_log.hpp"
#include "oarlab/config.hpp"

namespace oarlab {

/// Trains the warm-start policy. Produces checkpoints/warmstart.ckpt,
/// logs/sft_loss.csv and reports/warmstart_eval.csv.
std::filesystem::path cmd_pretrain(const RunConfig& config, const std::optional<std::filesystem::path>& out,
                                   std::ostream& progress);

/// Runs RL from the configured warm start. Produces logs/steps.jsonl,
/// reports/metrics.csv, reports/eval.csv and checkpoints.
std::filesystem::path cmd_train(const RunConfig& config, const std::optional<std::filesystem::path>& out,
                                std::ostream& progress);

enum class Study { kOracle, kRecall, kVariance, kTiming };

std::string_view to_string(Study study);
Study parse_study(std::string_view text);

/// Runs one evaluation study. The checkpoint may be omitted for the variance study only.
std::filesystem::path cmd_eval(const RunConfig& config, const std::optional<std::filesystem::path>& checkpoint,
                               Study study, const std::optional<std::filesystem::path>& out, std::ostream& progress);

/// Step logs of a run directory, with schema checks naming offending fields.
std::vector<oar::trainer::StepLog> read_run_logs(const std::filesystem::path& run_directory);

/// Metrics plotted by the report command.
const std::vector<std::string>& report_metrics();

/// Aggregates runs into summary.csv, curves.csv and one SVG per plotted metric.
std::filesystem::path cmd_report(const std::vector<std::filesystem::path>& runs, const std::filesystem::path& out,
                                 std::ostream& progress);

}  // namespace oarlab

#endif  // OARLAB_COMMANDS_HPP
