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

#include "oar/trainer/step_log.hpp"

#include <istream>
#include <ostream>

#include "oar/common/error.hpp"

namespace oar::trainer {

const std::vector<std::string>& step_log_fields() {
  static const std::vector<std::string> fields = {
      "step",          "reward_overall", "reward_accuracy", "reward_format", "entropy",
      "ess_ratio",     "top10_mass",     "degenerate",      "excess_mass",   "time_per_token",
      "clip_fraction", "grad_norm",      "loss",            "action_tokens", "degenerate_groups",
      "mean_response_length"};
  return fields;
}

nlohmann::ordered_json to_json(const StepLog& log) {
  nlohmann::ordered_json j;
  j["step"] = log.step;
  j["reward_overall"] = log.reward_overall;
  j["reward_accuracy"] = log.reward_accuracy;
  j["reward_format"] = log.reward_format;
  j["entropy"] = log.entropy;
  j["ess_ratio"] = log.ess_ratio;
  j["top10_mass"] = log.top10_mass;
  j["degenerate"] = log.degenerate;
  j["excess_mass"] = log.excess_mass;
  j["time_per_token"] = log.time_per_token;
  j["clip_fraction"] = log.clip_fraction;
  j["grad_norm"] = log.grad_norm;
  j["loss"] = log.loss;
  j["action_tokens"] = log.action_tokens;
  j["degenerate_groups"] = log.degenerate_groups;
  j["mean_response_length"] = log.mean_response_length;
  return j;
}

StepLog step_log_from_json(const nlohmann::json& object) {
  std::vector<std::string> missing;
  for (const auto& field : step_log_fields()) {
    if (!object.contains(field)) {
      missing.push_back(field);
    }
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) {
      names += (names.empty() ? "" : ", ") + m;
    }
    throw FormatError("step log record is missing fields: " + names);
  }
  StepLog log;
  try {
    log.step = object.at("step").get<std::size_t>();
    log.reward_overall = object.at("reward_overall").get<double>();
    log.reward_accuracy = object.at("reward_accuracy").get<double>();
    log.reward_format = object.at("reward_format").get<double>();
    log.entropy = object.at("entropy").get<double>();
    log.ess_ratio = object.at("ess_ratio").get<double>();
    log.top10_mass = object.at("top10_mass").get<double>();
    log.degenerate = object.at("degenerate").get<bool>();
    log.excess_mass = object.at("excess_mass").get<double>();
    log.time_per_token = object.at("time_per_token").get<double>();
    log.clip_fraction = object.at("clip_fraction").get<double>();
    log.grad_norm = object.at("grad_norm").get<double>();
    log.loss = object.at("loss").get<double>();
    log.action_tokens = object.at("action_tokens").get<std::size_t>();
    log.degenerate_groups = object.at("degenerate_groups").get<std::size_t>();
    log.mean_response_length = object.at("mean_response_length").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("step log record has a mistyped field: ") + e.what());
  }
  return log;
}

void write_step_log(std::ostream& out, const StepLog& log) { out << to_json(log).dump() << '\n'; }

std::vector<StepLog> read_step_logs(std::istream& in) {
  std::vector<StepLog> logs;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) {
      continue;
    }
    try {
      logs.push_back(step_log_from_json(nlohmann::json::parse(line)));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_number) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return logs;
}

}  // namespace oar::trainer
