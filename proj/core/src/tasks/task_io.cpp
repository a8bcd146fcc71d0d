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

#include "oar/tasks/task_io.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "oar/common/error.hpp"

namespace oar::tasks {

nlohmann::json to_json(const TaskInstance& task) {
  return {{"seed", task.seed},
          {"difficulty", task.difficulty},
          {"prompt", decode(task.prompt)},
          {"gold_answer", task.gold_answer},
          {"gold_trace", decode(task.gold_trace)}};
}

TaskInstance task_from_json(const nlohmann::json& object) {
  TaskInstance task;
  try {
    task.seed = object.at("seed").get<std::uint64_t>();
    task.difficulty = object.at("difficulty").get<int>();
    task.prompt = encode(object.at("prompt").get<std::string>());
    task.gold_answer = object.at("gold_answer").get<std::string>();
    task.gold_trace = encode(object.at("gold_trace").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed task record: ") + e.what());
  }
  return task;
}

void write_tasks_jsonl(std::ostream& out, const std::vector<TaskInstance>& tasks) {
  for (const auto& task : tasks) {
    out << to_json(task).dump() << '\n';
  }
}

std::vector<TaskInstance> read_tasks_jsonl(std::istream& in) {
  std::vector<TaskInstance> tasks;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) {
      continue;
    }
    try {
      tasks.push_back(task_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw FormatError("line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return tasks;
}

}  // namespace oar::tasks
