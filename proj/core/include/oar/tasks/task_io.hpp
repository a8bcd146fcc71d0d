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

#ifndef OAR_TASKS_TASK_IO_HPP
#define OAR_TASKS_TASK_IO_HPP

#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

#include "oar/tasks/task.hpp"

namespace oar::tasks {

/// {seed, difficulty, prompt, gold_answer, gold_trace}; token sequences are
/// stored in their decoded text form.
nlohmann::json to_json(const TaskInstance& task);
TaskInstance task_from_json(const nlohmann::json& object);

/// One JSON object per line.
void write_tasks_jsonl(std::ostream& out, const std::vector<TaskInstance>& tasks);
/// Throws FormatError naming the line number of any malformed record.
std::vector<TaskInstance> read_tasks_jsonl(std::istream& in);

}  // namespace oar::tasks

#endif  // OAR_TASKS_TASK_IO_HPP
