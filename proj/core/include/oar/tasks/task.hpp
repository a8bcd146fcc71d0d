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

#ifndef OAR_TASKS_TASK_HPP
#define OAR_TASKS_TASK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "oar/tasks/vocabulary.hpp"

namespace oar::tasks {

struct TaskConfig {
  /// Largest value any operand, intermediate or final result may take.
  long max_value = 99;
  /// Largest fresh operand introduced at each step.
  long operand_max = 9;
  /// Number of filler letters written before each step line, drawn uniformly.
  std::size_t filler_min = 1;
  std::size_t filler_max = 3;

  void validate() const;
};

/// One nested arithmetic problem.
///
/// The prompt is BOS followed by the expression and "=", for example
/// "((7+5)*3)-4=". The gold trace expands it one operation per line, each line
/// preceded by filler letters, and ends with "<answer>r</answer>" and EOS:
/// "ca7+5=12;b12*3=36;hd36-4=32;<answer>32</answer><eos>".
struct TaskInstance {
  std::uint64_t seed = 0;
  int difficulty = 0;
  std::vector<TokenId> prompt;
  std::string gold_answer;
  std::vector<TokenId> gold_trace;
};

inline constexpr int kMinDifficulty = 1;
inline constexpr int kMaxDifficulty = 6;

/// Deterministic in (seed, difficulty, config). Difficulty is the number of operations.
TaskInstance generate_task(std::uint64_t seed, int difficulty, const TaskConfig& config = {});

/// Task `index` of the stream identified by `stream_seed`; the difficulty is
/// drawn uniformly from [min_difficulty, max_difficulty].
TaskInstance stream_task(std::uint64_t stream_seed, std::uint64_t index, int min_difficulty, int max_difficulty,
                         const TaskConfig& config = {});

/// Evaluates a fully parenthesised expression over non-negative integers with
/// + - * (left to right within one parenthesis level). Throws FormatError on
/// malformed input.
long evaluate_expression(std::string_view expression);

}  // namespace oar::tasks

#endif  // OAR_TASKS_TASK_HPP
