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

#ifndef OAR_TASKS_REWARD_HPP
#define OAR_TASKS_REWARD_HPP

#include <optional>
#include <span>
#include <string>

#include "oar/tasks/task.hpp"

namespace oar::tasks {

/// Location of the content of the first well-formed answer block.
///
/// Content occupies response positions [start, end); the opening tag sits at
/// start - 1 and the closing tag at end.
struct AnswerSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string content;

  [[nodiscard]] std::size_t open_tag() const { return start - 1; }
  [[nodiscard]] std::size_t length() const { return end - start; }
};

/// First "<answer> content </answer>" block whose content is non-empty and
/// contains no tag or special token; std::nullopt when there is none.
std::optional<AnswerSpan> extract_answer_span(std::span<const TokenId> response);

inline constexpr double kDefaultFormatWeight = 0.1;

struct RewardBreakdown {
  double accuracy = 0.0;
  double format = 0.0;
  double overall = 0.0;
};

RewardBreakdown compute_reward(std::span<const TokenId> response, const TaskInstance& task,
                               double format_weight = kDefaultFormatWeight);

/// Removes ASCII whitespace from both ends.
std::string strip(std::string_view text);

}  // namespace oar::tasks

#endif  // OAR_TASKS_REWARD_HPP
