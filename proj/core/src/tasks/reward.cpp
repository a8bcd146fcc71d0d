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

#include "oar/tasks/reward.hpp"

namespace oar::tasks {

std::optional<AnswerSpan> extract_answer_span(std::span<const TokenId> response) {
  std::size_t i = 0;
  while (i < response.size()) {
    if (response[i] != vocab::kAnswerOpen) {
      ++i;
      continue;
    }
    const std::size_t start = i + 1;
    std::size_t j = start;
    while (j < response.size() && response[j] != vocab::kAnswerOpen && response[j] != vocab::kAnswerClose &&
           !is_special(response[j])) {
      ++j;
    }
    if (j < response.size() && response[j] == vocab::kAnswerClose && j > start) {
      AnswerSpan span;
      span.start = start;
      span.end = j;
      span.content = strip(decode(response.subspan(start, j - start)));
      return span;
    }
    i = j > i + 1 ? j : i + 1;
  }
  return std::nullopt;
}

RewardBreakdown compute_reward(std::span<const TokenId> response, const TaskInstance& task, double format_weight) {
  RewardBreakdown reward;
  if (const auto span = extract_answer_span(response)) {
    reward.format = 1.0;
    reward.accuracy = span->content == strip(task.gold_answer) ? 1.0 : 0.0;
  }
  reward.overall = reward.accuracy + format_weight * reward.format;
  return reward;
}

std::string strip(std::string_view text) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto first = text.find_first_not_of(kSpace);
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = text.find_last_not_of(kSpace);
  return std::string(text.substr(first, last - first + 1));
}

}  // namespace oar::tasks
