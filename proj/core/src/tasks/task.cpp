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

#include "oar/tasks/task.hpp"

#include <algorithm>
#include <random>

#include "oar/common/error.hpp"
#include "oar/common/rng.hpp"

namespace oar::tasks {

namespace {

struct Step {
  long lhs;
  char op;
  long rhs;
  long result;
};

long uniform_int(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

void append(std::vector<TokenId>& out, const std::vector<TokenId>& more) { out.insert(out.end(), more.begin(), more.end()); }

TokenId op_token(char op) {
  switch (op) {
    case '+':
      return vocab::kPlus;
    case '-':
      return vocab::kMinus;
    default:
      return vocab::kTimes;
  }
}

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  long parse() {
    const long value = expression();
    if (pos_ != text_.size()) {
      fail("unexpected trailing input");
    }
    return value;
  }

 private:
  long expression() {
    long value = operand();
    while (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-' || text_[pos_] == '*')) {
      const char op = text_[pos_++];
      const long rhs = operand();
      value = op == '+' ? value + rhs : op == '-' ? value - rhs : value * rhs;
    }
    return value;
  }

  long operand() {
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      const long value = expression();
      if (pos_ >= text_.size() || text_[pos_] != ')') {
        fail("missing ')'");
      }
      ++pos_;
      return value;
    }
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
      value = value * 10 + (text_[pos_] - '0');
      ++pos_;
    }
    if (pos_ == start) {
      fail("expected a number");
    }
    return value;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(what + " at offset " + std::to_string(pos_) + " in \"" + std::string(text_) + "\"");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

void TaskConfig::validate() const {
  require(max_value >= 9, "task max_value must be at least 9");
  require(operand_max >= 1 && operand_max <= max_value, "task operand_max must lie in [1, max_value]");
  require(filler_min <= filler_max, "task filler_min must not exceed filler_max");
}

TaskInstance generate_task(std::uint64_t seed, int difficulty, const TaskConfig& config) {
  require(difficulty >= kMinDifficulty && difficulty <= kMaxDifficulty,
          "difficulty must lie in [1, 6], got " + std::to_string(difficulty));
  config.validate();
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(difficulty)}));

  std::vector<Step> steps;
  long value = uniform_int(rng, 1, config.operand_max);
  for (int s = 0; s < difficulty; ++s) {
    std::vector<char> ops = {'+', '*'};
    if (value > 0) {
      ops.push_back('-');
    }
    const char op = ops[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(ops.size()) - 1))];
    long hi = config.operand_max;
    if (op == '+') {
      hi = std::min(hi, config.max_value - value);
    } else if (op == '-') {
      hi = std::min(hi, value);
    } else if (value > 0) {
      hi = std::min(hi, config.max_value / value);
    }
    const long rhs = uniform_int(rng, std::min(1L, hi), hi);
    const long result = op == '+' ? value + rhs : op == '-' ? value - rhs : value * rhs;
    steps.push_back({value, op, rhs, result});
    value = result;
  }

  TaskInstance task;
  task.seed = seed;
  task.difficulty = difficulty;
  task.gold_answer = std::to_string(value);

  task.prompt.push_back(vocab::kBos);
  for (int s = 1; s < difficulty; ++s) {
    task.prompt.push_back(vocab::kOpenParen);
  }
  append(task.prompt, encode_number(steps.front().lhs));
  for (std::size_t s = 0; s < steps.size(); ++s) {
    task.prompt.push_back(op_token(steps[s].op));
    append(task.prompt, encode_number(steps[s].rhs));
    if (s + 1 < steps.size()) {
      task.prompt.push_back(vocab::kCloseParen);
    }
  }
  task.prompt.push_back(vocab::kEquals);

  for (const auto& step : steps) {
    const auto fillers = static_cast<std::size_t>(
        uniform_int(rng, static_cast<long>(config.filler_min), static_cast<long>(config.filler_max)));
    for (std::size_t f = 0; f < fillers; ++f) {
      task.gold_trace.push_back(
          filler_token(static_cast<std::size_t>(uniform_int(rng, 0, vocab::kFillerCount - 1))));
    }
    append(task.gold_trace, encode_number(step.lhs));
    task.gold_trace.push_back(op_token(step.op));
    append(task.gold_trace, encode_number(step.rhs));
    task.gold_trace.push_back(vocab::kEquals);
    append(task.gold_trace, encode_number(step.result));
    task.gold_trace.push_back(vocab::kSemicolon);
  }
  task.gold_trace.push_back(vocab::kAnswerOpen);
  append(task.gold_trace, encode_number(value));
  task.gold_trace.push_back(vocab::kAnswerClose);
  task.gold_trace.push_back(vocab::kEos);
  return task;
}

TaskInstance stream_task(std::uint64_t stream_seed, std::uint64_t index, int min_difficulty, int max_difficulty,
                         const TaskConfig& config) {
  require(min_difficulty >= kMinDifficulty && max_difficulty <= kMaxDifficulty && min_difficulty <= max_difficulty,
          "invalid difficulty range");
  Rng rng = make_rng(stream_seed, {index, 0x7461736bULL});
  const int difficulty = static_cast<int>(uniform_int(rng, min_difficulty, max_difficulty));
  return generate_task(derive_seed(stream_seed, {index}), difficulty, config);
}

long evaluate_expression(std::string_view expression) { return ExpressionParser(expression).parse(); }

}  // namespace oar::tasks
