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

#ifndef OAR_TASKS_VOCABULARY_HPP
#define OAR_TASKS_VOCABULARY_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oar/policy/config.hpp"

namespace oar::tasks {

using policy::TokenId;

/// Fixed symbol-level vocabulary shared by the task generator and the policy.
namespace vocab {
inline constexpr TokenId kPad = 0;
inline constexpr TokenId kBos = 1;
inline constexpr TokenId kEos = 2;
inline constexpr TokenId kDigit0 = 3;
inline constexpr TokenId kPlus = 13;
inline constexpr TokenId kMinus = 14;
inline constexpr TokenId kTimes = 15;
inline constexpr TokenId kOpenParen = 16;
inline constexpr TokenId kCloseParen = 17;
inline constexpr TokenId kEquals = 18;
inline constexpr TokenId kSemicolon = 19;
inline constexpr TokenId kAnswerOpen = 20;
inline constexpr TokenId kAnswerClose = 21;
inline constexpr TokenId kFillerFirst = 22;
inline constexpr std::size_t kFillerCount = 8;
inline constexpr std::size_t kSize = 30;
}  // namespace vocab

/// Policy configuration whose vocabulary and special ids match this task family.
policy::PolicyConfig task_policy_config();

[[nodiscard]] bool is_digit(TokenId id);
[[nodiscard]] bool is_filler(TokenId id);
[[nodiscard]] bool is_special(TokenId id);
[[nodiscard]] TokenId digit_token(int value);
[[nodiscard]] TokenId filler_token(std::size_t index);

/// Printable form of one token: "<pad>", "<bos>", "<eos>", "<answer>", "</answer>" or a single character.
[[nodiscard]] std::string token_string(TokenId id);

/// Concatenation of token_string() over `ids`.
[[nodiscard]] std::string decode(std::span<const TokenId> ids);

/// Inverse of decode(). Throws FormatError naming the offset of any unknown symbol.
[[nodiscard]] std::vector<TokenId> encode(std::string_view text);

/// Decimal token ids of a non-negative integer.
[[nodiscard]] std::vector<TokenId> encode_number(long value);

}  // namespace oar::tasks

#endif  // OAR_TASKS_VOCABULARY_HPP
