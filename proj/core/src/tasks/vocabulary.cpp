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

#include "oar/tasks/vocabulary.hpp"

#include <array>

#include "oar/common/error.hpp"

namespace oar::tasks {

namespace {

constexpr std::array<std::string_view, 5> kTags = {"<pad>", "<bos>", "<eos>", "<answer>", "</answer>"};
constexpr std::array<TokenId, 5> kTagIds = {vocab::kPad, vocab::kBos, vocab::kEos, vocab::kAnswerOpen,
                                            vocab::kAnswerClose};
constexpr std::string_view kSymbols = "+-*()=;";

}  // namespace

policy::PolicyConfig task_policy_config() {
  policy::PolicyConfig cfg;
  cfg.vocab_size = vocab::kSize;
  cfg.pad_id = vocab::kPad;
  cfg.bos_id = vocab::kBos;
  cfg.eos_id = vocab::kEos;
  return cfg;
}

bool is_digit(TokenId id) { return id >= vocab::kDigit0 && id < vocab::kDigit0 + 10; }

bool is_filler(TokenId id) { return id >= vocab::kFillerFirst && id < vocab::kFillerFirst + vocab::kFillerCount; }

bool is_special(TokenId id) { return id == vocab::kPad || id == vocab::kBos || id == vocab::kEos; }

TokenId digit_token(int value) {
  require(value >= 0 && value <= 9, "digit out of range: " + std::to_string(value));
  return vocab::kDigit0 + static_cast<TokenId>(value);
}

TokenId filler_token(std::size_t index) {
  require(index < vocab::kFillerCount, "filler index out of range");
  return vocab::kFillerFirst + static_cast<TokenId>(index);
}

std::string token_string(TokenId id) {
  for (std::size_t i = 0; i < kTagIds.size(); ++i) {
    if (kTagIds[i] == id) {
      return std::string(kTags[i]);
    }
  }
  if (is_digit(id)) {
    return std::string(1, static_cast<char>('0' + (id - vocab::kDigit0)));
  }
  if (id >= vocab::kPlus && id < vocab::kPlus + kSymbols.size()) {
    return std::string(1, kSymbols[id - vocab::kPlus]);
  }
  if (is_filler(id)) {
    return std::string(1, static_cast<char>('a' + (id - vocab::kFillerFirst)));
  }
  throw ContractViolation("unknown token id " + std::to_string(id));
}

std::string decode(std::span<const TokenId> ids) {
  std::string out;
  for (const auto id : ids) {
    out += token_string(id);
  }
  return out;
}

std::vector<TokenId> encode(std::string_view text) {
  std::vector<TokenId> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '<') {
      bool matched = false;
      for (std::size_t k = 0; k < kTags.size(); ++k) {
        if (text.substr(i, kTags[k].size()) == kTags[k]) {
          out.push_back(kTagIds[k]);
          i += kTags[k].size();
          matched = true;
          break;
        }
      }
      if (!matched) {
        throw FormatError("unknown tag at offset " + std::to_string(i) + " in \"" + std::string(text) + "\"");
      }
      continue;
    }
    if (c >= '0' && c <= '9') {
      out.push_back(digit_token(c - '0'));
    } else if (const auto pos = kSymbols.find(c); pos != std::string_view::npos) {
      out.push_back(vocab::kPlus + static_cast<TokenId>(pos));
    } else if (c >= 'a' && c < static_cast<char>('a' + vocab::kFillerCount)) {
      out.push_back(filler_token(static_cast<std::size_t>(c - 'a')));
    } else {
      throw FormatError("unknown symbol '" + std::string(1, c) + "' at offset " + std::to_string(i));
    }
    ++i;
  }
  return out;
}

std::vector<TokenId> encode_number(long value) {
  require(value >= 0, "encode_number expects a non-negative value");
  std::vector<TokenId> out;
  for (const char c : std::to_string(value)) {
    out.push_back(digit_token(c - '0'));
  }
  return out;
}

}  // namespace oar::tasks
