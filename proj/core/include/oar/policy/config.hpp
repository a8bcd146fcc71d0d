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

#ifndef OAR_POLICY_CONFIG_HPP
#define OAR_POLICY_CONFIG_HPP

#include <cstddef>
#include <cstdint>

namespace oar::policy {

using TokenId = std::uint32_t;

/// Shape of the decoder-only transformer and its reserved token ids.
struct PolicyConfig {
  std::size_t vocab_size = 30;
  std::size_t d_model = 128;
  std::size_t n_layers = 4;
  std::size_t n_heads = 4;
  std::size_t max_seq_len = 256;
  /// Doubles as the mask token for counterfactual perturbation.
  TokenId pad_id = 0;
  TokenId bos_id = 1;
  TokenId eos_id = 2;

  /// Throws ContractViolation when the invariants do not hold.
  void validate() const;
  [[nodiscard]] std::size_t head_dim() const { return d_model / n_heads; }

  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

}  // namespace oar::policy

#endif  // OAR_POLICY_CONFIG_HPP
