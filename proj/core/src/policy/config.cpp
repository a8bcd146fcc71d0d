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

#include "oar/policy/config.hpp"

#include <string>

#include "oar/common/error.hpp"

namespace oar::policy {

void PolicyConfig::validate() const {
  require(vocab_size >= 4, "vocab_size must be at least 4");
  require(d_model > 0 && n_layers > 0 && n_heads > 0 && max_seq_len > 0, "model dimensions must be positive");
  require(d_model % n_heads == 0,
          "d_model " + std::to_string(d_model) + " is not divisible by n_heads " + std::to_string(n_heads));
  require(pad_id < vocab_size && bos_id < vocab_size && eos_id < vocab_size, "special token id out of range");
  require(pad_id != bos_id && pad_id != eos_id && bos_id != eos_id, "special token ids must be distinct");
}

}  // namespace oar::policy
