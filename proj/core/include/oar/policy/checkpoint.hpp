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

#ifndef OAR_POLICY_CHECKPOINT_HPP
#define OAR_POLICY_CHECKPOINT_HPP

#include <filesystem>

#include "oar/policy/policy.hpp"

namespace oar::policy {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Writes a versioned binary container: magic, version, config header, then
/// every named parameter tensor with its shape, float64 payload and CRC-32.
/// All integers and floats are little-endian.
void save_checkpoint(const Policy& policy, const std::filesystem::path& path);

/// Reads a checkpoint written by save_checkpoint(). Throws FormatError on a bad
/// magic, unsupported version, truncated file or checksum mismatch, and Error
/// when the file cannot be opened.
Policy load_checkpoint(const std::filesystem::path& path);

}  // namespace oar::policy

#endif  // OAR_POLICY_CHECKPOINT_HPP
