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

#ifndef OAR_COMMON_RNG_HPP
#define OAR_COMMON_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace oar {

using Rng = std::mt19937_64;

/// Mixes a base seed with a list of stream coordinates (step, index, ...).
///
/// Every stochastic unit of work (one trajectory, one noise draw) gets its own
/// generator seeded from its coordinates, so results do not depend on the
/// order in which work items are scheduled.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coordinates);

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> coordinates) {
  return Rng{derive_seed(base, coordinates)};
}

}  // namespace oar

#endif  // OAR_COMMON_RNG_HPP
