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

#ifndef OAR_EVALUATION_RECALL_HPP
#define OAR_EVALUATION_RECALL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "oar/attribution/importance.hpp"
#include "oar/evaluation/oracle.hpp"

namespace oar::evaluation {

struct RecallCurve {
  std::string method;
  /// Percentages in (0, 100].
  std::vector<double> k_grid;
  std::vector<double> recall;
};

/// Default K grid: 5, 10, ..., 100 percent.
std::vector<double> default_k_grid();

/// Number of positions in the top K percent of `count`: ceil(K/100 * count).
std::size_t top_k_count(double k_percent, std::size_t count);

/// Labeled positions of one trajectory ordered by normalized importance,
/// highest first, ties broken by position.
std::vector<std::size_t> rank_positions(const OracleLabels& labels, const attribution::ImportanceProfile& profile);

/// Micro-averaged recall of causal tokens among each trajectory's top-K%
/// labeled positions. Throws DegenerateInputError when no causal token exists.
RecallCurve recall_curve(const std::string& method, std::span<const OracleLabels> labels,
                         std::span<const attribution::ImportanceProfile> profiles, std::span<const double> k_grid);

struct RecallBand {
  double mean = 0.0;
  double stddev = 0.0;
  [[nodiscard]] double lower() const { return mean - 3.0 * stddev; }
  [[nodiscard]] double upper() const { return mean + 3.0 * stddev; }
};

/// Monte-Carlo distribution of the recall at K of uniformly random rankings.
RecallBand random_recall_band(std::span<const OracleLabels> labels, double k_percent, std::size_t repeats,
                              std::uint64_t seed);

}  // namespace oar::evaluation

#endif  // OAR_EVALUATION_RECALL_HPP
