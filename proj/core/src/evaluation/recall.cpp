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

#include "oar/evaluation/recall.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oar/common/error.hpp"
#include "oar/common/rng.hpp"

namespace oar::evaluation {

std::vector<double> default_k_grid() {
  std::vector<double> grid;
  for (int k = 5; k <= 100; k += 5) {
    grid.push_back(static_cast<double>(k));
  }
  return grid;
}

std::size_t top_k_count(double k_percent, std::size_t count) {
  require(k_percent > 0.0 && k_percent <= 100.0, "K must lie in (0, 100]");
  // Subtract a tiny slack so that e.g. 20% of 10 is exactly 2 despite rounding.
  const double exact = k_percent / 100.0 * static_cast<double>(count);
  return std::min(count, static_cast<std::size_t>(std::ceil(exact - 1e-9)));
}

std::vector<std::size_t> rank_positions(const OracleLabels& labels, const attribution::ImportanceProfile& profile) {
  require(labels.size() == profile.size(), "labels and profile differ in length");
  std::vector<std::size_t> positions;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels.labeled[t] != 0) {
      positions.push_back(t);
    }
  }
  std::stable_sort(positions.begin(), positions.end(), [&](std::size_t a, std::size_t b) {
    return profile.normalized[a] > profile.normalized[b];
  });
  return positions;
}

RecallCurve recall_curve(const std::string& method, std::span<const OracleLabels> labels,
                         std::span<const attribution::ImportanceProfile> profiles, std::span<const double> k_grid) {
  require(labels.size() == profiles.size(), "recall_curve: labels and profiles are not aligned");
  std::size_t total_causal = 0;
  for (const auto& l : labels) {
    total_causal += l.causal_count();
  }
  if (total_causal == 0) {
    throw DegenerateInputError("recall_curve: no causal tokens in the corpus");
  }
  RecallCurve curve;
  curve.method = method;
  curve.k_grid.assign(k_grid.begin(), k_grid.end());
  std::vector<std::vector<std::size_t>> rankings;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    rankings.push_back(rank_positions(labels[i], profiles[i]));
  }
  for (const double k : k_grid) {
    std::size_t captured = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const std::size_t top = top_k_count(k, rankings[i].size());
      for (std::size_t r = 0; r < top; ++r) {
        captured += labels[i].causal[rankings[i][r]];
      }
    }
    curve.recall.push_back(static_cast<double>(captured) / static_cast<double>(total_causal));
  }
  return curve;
}

RecallBand random_recall_band(std::span<const OracleLabels> labels, double k_percent, std::size_t repeats,
                              std::uint64_t seed) {
  require(repeats >= 2, "random_recall_band needs at least two repeats");
  std::size_t total_causal = 0;
  for (const auto& l : labels) {
    total_causal += l.causal_count();
  }
  if (total_causal == 0) {
    throw DegenerateInputError("random_recall_band: no causal tokens in the corpus");
  }
  Rng rng(seed);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t r = 0; r < repeats; ++r) {
    std::size_t captured = 0;
    for (const auto& l : labels) {
      std::vector<std::uint8_t> causal;
      for (std::size_t t = 0; t < l.size(); ++t) {
        if (l.labeled[t] != 0) {
          causal.push_back(l.causal[t]);
        }
      }
      std::shuffle(causal.begin(), causal.end(), rng);
      const std::size_t top = top_k_count(k_percent, causal.size());
      captured += static_cast<std::size_t>(std::accumulate(causal.begin(), causal.begin() + static_cast<std::ptrdiff_t>(top), 0));
    }
    const double recall = static_cast<double>(captured) / static_cast<double>(total_causal);
    sum += recall;
    sum_sq += recall * recall;
  }
  const double n = static_cast<double>(repeats);
  RecallBand band;
  band.mean = sum / n;
  band.stddev = std::sqrt(std::max(0.0, (sum_sq - n * band.mean * band.mean) / (n - 1.0)));
  return band;
}

}  // namespace oar::evaluation
