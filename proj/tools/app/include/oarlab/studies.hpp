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


#ifndef OARLAB_STUDIES_HPP
#define OARLAB_STUDIES_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "oar/attribution/importance.hpp"
#include "oar/evaluation/oracle.hpp"
#include "oar/evaluation/recall.hpp"
#include "oar/evaluation/timing.hpp"
#include "oar/evaluation/variance.hpp"
#include "oar/policy/policy.hpp"
#include "oarlab/config.hpp"

namespace oarlab {

using oar::policy::Policy;
using oar::policy::TokenId;

struct CorpusItem {
  std::uint64_t id = 0;
  oar::tasks::TaskInstance task;
  std::vector<TokenId> response;
};

/// Sampled responses that earned full accuracy reward.
struct Corpus {
  std::vector<CorpusItem> items;
  std::size_t attempts = 0;
};

/// Samples held-out tasks until `study.trajectories` correct responses are found
/// or `study.max_attempts` samples were drawn. Attempt i uses its own seed, so the
/// corpus does not depend on the worker count.
Corpus collect_correct_corpus(const Policy& policy, const RunConfig& config);

struct OracleStudy {
  Corpus corpus;
  std::vector<oar::evaluation::OracleLabels> labels;
  std::size_t labeled_tokens = 0;
  std::size_t causal_tokens = 0;

  [[nodiscard]] double causal_fraction() const;
};

OracleStudy run_oracle_study(const Policy& policy, const RunConfig& config);

/// Methods compared by the recall study, in report order.
const std::vector<oar::attribution::ImportanceMethod>& recall_methods();

struct RecallStudy {
  OracleStudy oracle;
  std::map<std::string, std::vector<oar::attribution::ImportanceProfile>> profiles;
  std::vector<oar::evaluation::RecallCurve> curves;
  /// Monte-Carlo band of random ranking, one entry per grid point.
  std::vector<oar::evaluation::RecallBand> bands;

  [[nodiscard]] const oar::evaluation::RecallCurve& curve(const std::string& method) const;
  /// Recall of `method` at the grid point `k_percent`.
  [[nodiscard]] double recall_at(const std::string& method, double k_percent) const;
  [[nodiscard]] const oar::evaluation::RecallBand& band_at(double k_percent) const;
};

RecallStudy run_recall_study(const Policy& policy, const RunConfig& config);
/// Recall study over an existing oracle study.
RecallStudy run_recall_study(const Policy& policy, const RunConfig& config, OracleStudy oracle);

std::vector<oar::evaluation::TimingRow> run_timing_study(const Policy& policy, const RunConfig& config);

oar::evaluation::VarianceSimResult run_variance_study(const RunConfig& config);

void write_oracle_reports(const std::filesystem::path& directory, const OracleStudy& study);
void write_recall_reports(const std::filesystem::path& directory, const RecallStudy& study);
void write_timing_report(const std::filesystem::path& directory, const std::vector<oar::evaluation::TimingRow>& rows);
void write_variance_report(const std::filesystem::path& directory, const RunConfig& config,
                           const oar::evaluation::VarianceSimResult& result);

}  // namespace oarlab

#endif  // OARLAB_STUDIES_HPP
