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


#include "oarlab/studies.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>

#include "oar/attribution/scores.hpp"
#include "oar/common/error.hpp"
#include "oar/common/parallel.hpp"
#include "oar/common/rng.hpp"
#include "oar/tasks/reward.hpp"
#include "oar/tasks/vocabulary.hpp"
#include "oar/trainer/rollout.hpp"
#include "oarlab/svg.hpp"

namespace oarlab {
namespace fs = std::filesystem;
using oar::attribution::ImportanceMethod;

namespace {

constexpr std::size_t kCorpusBlock = 64;
constexpr std::uint64_t kProfileStream = 0x70726f66;
constexpr std::uint64_t kBandStream = 0x62616e64;

std::ofstream open_report(const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw oar::Error("cannot write " + path.string());
  }
  return out;
}

}  // namespace

Corpus collect_correct_corpus(const Policy& policy, const RunConfig& config) {
  const auto& study = config.study;
  Corpus corpus;
  while (corpus.items.size() < study.trajectories && corpus.attempts < study.max_attempts) {
    const std::size_t first = corpus.attempts;
    const std::size_t count = std::min(kCorpusBlock, study.max_attempts - first);
    std::vector<std::optional<CorpusItem>> block(count);
    oar::parallel_for(count, config.workers, [&](std::size_t j) {
      const std::uint64_t index = first + j;
      auto task = oar::tasks::stream_task(study.task_seed, index, config.min_difficulty, config.max_difficulty,
                                          config.task);
      auto rng = oar::make_rng(study.seed, {index});
      auto generation = oar::policy::sample(policy, task.prompt, config.eval.temperature, config.eval.max_new_tokens,
                                            oar::policy::DecodeMode::kStochastic, rng);
      if (oar::tasks::compute_reward(generation.tokens, task).accuracy == 1.0) {
        block[j] = CorpusItem{index, std::move(task), std::move(generation.tokens)};
      }
    });
    corpus.attempts += count;
    for (auto& item : block) {
      if (item && corpus.items.size() < study.trajectories) {
        corpus.items.push_back(std::move(*item));
      }
    }
  }
  return corpus;
}

double OracleStudy::causal_fraction() const {
  return labeled_tokens == 0 ? 0.0 : static_cast<double>(causal_tokens) / static_cast<double>(labeled_tokens);
}

OracleStudy run_oracle_study(const Policy& policy, const RunConfig& config) {
  OracleStudy study;
  study.corpus = collect_correct_corpus(policy, config);
  if (study.corpus.items.empty()) {
    throw oar::DegenerateInputError("no correct trajectory in " + std::to_string(study.corpus.attempts) +
                                    " sampled responses");
  }
  const oar::evaluation::OracleConfig oracle{config.eval.max_new_tokens, config.train.rollout.format_weight};
  study.labels.resize(study.corpus.items.size());
  oar::parallel_for(study.labels.size(), config.workers, [&](std::size_t i) {
    const auto& item = study.corpus.items[i];
    study.labels[i] = oar::evaluation::oracle_label(policy, item.task, item.response, oracle);
  });
  for (const auto& labels : study.labels) {
    study.labeled_tokens += static_cast<std::size_t>(std::count(labels.labeled.begin(), labels.labeled.end(), 1));
    study.causal_tokens += labels.causal_count();
  }
  return study;
}

const std::vector<ImportanceMethod>& recall_methods() {
  static const std::vector<ImportanceMethod> methods = {ImportanceMethod::kOarP, ImportanceMethod::kOarG,
                                                        ImportanceMethod::kEntropy, ImportanceMethod::kRandom};
  return methods;
}

const oar::evaluation::RecallCurve& RecallStudy::curve(const std::string& method) const {
  for (const auto& c : curves) {
    if (c.method == method) {
      return c;
    }
  }
  throw oar::ContractViolation("no recall curve for method '" + method + "'");
}

namespace {

std::size_t grid_index(const std::vector<double>& grid, double k_percent) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i] - k_percent) < 1e-9) {
      return i;
    }
  }
  throw oar::ContractViolation("K=" + format_number(k_percent) + " is not on the recall grid");
}

}  // namespace

double RecallStudy::recall_at(const std::string& method, double k_percent) const {
  const auto& c = curve(method);
  return c.recall[grid_index(c.k_grid, k_percent)];
}

const oar::evaluation::RecallBand& RecallStudy::band_at(double k_percent) const {
  return bands[grid_index(curves.front().k_grid, k_percent)];
}

RecallStudy run_recall_study(const Policy& policy, const RunConfig& config) {
  return run_recall_study(policy, config, run_oracle_study(policy, config));
}

RecallStudy run_recall_study(const Policy& policy, const RunConfig& config, OracleStudy oracle) {
  RecallStudy study;
  study.oracle = std::move(oracle);
  const auto& items = study.oracle.corpus.items;
  const auto attribution = config.train.credit.attribution;
  const auto grid = oar::evaluation::default_k_grid();
  for (const auto method : recall_methods()) {
    std::vector<oar::attribution::ImportanceProfile> profiles(items.size());
    oar::parallel_for(items.size(), config.workers, [&](std::size_t i) {
      const auto seed = oar::derive_seed(config.study.seed, {kProfileStream, items[i].id});
      profiles[i] =
          oar::attribution::compute_profile(method, policy, items[i].task.prompt, items[i].response, attribution, seed);
    });
    const std::string name(to_string(method));
    study.curves.push_back(oar::evaluation::recall_curve(name, study.oracle.labels, profiles, grid));
    study.profiles.emplace(name, std::move(profiles));
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    study.bands.push_back(oar::evaluation::random_recall_band(study.oracle.labels, grid[k], config.study.band_repeats,
                                                              oar::derive_seed(config.study.seed, {kBandStream, k})));
  }
  return study;
}

std::vector<oar::evaluation::TimingRow> run_timing_study(const Policy& policy, const RunConfig& config) {
  const auto train = config.train_config();
  std::vector<oar::tasks::TaskInstance> tasks;
  for (std::size_t i = 0; i < config.study.timing_prompts; ++i) {
    tasks.push_back(oar::tasks::stream_task(config.study.task_seed, i, config.min_difficulty, config.max_difficulty,
                                            config.task));
  }
  const auto batch = oar::trainer::collect_rollouts(policy, tasks, train.rollout, config.study.seed, 0);
  oar::evaluation::TimingConfig timing;
  timing.credit = train.credit;
  timing.clip = train.clip;
  timing.adam = train.adam;
  timing.temperature = train.rollout.temperature;
  timing.seed = config.study.seed;
  timing.repeats = config.study.timing_repeats;
  timing.workers = config.workers;
  return oar::evaluation::profile_time_per_token(policy, batch, timing);
}

oar::evaluation::VarianceSimResult run_variance_study(const RunConfig& config) {
  oar::evaluation::VarianceSimConfig sim;
  sim.length = config.study.variance_length;
  sim.trials = config.study.variance_trials;
  sim.distribution = config.study.variance_distribution;
  sim.mean = config.study.variance_mean;
  sim.stddev = config.study.variance_stddev;
  sim.seed = config.study.seed;
  return oar::evaluation::variance_sim(sim);
}

void write_oracle_reports(const fs::path& directory, const OracleStudy& study) {
  auto summary = open_report(directory / "oracle_summary.csv");
  summary << "trajectories,attempts,labeled_tokens,causal_tokens,causal_fraction\n";
  summary << study.corpus.items.size() << "," << study.corpus.attempts << "," << study.labeled_tokens << ","
          << study.causal_tokens << "," << format_number(study.causal_fraction()) << "\n";
  auto records = open_report(directory / "oracle.jsonl");
  for (std::size_t i = 0; i < study.labels.size(); ++i) {
    const auto& item = study.corpus.items[i];
    const auto& labels = study.labels[i];
    nlohmann::ordered_json tokens = nlohmann::ordered_json::array();
    nlohmann::ordered_json replacements = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < item.response.size(); ++t) {
      tokens.push_back(oar::tasks::token_string(item.response[t]));
      replacements.push_back(labels.labeled[t] != 0 ? oar::tasks::token_string(labels.replacement[t]) : "");
    }
    nlohmann::ordered_json record;
    record["trajectory_id"] = item.id;
    record["prompt"] = oar::tasks::decode(item.task.prompt);
    record["tokens"] = tokens;
    record["labeled"] = labels.labeled;
    record["causal"] = labels.causal;
    record["replacement"] = replacements;
    records << record.dump() << "\n";
  }
}

void write_recall_reports(const fs::path& directory, const RecallStudy& study) {
  write_oracle_reports(directory, study.oracle);
  auto curves = open_report(directory / "recall.csv");
  curves << "method,k_percent,recall\n";
  LinePlot plot{"Causal-token recall", "top K% of ranked tokens", "recall", {}};
  for (const auto& curve : study.curves) {
    for (std::size_t k = 0; k < curve.k_grid.size(); ++k) {
      curves << curve.method << "," << format_number(curve.k_grid[k]) << "," << format_number(curve.recall[k]) << "\n";
    }
    plot.series.push_back({curve.method, curve.k_grid, curve.recall});
  }
  auto bands = open_report(directory / "recall_band.csv");
  bands << "k_percent,mean,stddev,lower,upper\n";
  Series band_mean{"random band mean", {}, {}};
  for (std::size_t k = 0; k < study.bands.size(); ++k) {
    const auto& band = study.bands[k];
    const double grid_k = study.curves.front().k_grid[k];
    bands << format_number(grid_k) << "," << format_number(band.mean) << "," << format_number(band.stddev) << ","
          << format_number(band.lower()) << "," << format_number(band.upper()) << "\n";
    band_mean.x.push_back(grid_k);
    band_mean.y.push_back(band.mean);
  }
  plot.series.push_back(band_mean);
  open_report(directory / "recall.svg") << render_svg(plot);

  auto importance = open_report(directory / "importance.jsonl");
  auto tokens = open_report(directory / "tokens.jsonl");
  const auto& items = study.oracle.corpus.items;
  for (std::size_t i = 0; i < items.size(); ++i) {
    nlohmann::ordered_json row;
    row["trajectory_id"] = items[i].id;
    row["prompt"] = oar::tasks::decode(items[i].task.prompt);
    nlohmann::ordered_json per_token = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < items[i].response.size(); ++t) {
      nlohmann::ordered_json cell;
      cell["token"] = oar::tasks::token_string(items[i].response[t]);
      cell["oracle"] = study.oracle.labels[i].causal[t];
      for (const auto method : recall_methods()) {
        const std::string name(to_string(method));
        cell["I_hat_" + name] = study.profiles.at(name)[i].normalized[t];
      }
      per_token.push_back(cell);
    }
    row["tokens"] = per_token;
    tokens << row.dump() << "\n";
    for (const auto method : recall_methods()) {
      const auto& profile = study.profiles.at(std::string(to_string(method)))[i];
      importance << oar::attribution::importance_record(items[i].id, profile, items[i].response).dump() << "\n";
    }
  }
}

void write_timing_report(const fs::path& directory, const std::vector<oar::evaluation::TimingRow>& rows) {
  auto out = open_report(directory / "timing.csv");
  out << "variant,seconds,action_tokens,time_per_token,normalized\n";
  for (const auto& row : rows) {
    out << row.variant << "," << format_number(row.seconds) << "," << row.action_tokens << ","
        << format_number(row.time_per_token) << "," << format_number(row.normalized) << "\n";
  }
}

void write_variance_report(const fs::path& directory, const RunConfig& config,
                           const oar::evaluation::VarianceSimResult& result) {
  auto out = open_report(directory / "variance.csv");
  out << "length,trials,distribution,broadcast_variance,token_variance,ratio\n";
  out << config.study.variance_length << "," << config.study.variance_trials << ","
      << to_string(config.study.variance_distribution) << "," << format_number(result.broadcast_variance) << ","
      << format_number(result.token_variance) << "," << format_number(result.ratio) << "\n";
}

}  // namespace oarlab
