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


#include "oarlab/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "oar/common/error.hpp"
#include "oar/policy/checkpoint.hpp"
#include "oar/trainer/rollout.hpp"
#include "oar/trainer/sft.hpp"
#include "oar/trainer/trainer.hpp"
#include "oarlab/run.hpp"
#include "oarlab/studies.hpp"
#include "oarlab/svg.hpp"

namespace oarlab {
namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw oar::Error("cannot write " + path.string());
  }
  return out;
}

std::string json_cell(const nlohmann::ordered_json& value) {
  if (value.is_boolean()) {
    return value.get<bool>() ? "true" : "false";
  }
  if (value.is_number_float()) {
    return format_number(value.get<double>());
  }
  if (value.is_number()) {
    return value.dump();
  }
  return value.get<std::string>();
}

void write_eval_row(std::ostream& out, const std::string& phase, const std::string& mode,
                    const oar::trainer::EvalResult& result) {
  out << phase << "," << mode << "," << format_number(result.accuracy) << "," << format_number(result.format) << ","
      << format_number(result.overall) << "," << result.responses << "\n";
}

// Greedy and sampled held-out evaluation of one policy.
void write_evaluations(std::ostream& out, const std::string& phase, const oar::policy::Policy& policy,
                       const RunConfig& config) {
  auto eval = config.eval_config();
  auto greedy = eval;
  greedy.greedy = true;
  greedy.samples = 1;
  write_eval_row(out, phase, "greedy", oar::trainer::evaluate_rewards(policy, greedy));
  auto sampled = eval;
  sampled.greedy = false;
  write_eval_row(out, phase, "sampled", oar::trainer::evaluate_rewards(policy, sampled));
}

std::string checkpoint_name(std::size_t step) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "step_%06zu.ckpt", step);
  return buffer;
}

}  // namespace

fs::path cmd_pretrain(const RunConfig& config, const std::optional<fs::path>& out, std::ostream& progress) {
  config.validate();
  RunDirectory run(out.value_or(run_root() / run_name(config, "pretrain")), "pretrain", &config);
  oar::policy::Policy policy(config.model, config.init_seed);
  auto losses = open_output(run.logs() / "sft_loss.csv");
  losses << "step,loss\n";
  const auto sft = config.sft_config();
  oar::trainer::sft_warmstart(policy, sft, [&](std::size_t step, double loss) {
    losses << step << "," << format_number(loss) << "\n";
    if ((step + 1) % 100 == 0 || step + 1 == sft.steps) {
      progress << "sft step " << step + 1 << "/" << sft.steps << " loss " << loss << std::endl;
    }
  });
  losses.close();
  oar::policy::save_checkpoint(policy, run.checkpoints() / "warmstart.ckpt");
  auto evals = open_output(run.reports() / "warmstart_eval.csv");
  evals << "phase,mode,accuracy,format,overall,responses\n";
  write_evaluations(evals, "warmstart", policy, config);
  evals.close();
  run.finalize();
  return run.path();
}

fs::path cmd_train(const RunConfig& config, const std::optional<fs::path>& out, std::ostream& progress) {
  config.validate();
  if (config.warmstart.empty()) {
    throw oar::Error("train needs a warm-start checkpoint (--warmstart or train.warmstart)");
  }
  const fs::path warmstart = resolve_checkpoint(config.warmstart, "warmstart.ckpt");
  auto policy = oar::policy::load_checkpoint(warmstart);
  RunDirectory run(out.value_or(run_root() / run_name(config, "train")), "train", &config);
  run.add_input("warmstart", warmstart);

  auto evals = open_output(run.reports() / "eval.csv");
  evals << "phase,mode,accuracy,format,overall,responses\n";
  write_evaluations(evals, "initial", policy, config);

  const auto train = config.train_config();
  oar::trainer::Trainer trainer(std::move(policy), train);
  auto steps = open_output(run.logs() / "steps.jsonl");
  auto metrics = open_output(run.reports() / "metrics.csv");
  const auto& fields = oar::trainer::step_log_fields();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    metrics << (i == 0 ? "" : ",") << fields[i];
  }
  metrics << "\n";
  for (std::size_t s = 0; s < train.steps; ++s) {
    const auto log = trainer.step();
    oar::trainer::write_step_log(steps, log);
    const auto record = oar::trainer::to_json(log);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      metrics << (i == 0 ? "" : ",") << json_cell(record.at(fields[i]));
    }
    metrics << "\n";
    if ((s + 1) % 10 == 0 || s + 1 == train.steps) {
      progress << "step " << s + 1 << "/" << train.steps << " accuracy " << log.reward_accuracy << " ess "
               << log.ess_ratio << " top10 " << log.top10_mass << std::endl;
    }
    if (config.checkpoint_every > 0 && (s + 1) % config.checkpoint_every == 0) {
      oar::policy::save_checkpoint(trainer.policy(), run.checkpoints() / checkpoint_name(s + 1));
    }
  }
  steps.close();
  metrics.close();
  oar::policy::save_checkpoint(trainer.policy(), run.checkpoints() / "final.ckpt");
  write_evaluations(evals, "final", trainer.policy(), config);
  evals.close();
  run.finalize();
  return run.path();
}

std::string_view to_string(Study study) {
  switch (study) {
    case Study::kOracle:
      return "oracle";
    case Study::kRecall:
      return "recall";
    case Study::kVariance:
      return "variance";
    case Study::kTiming:
      return "timing";
  }
  return "unknown";
}

Study parse_study(std::string_view text) {
  for (const auto study : {Study::kOracle, Study::kRecall, Study::kVariance, Study::kTiming}) {
    if (text == to_string(study)) {
      return study;
    }
  }
  throw oar::ContractViolation("unknown study '" + std::string(text) +
                               "' (valid options: oracle, recall, variance, timing)");
}

fs::path cmd_eval(const RunConfig& config, const std::optional<fs::path>& checkpoint, Study study,
                  const std::optional<fs::path>& out, std::ostream& progress) {
  config.validate();
  std::optional<oar::policy::Policy> policy;
  fs::path checkpoint_path;
  if (checkpoint) {
    checkpoint_path = resolve_checkpoint(*checkpoint, "final.ckpt");
    policy.emplace(oar::policy::load_checkpoint(checkpoint_path));
  } else if (study != Study::kVariance) {
    throw oar::Error("the " + std::string(to_string(study)) + " study needs --checkpoint");
  }
  const std::string command = "eval-" + std::string(to_string(study));
  RunDirectory run(out.value_or(run_root() / run_name(config, command)), command, &config);
  if (policy) {
    run.add_input("checkpoint", checkpoint_path);
  }
  switch (study) {
    case Study::kOracle: {
      const auto result = run_oracle_study(*policy, config);
      write_oracle_reports(run.reports(), result);
      progress << "oracle: " << result.corpus.items.size() << " correct trajectories, causal fraction "
               << result.causal_fraction() << std::endl;
      break;
    }
    case Study::kRecall: {
      const auto result = run_recall_study(*policy, config);
      write_recall_reports(run.reports(), result);
      for (const auto& curve : result.curves) {
        progress << "recall@20 " << curve.method << " " << result.recall_at(curve.method, 20.0) << std::endl;
      }
      break;
    }
    case Study::kVariance: {
      const auto result = run_variance_study(config);
      write_variance_report(run.reports(), config, result);
      progress << "variance ratio " << result.ratio << std::endl;
      break;
    }
    case Study::kTiming: {
      const auto rows = run_timing_study(*policy, config);
      write_timing_report(run.reports(), rows);
      for (const auto& row : rows) {
        progress << "timing " << row.variant << " " << row.normalized << "x" << std::endl;
      }
      break;
    }
  }
  run.finalize();
  return run.path();
}

}  // namespace oarlab
