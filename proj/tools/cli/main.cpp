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


#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "oar/common/error.hpp"
#include "oarlab/commands.hpp"
#include "oarlab/config.hpp"
#include "oarlab/run.hpp"

namespace {

enum ExitCode { kOk = 0, kRuntime = 1, kUsage = 2, kFormat = 3, kContract = 4 };

int fail(const std::string& kind, const std::string& message, int code) {
  std::string line = message;
  std::replace(line.begin(), line.end(), '\n', ' ');
  std::cerr << "oarlab: error[" << kind << "]: " << line << std::endl;
  return code;
}

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  std::string workers;
};

void add_common(CLI::App* command, CommonOptions& options, bool config_required) {
  auto* config = command->add_option("-c,--config", options.config_path, "INI configuration file");
  if (config_required) {
    config->required();
  }
  command->add_option("--set", options.overrides, "Override a config key, as section.key=value")
      ->take_all()
      ->allow_extra_args(false);
  command->add_option("-o,--out", options.out, "Run directory (default: derived name under $OARLAB_RUN_ROOT)");
  command->add_option("--workers", options.workers, "Worker threads (0 = hardware concurrency)");
}

oarlab::RunConfig build_config(const CommonOptions& options,
                               const std::vector<std::pair<std::string, std::string>>& flags) {
  oarlab::RunConfig config = options.config_path.empty() ? oarlab::RunConfig{} : oarlab::load_config(options.config_path);
  for (const auto& assignment : options.overrides) {
    oarlab::apply_override(config, assignment);
  }
  for (const auto& [key, value] : flags) {
    if (!value.empty()) {
      oarlab::set_value(config, key, value);
    }
  }
  if (!options.workers.empty()) {
    oarlab::set_value(config, "run.workers", options.workers);
  }
  return config;
}

std::optional<std::filesystem::path> out_path(const CommonOptions& options) {
  if (options.out.empty()) {
    return std::nullopt;
  }
  return std::filesystem::path(options.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oarlab: outcome-attributed credit assignment for GRPO on synthetic arithmetic"};
  app.require_subcommand(1);

  CommonOptions pretrain_options;
  std::string init_seed;
  auto* pretrain = app.add_subcommand("pretrain", "Supervised warm start on gold traces");
  add_common(pretrain, pretrain_options, true);
  pretrain->add_option("--seed", init_seed, "Model initialization seed");

  CommonOptions train_options;
  std::string credit;
  std::string tau;
  std::string beta;
  std::string probe;
  std::string seed;
  std::string steps;
  std::string warmstart;
  bool force_degenerate = false;
  auto* train = app.add_subcommand("train", "GRPO training from a warm-start checkpoint");
  add_common(train, train_options, true);
  train->add_option("--credit", credit, "Credit method: vanilla, random, entropy, oar_p, oar_g");
  train->add_option("--tau", tau, "Gate threshold");
  train->add_option("--beta", beta, "Gate boost");
  train->add_option("--probe", probe, "Outcome probe: lt_logits, as_mean, as_joint");
  train->add_option("--seed", seed, "Training seed");
  train->add_option("--steps", steps, "Optimizer steps");
  train->add_option("--warmstart", warmstart, "Warm-start checkpoint or pretrain run directory");
  train->add_flag("--force-degenerate", force_degenerate, "Treat every importance profile as degenerate");

  CommonOptions eval_options;
  std::string checkpoint;
  std::string study;
  std::string eval_probe;
  auto* eval = app.add_subcommand("eval", "Oracle, recall, variance or timing study");
  add_common(eval, eval_options, false);
  eval->add_option("--checkpoint", checkpoint, "Checkpoint file or run directory");
  eval->add_option("--study", study, "Study: oracle, recall, variance, timing")->required();
  eval->add_option("--probe", eval_probe, "Outcome probe for attribution");

  std::vector<std::string> runs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Compare the step logs of finished runs");
  report->add_option("runs", runs, "Run directories")->required();
  report->add_option("-o,--out", report_out, "Report directory (default: report under $OARLAB_RUN_ROOT)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForAllHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& error) {
    return fail("usage", error.what(), kUsage);
  }

  try {
    std::filesystem::path produced;
    if (pretrain->parsed()) {
      const auto config = build_config(pretrain_options, {{"model.init_seed", init_seed}});
      produced = oarlab::cmd_pretrain(config, out_path(pretrain_options), std::cerr);
    } else if (train->parsed()) {
      auto config = build_config(train_options, {{"credit.method", credit},
                                                 {"credit.tau", tau},
                                                 {"credit.beta", beta},
                                                 {"credit.probe", probe},
                                                 {"run.seed", seed},
                                                 {"train.steps", steps},
                                                 {"train.warmstart", warmstart}});
      if (force_degenerate) {
        config.train.credit.force_degenerate = true;
      }
      produced = oarlab::cmd_train(config, out_path(train_options), std::cerr);
    } else if (eval->parsed()) {
      const auto kind = oarlab::parse_study(study);
      const auto config = build_config(eval_options, {{"credit.probe", eval_probe}});
      std::optional<std::filesystem::path> checkpoint_path;
      if (!checkpoint.empty()) {
        checkpoint_path = checkpoint;
      }
      produced = oarlab::cmd_eval(config, checkpoint_path, kind, out_path(eval_options), std::cerr);
    } else {
      const auto out = report_out.empty() ? oarlab::run_root() / "report" : std::filesystem::path(report_out);
      std::vector<std::filesystem::path> run_paths(runs.begin(), runs.end());
      produced = oarlab::cmd_report(run_paths, out, std::cerr);
    }
    std::cout << produced.string() << std::endl;
  } catch (const oarlab::ConfigError& error) {
    return fail("config", error.what(), kUsage);
  } catch (const oar::FormatError& error) {
    return fail("format", error.what(), kFormat);
  } catch (const oar::Error& error) {
    return fail("runtime", error.what(), kRuntime);
  } catch (const oar::ContractViolation& error) {
    return fail("invalid-argument", error.what(), kContract);
  } catch (const std::exception& error) {
    return fail("internal", error.what(), kRuntime);
  }
  return kOk;
}
