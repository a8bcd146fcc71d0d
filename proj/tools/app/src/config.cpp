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


#include "oarlab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <type_traits>

#include "oar/attribution/probe.hpp"
#include "oar/reshaping/advantages.hpp"

namespace oarlab {
namespace {

std::string format_real(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

bool well_typed(ValueType type, const std::string& text) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (text.empty()) {
    return type == ValueType::kString;
  }
  switch (type) {
    case ValueType::kInteger: {
      long long value = 0;
      const auto result = std::from_chars(first, last, value);
      return result.ec == std::errc() && result.ptr == last;
    }
    case ValueType::kUnsigned: {
      unsigned long long value = 0;
      const auto result = std::from_chars(first, last, value);
      return result.ec == std::errc() && result.ptr == last;
    }
    case ValueType::kReal: {
      double value = 0.0;
      const auto result = std::from_chars(first, last, value);
      return result.ec == std::errc() && result.ptr == last;
    }
    case ValueType::kBoolean:
      return text == "true" || text == "false";
    case ValueType::kString:
      return true;
  }
  return false;
}

std::string_view type_name(ValueType type) {
  switch (type) {
    case ValueType::kInteger:
      return "integer";
    case ValueType::kUnsigned:
      return "non-negative integer";
    case ValueType::kReal:
      return "real";
    case ValueType::kBoolean:
      return "boolean (true/false)";
    case ValueType::kString:
      return "string";
  }
  return "unknown";
}

template <typename Field>
KeySpec numeric_key(std::string key, Field field) {
  using T = std::remove_reference_t<decltype(field(std::declval<RunConfig&>()))>;
  ValueType type = ValueType::kReal;
  if constexpr (std::is_same_v<T, bool>) {
    type = ValueType::kBoolean;
  } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
    type = ValueType::kUnsigned;
  } else if constexpr (std::is_integral_v<T>) {
    type = ValueType::kInteger;
  }
  return KeySpec{
      std::move(key), type,
      [field](const RunConfig& config) -> std::string {
        const T value = field(const_cast<RunConfig&>(config));
        if constexpr (std::is_same_v<T, bool>) {
          return value ? "true" : "false";
        } else if constexpr (std::is_integral_v<T>) {
          return std::to_string(value);
        } else {
          return format_real(value);
        }
      },
      [field](RunConfig& config, const std::string& text) {
        T& target = field(config);
        if constexpr (std::is_same_v<T, bool>) {
          target = text == "true";
        } else {
          std::from_chars(text.data(), text.data() + text.size(), target);
        }
      }};
}

KeySpec string_key(std::string key, std::function<std::string(const RunConfig&)> get,
                   std::function<void(RunConfig&, const std::string&)> set) {
  return KeySpec{std::move(key), ValueType::kString, std::move(get), std::move(set)};
}

std::vector<KeySpec> build_schema() {
  using oar::attribution::parse_probe_kind;
  using oar::evaluation::parse_latent_distribution;
  using oar::reshaping::parse_tau_mode;
  using oar::trainer::parse_credit_method;
  std::vector<KeySpec> schema;
  schema.push_back(string_key(
      "run.name", [](const RunConfig& c) { return c.name; }, [](RunConfig& c, const std::string& v) { c.name = v; }));
  schema.push_back(numeric_key("run.seed", [](RunConfig& c) -> auto& { return c.train.seed; }));
  schema.push_back(numeric_key("run.workers", [](RunConfig& c) -> auto& { return c.workers; }));

  schema.push_back(numeric_key("model.d_model", [](RunConfig& c) -> auto& { return c.model.d_model; }));
  schema.push_back(numeric_key("model.n_layers", [](RunConfig& c) -> auto& { return c.model.n_layers; }));
  schema.push_back(numeric_key("model.n_heads", [](RunConfig& c) -> auto& { return c.model.n_heads; }));
  schema.push_back(numeric_key("model.max_seq_len", [](RunConfig& c) -> auto& { return c.model.max_seq_len; }));
  schema.push_back(numeric_key("model.init_seed", [](RunConfig& c) -> auto& { return c.init_seed; }));

  schema.push_back(numeric_key("task.max_value", [](RunConfig& c) -> auto& { return c.task.max_value; }));
  schema.push_back(numeric_key("task.operand_max", [](RunConfig& c) -> auto& { return c.task.operand_max; }));
  schema.push_back(numeric_key("task.filler_min", [](RunConfig& c) -> auto& { return c.task.filler_min; }));
  schema.push_back(numeric_key("task.filler_max", [](RunConfig& c) -> auto& { return c.task.filler_max; }));
  schema.push_back(numeric_key("task.min_difficulty", [](RunConfig& c) -> auto& { return c.min_difficulty; }));
  schema.push_back(numeric_key("task.max_difficulty", [](RunConfig& c) -> auto& { return c.max_difficulty; }));

  schema.push_back(numeric_key("sft.steps", [](RunConfig& c) -> auto& { return c.sft.steps; }));
  schema.push_back(numeric_key("sft.batch_size", [](RunConfig& c) -> auto& { return c.sft.batch_size; }));
  schema.push_back(numeric_key("sft.learning_rate", [](RunConfig& c) -> auto& { return c.sft.adam.learning_rate; }));
  schema.push_back(numeric_key("sft.max_grad_norm", [](RunConfig& c) -> auto& { return c.sft.adam.max_grad_norm; }));
  schema.push_back(numeric_key("sft.task_seed", [](RunConfig& c) -> auto& { return c.sft.task_seed; }));

  schema.push_back(numeric_key("rollout.group_size", [](RunConfig& c) -> auto& { return c.train.rollout.group_size; }));
  schema.push_back(
      numeric_key("rollout.temperature", [](RunConfig& c) -> auto& { return c.train.rollout.temperature; }));
  schema.push_back(
      numeric_key("rollout.max_new_tokens", [](RunConfig& c) -> auto& { return c.train.rollout.max_new_tokens; }));
  schema.push_back(
      numeric_key("rollout.format_weight", [](RunConfig& c) -> auto& { return c.train.rollout.format_weight; }));

  schema.push_back(numeric_key("train.steps", [](RunConfig& c) -> auto& { return c.train.steps; }));
  schema.push_back(
      numeric_key("train.prompts_per_batch", [](RunConfig& c) -> auto& { return c.train.prompts_per_batch; }));
  schema.push_back(numeric_key("train.task_seed", [](RunConfig& c) -> auto& { return c.train.task_seed; }));
  schema.push_back(numeric_key("train.learning_rate", [](RunConfig& c) -> auto& { return c.train.adam.learning_rate; }));
  schema.push_back(numeric_key("train.adam_beta1", [](RunConfig& c) -> auto& { return c.train.adam.beta1; }));
  schema.push_back(numeric_key("train.adam_beta2", [](RunConfig& c) -> auto& { return c.train.adam.beta2; }));
  schema.push_back(numeric_key("train.adam_eps", [](RunConfig& c) -> auto& { return c.train.adam.eps; }));
  schema.push_back(numeric_key("train.max_grad_norm", [](RunConfig& c) -> auto& { return c.train.adam.max_grad_norm; }));
  schema.push_back(numeric_key("train.clip_low", [](RunConfig& c) -> auto& { return c.train.clip.low; }));
  schema.push_back(numeric_key("train.clip_high", [](RunConfig& c) -> auto& { return c.train.clip.high; }));
  schema.push_back(numeric_key("train.checkpoint_every", [](RunConfig& c) -> auto& { return c.checkpoint_every; }));
  schema.push_back(string_key(
      "train.warmstart", [](const RunConfig& c) { return c.warmstart; },
      [](RunConfig& c, const std::string& v) { c.warmstart = v; }));

  schema.push_back(string_key(
      "credit.method", [](const RunConfig& c) { return std::string(to_string(c.train.credit.method)); },
      [](RunConfig& c, const std::string& v) { c.train.credit.method = parse_credit_method(v); }));
  schema.push_back(numeric_key("credit.tau", [](RunConfig& c) -> auto& { return c.train.credit.gating.tau; }));
  schema.push_back(numeric_key("credit.beta", [](RunConfig& c) -> auto& { return c.train.credit.gating.beta; }));
  schema.push_back(numeric_key("credit.gate_epsilon", [](RunConfig& c) -> auto& { return c.train.credit.gating.eps; }));
  schema.push_back(string_key(
      "credit.tau_mode", [](const RunConfig& c) { return std::string(to_string(c.train.credit.gating.tau_mode)); },
      [](RunConfig& c, const std::string& v) { c.train.credit.gating.tau_mode = parse_tau_mode(v); }));
  schema.push_back(
      numeric_key("credit.tau_percentile", [](RunConfig& c) -> auto& { return c.train.credit.gating.percentile; }));
  schema.push_back(string_key(
      "credit.probe",
      [](const RunConfig& c) { return std::string(to_string(c.train.credit.attribution.probe.kind)); },
      [](RunConfig& c, const std::string& v) { c.train.credit.attribution.probe.kind = parse_probe_kind(v); }));
  schema.push_back(
      numeric_key("credit.probe_warmup", [](RunConfig& c) -> auto& { return c.train.credit.attribution.probe.warmup; }));
  schema.push_back(
      numeric_key("credit.batch_budget", [](RunConfig& c) -> auto& { return c.train.credit.attribution.batch_budget; }));
  schema.push_back(numeric_key("credit.serial", [](RunConfig& c) -> auto& { return c.train.credit.attribution.serial; }));
  schema.push_back(
      numeric_key("credit.sigma_scale", [](RunConfig& c) -> auto& { return c.train.credit.attribution.sigma_scale; }));
  schema.push_back(numeric_key("credit.sigma_absolute",
                               [](RunConfig& c) -> auto& { return c.train.credit.attribution.sigma_absolute; }));
  schema.push_back(
      numeric_key("credit.noise_repeats", [](RunConfig& c) -> auto& { return c.train.credit.attribution.repeats; }));
  schema.push_back(numeric_key("credit.entropy_alpha", [](RunConfig& c) -> auto& { return c.train.credit.entropy_alpha; }));
  schema.push_back(numeric_key("credit.entropy_kappa", [](RunConfig& c) -> auto& { return c.train.credit.entropy_kappa; }));
  schema.push_back(
      numeric_key("credit.force_degenerate", [](RunConfig& c) -> auto& { return c.train.credit.force_degenerate; }));

  schema.push_back(numeric_key("eval.tasks", [](RunConfig& c) -> auto& { return c.eval.tasks; }));
  schema.push_back(numeric_key("eval.task_seed", [](RunConfig& c) -> auto& { return c.eval.task_seed; }));
  schema.push_back(numeric_key("eval.greedy", [](RunConfig& c) -> auto& { return c.eval.greedy; }));
  schema.push_back(numeric_key("eval.samples", [](RunConfig& c) -> auto& { return c.eval.samples; }));
  schema.push_back(numeric_key("eval.temperature", [](RunConfig& c) -> auto& { return c.eval.temperature; }));
  schema.push_back(numeric_key("eval.max_new_tokens", [](RunConfig& c) -> auto& { return c.eval.max_new_tokens; }));
  schema.push_back(numeric_key("eval.seed", [](RunConfig& c) -> auto& { return c.eval.seed; }));

  schema.push_back(numeric_key("study.trajectories", [](RunConfig& c) -> auto& { return c.study.trajectories; }));
  schema.push_back(numeric_key("study.max_attempts", [](RunConfig& c) -> auto& { return c.study.max_attempts; }));
  schema.push_back(numeric_key("study.seed", [](RunConfig& c) -> auto& { return c.study.seed; }));
  schema.push_back(numeric_key("study.task_seed", [](RunConfig& c) -> auto& { return c.study.task_seed; }));
  schema.push_back(numeric_key("study.band_repeats", [](RunConfig& c) -> auto& { return c.study.band_repeats; }));
  schema.push_back(numeric_key("study.variance_length", [](RunConfig& c) -> auto& { return c.study.variance_length; }));
  schema.push_back(numeric_key("study.variance_trials", [](RunConfig& c) -> auto& { return c.study.variance_trials; }));
  schema.push_back(string_key(
      "study.variance_distribution",
      [](const RunConfig& c) { return std::string(to_string(c.study.variance_distribution)); },
      [](RunConfig& c, const std::string& v) { c.study.variance_distribution = parse_latent_distribution(v); }));
  schema.push_back(numeric_key("study.variance_mean", [](RunConfig& c) -> auto& { return c.study.variance_mean; }));
  schema.push_back(numeric_key("study.variance_stddev", [](RunConfig& c) -> auto& { return c.study.variance_stddev; }));
  schema.push_back(numeric_key("study.timing_prompts", [](RunConfig& c) -> auto& { return c.study.timing_prompts; }));
  schema.push_back(numeric_key("study.timing_repeats", [](RunConfig& c) -> auto& { return c.study.timing_repeats; }));
  return schema;
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& spec : config_schema()) {
    if (spec.key == key) {
      return &spec;
    }
  }
  return nullptr;
}

// Returns an error description, or an empty string on success.
std::string try_set(RunConfig& config, const std::string& key, const std::string& value) {
  const KeySpec* spec = find_key(key);
  if (spec == nullptr) {
    return "unknown key '" + key + "'";
  }
  if (!well_typed(spec->type, value)) {
    return "key '" + key + "' expects " + std::string(type_name(spec->type)) + ", got '" + value + "'";
  }
  try {
    spec->set(config, value);
  } catch (const std::exception& error) {
    return "key '" + key + "': " + error.what();
  }
  return {};
}

std::string join_errors(const std::vector<std::string>& errors) {
  std::string joined;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    joined += (i == 0 ? "" : "; ") + errors[i];
  }
  return joined;
}

}  // namespace

oar::trainer::SftConfig RunConfig::sft_config() const {
  auto config = sft;
  config.task = task;
  config.min_difficulty = min_difficulty;
  config.max_difficulty = max_difficulty;
  config.workers = workers;
  return config;
}

oar::trainer::TrainConfig RunConfig::train_config() const {
  auto config = train;
  config.task = task;
  config.min_difficulty = min_difficulty;
  config.max_difficulty = max_difficulty;
  config.workers = workers;
  config.rollout.workers = workers;
  config.credit.temperature = train.rollout.temperature;
  return config;
}

oar::trainer::EvalConfig RunConfig::eval_config() const {
  auto config = eval;
  config.task = task;
  config.min_difficulty = min_difficulty;
  config.max_difficulty = max_difficulty;
  config.workers = workers;
  config.format_weight = train.rollout.format_weight;
  return config;
}

void RunConfig::validate() const {
  model.validate();
  sft_config().validate();
  train_config().validate();
  oar::require(eval.tasks >= 1, "eval.tasks must be positive");
  oar::require(eval.samples >= 1, "eval.samples must be positive");
  oar::require(study.trajectories >= 1, "study.trajectories must be positive");
}

const std::vector<KeySpec>& config_schema() {
  static const std::vector<KeySpec> schema = build_schema();
  return schema;
}

void set_value(RunConfig& config, const std::string& key, const std::string& value) {
  const std::string error = try_set(config, key, value);
  if (!error.empty()) {
    throw ConfigError(error);
  }
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto equals = assignment.find('=');
  if (equals == std::string::npos) {
    throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
  }
  set_value(config, assignment.substr(0, equals), assignment.substr(equals + 1));
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& error) {
    throw ConfigError(origin + ": line " + std::to_string(error.line()) + ": " + error.message());
  }
  RunConfig config;
  std::vector<std::string> errors;
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty()) {
      errors.push_back("key '" + section + "' is outside any section");
      continue;
    }
    for (const auto& [name, value] : entries) {
      const std::string error = try_set(config, section + "." + name, value.get_value<std::string>());
      if (!error.empty()) {
        errors.push_back(error);
      }
    }
  }
  if (!errors.empty()) {
    throw ConfigError(origin + ": " + join_errors(errors));
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

std::string snapshot(const RunConfig& config) {
  std::ostringstream out;
  std::string current;
  for (const auto& spec : config_schema()) {
    const auto dot = spec.key.find('.');
    const std::string section = spec.key.substr(0, dot);
    if (section != current) {
      out << (current.empty() ? "" : "\n") << "[" << section << "]\n";
      current = section;
    }
    out << spec.key.substr(dot + 1) << " = " << spec.get(config) << "\n";
  }
  return out.str();
}

}  // namespace oarlab
