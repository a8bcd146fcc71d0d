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

#ifndef OAR_POLICY_POLICY_HPP
#define OAR_POLICY_POLICY_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "oar/common/rng.hpp"
#include "oar/numerics/graph.hpp"
#include "oar/numerics/tensor.hpp"
#include "oar/policy/config.hpp"
#include "oar/policy/distribution.hpp"

namespace oar::policy {

using numerics::Graph;
using numerics::Tensor;
using numerics::Var;

/// Per-position token embedding rows e_1..e_T, shape [T, d_model].
struct SequenceEmbeddings {
  Tensor rows;
};

struct NamedTensor {
  std::string name;
  Tensor value;
};

struct ForwardOptions {
  /// Replaces the token-embedding rows (positional embeddings are still added).
  const SequenceEmbeddings* embedding_override = nullptr;
  /// Standard deviation of isotropic Gaussian noise added to token embeddings.
  double noise_sigma = 0.0;
  /// Positions that receive noise; when empty, every position >= response_start.
  std::vector<bool> noise_mask;
  std::size_t response_start = 0;
  /// Generator for the noise draw; required when noise_sigma > 0.
  Rng* rng = nullptr;
  /// Register the token-embedding rows as a differentiable leaf.
  bool embeddings_require_grad = false;
  /// Register parameters as differentiable leaves (otherwise constants).
  bool parameters_require_grad = true;
  /// Rows of the sequence for which logits are produced; empty means all.
  std::vector<std::size_t> logit_rows;
};

struct ForwardResult {
  /// [rows, vocab] next-token logits.
  Var logits;
  /// [T, d_model] token-embedding rows before noise.
  Var embeddings;
  /// Noise that was added, [T, d_model] (zeros where no noise was applied).
  Tensor noise;
  /// One leaf per parameter, in parameter order.
  std::vector<Var> parameters;
};

/// Key/value cache of one sequence for incremental inference.
struct DecodeState {
  std::vector<std::vector<double>> keys;
  std::vector<std::vector<double>> values;
  std::size_t length = 0;

  /// Copy of the cache truncated to the first `n` positions.
  [[nodiscard]] DecodeState prefix(std::size_t n, std::size_t d_model) const;
};

/// One sequence's share of a batched incremental forward.
struct Lane {
  DecodeState* state = nullptr;
  std::span<const TokenId> tokens;
  /// Indices into `tokens` whose next-token logits are wanted.
  std::vector<std::size_t> logit_rows;
  /// Receives logit_rows.size() x vocab logits.
  std::vector<double> logits;
};

/// Tiny pre-norm decoder-only transformer with learned absolute positions.
class Policy {
 public:
  Policy(PolicyConfig config, std::uint64_t init_seed);
  /// Builds a policy from named parameters (e.g. read from a checkpoint).
  Policy(PolicyConfig config, std::vector<NamedTensor> parameters);

  [[nodiscard]] const PolicyConfig& config() const noexcept { return config_; }
  [[nodiscard]] const std::vector<std::string>& parameter_names() const noexcept { return names_; }
  [[nodiscard]] std::vector<Tensor*> parameters();
  [[nodiscard]] std::vector<const Tensor*> parameters() const;
  [[nodiscard]] std::size_t parameter_count() const;

  /// Output mask used for every policy distribution: PAD and BOS are never produced.
  [[nodiscard]] std::span<const std::uint8_t> output_mask() const noexcept { return output_mask_; }

  /// Throws ContractViolation for unknown ids or overlong sequences.
  void validate_sequence(std::span<const TokenId> ids) const;

  /// Differentiable forward over a full sequence starting at position 0.
  ForwardResult forward(Graph& graph, std::span<const TokenId> ids, const ForwardOptions& options = {}) const;

  /// Cache-based forward of several lanes at once. Results are bit-identical to
  /// forward() and to advancing each lane alone.
  void advance(std::span<Lane> lanes) const;

  /// Next-token logits for every position, [T, vocab], without a graph.
  [[nodiscard]] Tensor logits(std::span<const TokenId> ids) const;

  /// Token-embedding rows for `ids`, [T, d_model].
  [[nodiscard]] SequenceEmbeddings token_embeddings(std::span<const TokenId> ids) const;

  [[nodiscard]] TokenDistribution distribution(std::span<const double> logits_row, double temperature = 1.0) const;

 private:
  struct Block {
    Tensor ln1, wq, wk, wv, wo, ln2, w1, w2;
  };

  void initialize(std::uint64_t seed);
  void build_names();
  void build_mask();

  PolicyConfig config_;
  Tensor tok_emb_;
  Tensor pos_emb_;
  std::vector<Block> blocks_;
  Tensor lnf_;
  Tensor w_out_;
  std::vector<std::string> names_;
  std::vector<std::uint8_t> output_mask_;
};

enum class DecodeMode { kStochastic, kGreedy };

struct Generation {
  std::vector<TokenId> tokens;
  /// Log-probability of each generated token under the temperature-scaled policy.
  std::vector<double> log_probs;
  /// Entropy of the temperature-scaled policy at each generated position.
  std::vector<double> entropy;
};

/// Samples a continuation of `prompt` until EOS or `max_new` tokens.
Generation sample(const Policy& policy, std::span<const TokenId> prompt, double temperature, std::size_t max_new,
                  DecodeMode mode, Rng& rng);

/// Continues from a cache whose next-token logits are `next_logits`. Appends up
/// to `max_new` tokens (stopping after EOS) to `out`.
void continue_generation(const Policy& policy, DecodeState& state, std::vector<double> next_logits, double temperature,
                         std::size_t max_new, DecodeMode mode, Rng* rng, Generation& out);

struct TokenStats {
  /// log pi(y_t | x, y_<t) for each response token.
  std::vector<double> log_probs;
  /// Entropy of the policy at each response position.
  std::vector<double> entropy;
};

TokenStats logprobs_entropy(const Policy& policy, std::span<const TokenId> prompt, std::span<const TokenId> response,
                            double temperature = 1.0);

/// Concatenation helper.
std::vector<TokenId> join(std::span<const TokenId> prompt, std::span<const TokenId> response);

}  // namespace oar::policy

#endif  // OAR_POLICY_POLICY_HPP
