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

#include "oar/policy/policy.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "oar/common/error.hpp"
#include "oar/numerics/kernels.hpp"
#include "oar/numerics/ops.hpp"

namespace oar::policy {

namespace kernels = numerics::kernels;
using numerics::Shape;

namespace {

constexpr double kNormEps = 1e-6;
constexpr std::size_t kMlpExpansion = 4;

Tensor normal_tensor(Shape shape, double stddev, Rng& rng) {
  Tensor t(std::move(shape));
  std::normal_distribution<double> dist(0.0, stddev);
  for (auto& v : t.data()) {
    v = dist(rng);
  }
  return t;
}

// y = rms_norm(x) * gain, row by row, matching rms_norm() followed by mul_rows().
void norm_rows(std::span<const double> x, std::span<double> y, std::span<const double> gain, std::size_t rows,
               std::size_t d) {
  for (std::size_t r = 0; r < rows; ++r) {
    auto out = y.subspan(r * d, d);
    kernels::rms_norm_row(x.subspan(r * d, d), out, kNormEps);
    for (std::size_t j = 0; j < d; ++j) {
      out[j] = out[j] * gain[j];
    }
  }
}

}  // namespace

DecodeState DecodeState::prefix(std::size_t n, std::size_t d_model) const {
  require(n <= length, "DecodeState::prefix beyond cached length");
  DecodeState out;
  out.length = n;
  out.keys.reserve(keys.size());
  out.values.reserve(values.size());
  for (std::size_t b = 0; b < keys.size(); ++b) {
    out.keys.emplace_back(keys[b].begin(), keys[b].begin() + static_cast<std::ptrdiff_t>(n * d_model));
    out.values.emplace_back(values[b].begin(), values[b].begin() + static_cast<std::ptrdiff_t>(n * d_model));
  }
  return out;
}

Policy::Policy(PolicyConfig config, std::uint64_t init_seed) : config_(config) {
  config_.validate();
  initialize(init_seed);
  build_names();
  build_mask();
}

Policy::Policy(PolicyConfig config, std::vector<NamedTensor> parameters) : config_(config) {
  config_.validate();
  initialize(0);
  build_names();
  build_mask();
  std::map<std::string, Tensor> by_name;
  for (auto& p : parameters) {
    by_name.emplace(p.name, std::move(p.value));
  }
  require(by_name.size() == names_.size(), "parameter count mismatch: got " + std::to_string(by_name.size()) +
                                               ", expected " + std::to_string(names_.size()));
  auto params = this->parameters();
  for (std::size_t i = 0; i < names_.size(); ++i) {
    auto it = by_name.find(names_[i]);
    require(it != by_name.end(), "missing parameter " + names_[i]);
    require(it->second.shape() == params[i]->shape(), "parameter " + names_[i] + " has shape " +
                                                          numerics::to_string(it->second.shape()) + ", expected " +
                                                          numerics::to_string(params[i]->shape()));
    *params[i] = std::move(it->second);
  }
}

void Policy::initialize(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t d = config_.d_model;
  const std::size_t v = config_.vocab_size;
  const double std_base = 0.02;
  const double std_residual = 0.02 / std::sqrt(2.0 * static_cast<double>(config_.n_layers));
  tok_emb_ = normal_tensor({v, d}, std_base, rng);
  pos_emb_ = normal_tensor({config_.max_seq_len, d}, std_base, rng);
  blocks_.clear();
  for (std::size_t b = 0; b < config_.n_layers; ++b) {
    Block block;
    block.ln1 = Tensor({d}, 1.0);
    block.wq = normal_tensor({d, d}, std_base, rng);
    block.wk = normal_tensor({d, d}, std_base, rng);
    block.wv = normal_tensor({d, d}, std_base, rng);
    block.wo = normal_tensor({d, d}, std_residual, rng);
    block.ln2 = Tensor({d}, 1.0);
    block.w1 = normal_tensor({d, kMlpExpansion * d}, std_base, rng);
    block.w2 = normal_tensor({kMlpExpansion * d, d}, std_residual, rng);
    blocks_.push_back(std::move(block));
  }
  lnf_ = Tensor({d}, 1.0);
  w_out_ = normal_tensor({d, v}, std_base, rng);
}

void Policy::build_names() {
  names_ = {"tok_emb", "pos_emb"};
  for (std::size_t b = 0; b < config_.n_layers; ++b) {
    const std::string prefix = "block" + std::to_string(b) + ".";
    for (const char* leaf : {"ln1", "wq", "wk", "wv", "wo", "ln2", "w1", "w2"}) {
      names_.push_back(prefix + leaf);
    }
  }
  names_.push_back("lnf");
  names_.push_back("w_out");
}

void Policy::build_mask() {
  output_mask_.assign(config_.vocab_size, 1);
  output_mask_[config_.pad_id] = 0;
  output_mask_[config_.bos_id] = 0;
}

std::vector<Tensor*> Policy::parameters() {
  std::vector<Tensor*> out = {&tok_emb_, &pos_emb_};
  for (auto& b : blocks_) {
    for (Tensor* t : {&b.ln1, &b.wq, &b.wk, &b.wv, &b.wo, &b.ln2, &b.w1, &b.w2}) {
      out.push_back(t);
    }
  }
  out.push_back(&lnf_);
  out.push_back(&w_out_);
  return out;
}

std::vector<const Tensor*> Policy::parameters() const {
  auto mutable_params = const_cast<Policy*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

std::size_t Policy::parameter_count() const {
  std::size_t total = 0;
  for (const auto* p : parameters()) {
    total += p->size();
  }
  return total;
}

void Policy::validate_sequence(std::span<const TokenId> ids) const {
  require(!ids.empty(), "empty token sequence");
  require(ids.size() <= config_.max_seq_len, "sequence length " + std::to_string(ids.size()) +
                                                 " exceeds max_seq_len " + std::to_string(config_.max_seq_len));
  for (const auto id : ids) {
    require(id < config_.vocab_size, "unknown token id " + std::to_string(id));
  }
}

TokenDistribution Policy::distribution(std::span<const double> logits_row, double temperature) const {
  if (temperature == 1.0) {
    return TokenDistribution::from_logits(logits_row, output_mask_);
  }
  require(temperature > 0.0, "temperature must be positive");
  const double inv = 1.0 / temperature;
  std::vector<double> scaled(logits_row.begin(), logits_row.end());
  for (auto& v : scaled) {
    v = v * inv;
  }
  return TokenDistribution::from_logits(scaled, output_mask_);
}

SequenceEmbeddings Policy::token_embeddings(std::span<const TokenId> ids) const {
  validate_sequence(ids);
  const std::size_t d = config_.d_model;
  Tensor rows({ids.size(), d});
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const auto src = tok_emb_.row(ids[t]);
    std::copy(src.begin(), src.end(), rows.row(t).begin());
  }
  return {std::move(rows)};
}

ForwardResult Policy::forward(Graph& graph, std::span<const TokenId> ids, const ForwardOptions& options) const {
  using namespace numerics;
  validate_sequence(ids);
  const std::size_t len = ids.size();
  const std::size_t d = config_.d_model;
  const std::size_t hd = config_.head_dim();

  ForwardResult result;
  for (const auto* p : parameters()) {
    result.parameters.push_back(options.parameters_require_grad ? graph.leaf(*p) : graph.constant(*p));
  }
  std::size_t next = 0;
  const Var tok_emb = result.parameters[next++];
  const Var pos_emb = result.parameters[next++];

  std::vector<std::size_t> index(ids.begin(), ids.end());
  Var emb;
  if (options.embedding_override != nullptr) {
    const auto& rows = options.embedding_override->rows;
    require(rows.rank() == 2 && rows.dim(0) == len && rows.dim(1) == d,
            "embedding override must have shape [" + std::to_string(len) + "," + std::to_string(d) + "]");
    emb = options.embeddings_require_grad ? graph.leaf(rows) : graph.constant(rows);
  } else if (options.embeddings_require_grad) {
    emb = graph.leaf(token_embeddings(ids).rows);
  } else {
    emb = gather_rows(tok_emb, index);
  }
  result.embeddings = emb;

  result.noise = Tensor({len, d});
  Var tokens = emb;
  if (options.noise_sigma > 0.0) {
    require(options.rng != nullptr, "embedding noise requires a generator");
    require(options.noise_mask.empty() || options.noise_mask.size() == len, "noise mask length mismatch");
    std::normal_distribution<double> normal(0.0, options.noise_sigma);
    for (std::size_t t = 0; t < len; ++t) {
      const bool noisy = options.noise_mask.empty() ? t >= options.response_start : options.noise_mask[t];
      if (!noisy) {
        continue;
      }
      for (auto& v : result.noise.row(t)) {
        v = normal(*options.rng);
      }
    }
    tokens = add(emb, graph.constant(result.noise));
  } else {
    require(options.noise_sigma == 0.0, "noise sigma must be non-negative");
  }

  std::vector<std::size_t> positions(len);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  Var x = add(tokens, gather_rows(pos_emb, positions));

  const double attn_scale = 1.0 / std::sqrt(static_cast<double>(hd));
  for (std::size_t b = 0; b < config_.n_layers; ++b) {
    const Var ln1 = result.parameters[next++];
    const Var wq = result.parameters[next++];
    const Var wk = result.parameters[next++];
    const Var wv = result.parameters[next++];
    const Var wo = result.parameters[next++];
    const Var ln2 = result.parameters[next++];
    const Var w1 = result.parameters[next++];
    const Var w2 = result.parameters[next++];

    const Var h = mul_rows(rms_norm(x, kNormEps), ln1);
    const Var q = matmul(h, wq);
    const Var k = matmul(h, wk);
    const Var v = matmul(h, wv);
    std::vector<Var> heads;
    for (std::size_t head = 0; head < config_.n_heads; ++head) {
      const Var qh = slice_cols(q, head * hd, hd);
      const Var kh = slice_cols(k, head * hd, hd);
      const Var vh = slice_cols(v, head * hd, hd);
      const Var probs = causal_softmax(scale(matmul_nt(qh, kh), attn_scale));
      heads.push_back(matmul(probs, vh));
    }
    x = add(x, matmul(concat_cols(heads), wo));
    const Var h2 = mul_rows(rms_norm(x, kNormEps), ln2);
    x = add(x, matmul(gelu(matmul(h2, w1)), w2));
  }
  const Var lnf = result.parameters[next++];
  const Var w_out = result.parameters[next++];
  if (!options.logit_rows.empty()) {
    x = select_rows(x, options.logit_rows);
  }
  result.logits = matmul(mul_rows(rms_norm(x, kNormEps), lnf), w_out);
  return result;
}

void Policy::advance(std::span<Lane> lanes) const {
  const std::size_t d = config_.d_model;
  const std::size_t vocab = config_.vocab_size;
  const std::size_t hd = config_.head_dim();
  const std::size_t hidden = kMlpExpansion * d;
  const double attn_scale = 1.0 / std::sqrt(static_cast<double>(hd));

  std::size_t total = 0;
  std::vector<std::size_t> offset;
  for (auto& lane : lanes) {
    require(lane.state != nullptr, "lane without decode state");
    auto& st = *lane.state;
    if (st.keys.empty()) {
      st.keys.resize(config_.n_layers);
      st.values.resize(config_.n_layers);
    }
    require(st.length + lane.tokens.size() <= config_.max_seq_len,
            "sequence length " + std::to_string(st.length + lane.tokens.size()) + " exceeds max_seq_len " +
                std::to_string(config_.max_seq_len));
    for (const auto id : lane.tokens) {
      require(id < vocab, "unknown token id " + std::to_string(id));
    }
    offset.push_back(total);
    total += lane.tokens.size();
  }
  if (total == 0) {
    return;
  }

  std::vector<double> x(total * d);
  for (std::size_t l = 0; l < lanes.size(); ++l) {
    for (std::size_t i = 0; i < lanes[l].tokens.size(); ++i) {
      const auto tok = tok_emb_.row(lanes[l].tokens[i]);
      const auto pos = pos_emb_.row(lanes[l].state->length + i);
      double* row = x.data() + (offset[l] + i) * d;
      for (std::size_t j = 0; j < d; ++j) {
        row[j] = tok[j] + pos[j];
      }
    }
  }

  std::vector<double> h(total * d), q(total * d), k(total * d), v(total * d), att(total * d), proj(total * d);
  std::vector<double> up(total * hidden);
  std::vector<double> scores(config_.max_seq_len), probs(config_.max_seq_len);
  for (std::size_t b = 0; b < config_.n_layers; ++b) {
    const Block& blk = blocks_[b];
    norm_rows(x, h, blk.ln1.data(), total, d);
    kernels::matmul(h, blk.wq.data(), q, total, d, d);
    kernels::matmul(h, blk.wk.data(), k, total, d, d);
    kernels::matmul(h, blk.wv.data(), v, total, d, d);
    for (std::size_t l = 0; l < lanes.size(); ++l) {
      auto& st = *lanes[l].state;
      const std::size_t n = lanes[l].tokens.size();
      const auto first = static_cast<std::ptrdiff_t>(offset[l] * d);
      const auto last = static_cast<std::ptrdiff_t>((offset[l] + n) * d);
      st.keys[b].insert(st.keys[b].end(), k.begin() + first, k.begin() + last);
      st.values[b].insert(st.values[b].end(), v.begin() + first, v.begin() + last);
    }
    for (std::size_t l = 0; l < lanes.size(); ++l) {
      const auto& st = *lanes[l].state;
      const auto& keys = st.keys[b];
      const auto& values = st.values[b];
      for (std::size_t i = 0; i < lanes[l].tokens.size(); ++i) {
        const std::size_t r = offset[l] + i;
        const std::size_t p = st.length + i;
        for (std::size_t head = 0; head < config_.n_heads; ++head) {
          const std::size_t c0 = head * hd;
          const std::span<const double> query(q.data() + r * d + c0, hd);
          for (std::size_t j = 0; j <= p; ++j) {
            scores[j] = kernels::dot(query, std::span<const double>(keys.data() + j * d + c0, hd)) * attn_scale;
          }
          kernels::prefix_softmax_row(scores, p + 1, std::span<double>(probs.data(), p + 1));
          double* out = att.data() + r * d + c0;
          std::fill(out, out + hd, 0.0);
          for (std::size_t j = 0; j <= p; ++j) {
            const double weight = probs[j];
            const double* val = values.data() + j * d + c0;
            for (std::size_t c = 0; c < hd; ++c) {
              out[c] += weight * val[c];
            }
          }
        }
      }
    }
    kernels::matmul(att, blk.wo.data(), proj, total, d, d);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = x[i] + proj[i];
    }
    norm_rows(x, h, blk.ln2.data(), total, d);
    kernels::matmul(h, blk.w1.data(), up, total, d, hidden);
    for (auto& u : up) {
      u = kernels::gelu(u);
    }
    kernels::matmul(up, blk.w2.data(), proj, total, hidden, d);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = x[i] + proj[i];
    }
  }

  std::vector<double> y(d);
  for (std::size_t l = 0; l < lanes.size(); ++l) {
    auto& lane = lanes[l];
    lane.logits.assign(lane.logit_rows.size() * vocab, 0.0);
    for (std::size_t w = 0; w < lane.logit_rows.size(); ++w) {
      const std::size_t i = lane.logit_rows[w];
      require(i < lane.tokens.size(), "logit row out of range");
      norm_rows(std::span<const double>(x.data() + (offset[l] + i) * d, d), y, lnf_.data(), 1, d);
      kernels::matmul(y, w_out_.data(), std::span<double>(lane.logits.data() + w * vocab, vocab), 1, d, vocab);
    }
    lane.state->length += lane.tokens.size();
  }
}

Tensor Policy::logits(std::span<const TokenId> ids) const {
  validate_sequence(ids);
  DecodeState state;
  Lane lane;
  lane.state = &state;
  lane.tokens = ids;
  lane.logit_rows.resize(ids.size());
  std::iota(lane.logit_rows.begin(), lane.logit_rows.end(), std::size_t{0});
  advance(std::span<Lane>(&lane, 1));
  return Tensor({ids.size(), config_.vocab_size}, std::move(lane.logits));
}

std::vector<TokenId> join(std::span<const TokenId> prompt, std::span<const TokenId> response) {
  std::vector<TokenId> out(prompt.begin(), prompt.end());
  out.insert(out.end(), response.begin(), response.end());
  return out;
}

void continue_generation(const Policy& policy, DecodeState& state, std::vector<double> next_logits, double temperature,
                         std::size_t max_new, DecodeMode mode, Rng* rng, Generation& out) {
  const auto& cfg = policy.config();
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (std::size_t n = 0; n < max_new && state.length < cfg.max_seq_len; ++n) {
    const TokenDistribution dist = policy.distribution(next_logits, temperature);
    std::size_t token = 0;
    if (mode == DecodeMode::kGreedy) {
      token = dist.argmax();
    } else {
      require(rng != nullptr, "stochastic decoding requires a generator");
      const double u = uniform(*rng);
      double cumulative = 0.0;
      token = dist.argmax();
      for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist.probs[i] <= 0.0) {
          continue;
        }
        cumulative += dist.probs[i];
        token = i;
        if (u < cumulative) {
          break;
        }
      }
    }
    out.tokens.push_back(static_cast<TokenId>(token));
    out.log_probs.push_back(dist.log_probs[token]);
    out.entropy.push_back(dist.entropy());
    if (token == cfg.eos_id || n + 1 == max_new || state.length + 1 >= cfg.max_seq_len) {
      break;
    }
    const TokenId fed = static_cast<TokenId>(token);
    Lane lane;
    lane.state = &state;
    lane.tokens = std::span<const TokenId>(&fed, 1);
    lane.logit_rows = {0};
    policy.advance(std::span<Lane>(&lane, 1));
    next_logits = std::move(lane.logits);
  }
}

Generation sample(const Policy& policy, std::span<const TokenId> prompt, double temperature, std::size_t max_new,
                  DecodeMode mode, Rng& rng) {
  require(mode == DecodeMode::kGreedy || temperature > 0.0, "temperature must be positive for stochastic sampling");
  policy.validate_sequence(prompt);
  DecodeState state;
  Lane lane;
  lane.state = &state;
  lane.tokens = prompt;
  lane.logit_rows = {prompt.size() - 1};
  policy.advance(std::span<Lane>(&lane, 1));
  Generation out;
  continue_generation(policy, state, std::move(lane.logits), mode == DecodeMode::kGreedy ? 1.0 : temperature, max_new,
                      mode, &rng, out);
  return out;
}

TokenStats logprobs_entropy(const Policy& policy, std::span<const TokenId> prompt, std::span<const TokenId> response,
                            double temperature) {
  require(!prompt.empty(), "logprobs_entropy needs a non-empty prompt");
  const auto full = join(prompt, response);
  const Tensor logits = policy.logits(full);
  TokenStats stats;
  for (std::size_t t = 0; t < response.size(); ++t) {
    const auto dist = policy.distribution(logits.row(prompt.size() + t - 1), temperature);
    stats.log_probs.push_back(dist.log_probs[response[t]]);
    stats.entropy.push_back(dist.entropy());
  }
  return stats;
}

}  // namespace oar::policy
