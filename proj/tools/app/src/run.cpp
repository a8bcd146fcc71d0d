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


#include "oarlab/run.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include "oar/attribution/probe.hpp"

#ifndef OARLAB_CODE_HASH
#define OARLAB_CODE_HASH "unknown"
#endif

namespace oarlab {
namespace fs = std::filesystem;

std::string code_hash() { return OARLAB_CODE_HASH; }

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw oar::Error("cannot read " + path.string() + " for checksumming");
  }
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> context(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(context.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buffer{};
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    EVP_DigestUpdate(context.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(context.get(), digest.data(), &length);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

fs::path run_root() {
  const char* root = std::getenv(kRunRootVariable);
  return root != nullptr && *root != '\0' ? fs::path(root) : fs::path("runs");
}

std::string run_name(const RunConfig& config, const std::string& command) {
  std::ostringstream name;
  name << config.name << "-" << command;
  if (command == "pretrain") {
    name << "-s" << config.init_seed;
  } else if (command == "train") {
    const auto& credit = config.train.credit;
    name << "-" << to_string(credit.method);
    if (credit.method == oar::trainer::CreditMethod::kOarP || credit.method == oar::trainer::CreditMethod::kOarG) {
      name << "-tau" << credit.gating.tau << "-beta" << credit.gating.beta << "-"
           << to_string(credit.attribution.probe.kind);
    }
    if (credit.force_degenerate) {
      name << "-degenerate";
    }
    name << "-s" << config.train.seed;
  }
  return name.str();
}

RunDirectory::RunDirectory(fs::path root, std::string command, const RunConfig* config)
    : path_(std::move(root)), command_(std::move(command)) {
  if (config != nullptr) {
    config_ = *config;
  }
  if (fs::exists(path_)) {
    fs::remove_all(path_);
  }
  fs::create_directories(checkpoints());
  fs::create_directories(logs());
  fs::create_directories(reports());
  if (config_) {
    std::ofstream(path_ / "config.ini") << snapshot(*config_);
  }
}

void RunDirectory::add_input(const std::string& role, const fs::path& path) {
  inputs_.push_back({{"role", role}, {"path", fs::absolute(path).lexically_normal().string()},
                     {"sha256", sha256_file(path)}});
}

void RunDirectory::finalize() const {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(path_)) {
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json") {
      files.push_back(fs::relative(entry.path(), path_));
    }
  }
  std::sort(files.begin(), files.end());
  nlohmann::ordered_json inventory = nlohmann::ordered_json::array();
  for (const auto& file : files) {
    inventory.push_back({{"path", file.generic_string()},
                         {"bytes", fs::file_size(path_ / file)},
                         {"sha256", sha256_file(path_ / file)}});
  }
  nlohmann::ordered_json manifest;
  manifest["command"] = command_;
  manifest["code_hash"] = code_hash();
  if (config_) {
    manifest["config"] = "config.ini";
    manifest["seeds"] = {{"init_seed", config_->init_seed},
                         {"sft_task_seed", config_->sft.task_seed},
                         {"train_seed", config_->train.seed},
                         {"train_task_seed", config_->train.task_seed},
                         {"eval_seed", config_->eval.seed},
                         {"eval_task_seed", config_->eval.task_seed},
                         {"study_seed", config_->study.seed},
                         {"study_task_seed", config_->study.task_seed}};
  } else {
    manifest["config"] = nullptr;
    manifest["seeds"] = nullptr;
  }
  manifest["inputs"] = inputs_;
  manifest["files"] = inventory;
  std::ofstream(path_ / "manifest.json") << manifest.dump(2) << "\n";
}

nlohmann::json read_manifest(const fs::path& run_directory) {
  std::ifstream in(run_directory / "manifest.json");
  if (!in) {
    throw oar::Error("no manifest.json in " + run_directory.string());
  }
  return nlohmann::json::parse(in);
}

fs::path resolve_checkpoint(const fs::path& path, const std::string& preferred) {
  if (fs::is_regular_file(path)) {
    return path;
  }
  if (fs::is_directory(path)) {
    for (const auto& name : {preferred, std::string("final.ckpt"), std::string("warmstart.ckpt")}) {
      const auto candidate = path / "checkpoints" / name;
      if (fs::is_regular_file(candidate)) {
        return candidate;
      }
    }
  }
  throw oar::Error("checkpoint not found: " + path.string());
}

}  // namespace oarlab
