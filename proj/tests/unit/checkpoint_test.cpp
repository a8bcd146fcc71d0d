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


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include <unistd.h>

#include "oar/common/error.hpp"
#include "oar/policy/checkpoint.hpp"
#include "test_support.hpp"

namespace oar::policy {
namespace {

namespace fs = std::filesystem;

class CheckpointTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("oarlab_ckpt_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::vector<char> read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }
  void write_bytes(const fs::path& path, const std::vector<char>& bytes) {
    std::ofstream(path, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }

  fs::path dir_;
};

TEST_F(CheckpointTest, RoundTripIsBitExact) {
  const Policy original = testing::random_policy(12);
  save_checkpoint(original, dir_ / "a.ckpt");
  const Policy loaded = load_checkpoint(dir_ / "a.ckpt");
  EXPECT_EQ(loaded.config(), original.config());
  EXPECT_EQ(loaded.parameter_names(), original.parameter_names());
  const auto pa = original.parameters();
  const auto pb = loaded.parameters();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    ASSERT_EQ(pa[i]->shape(), pb[i]->shape());
    for (std::size_t k = 0; k < pa[i]->size(); ++k) {
      ASSERT_EQ((*pa[i])[k], (*pb[i])[k]);
    }
  }
  save_checkpoint(loaded, dir_ / "b.ckpt");
  EXPECT_EQ(read_bytes(dir_ / "a.ckpt"), read_bytes(dir_ / "b.ckpt"));
}

TEST_F(CheckpointTest, CorruptFilesAreRejected) {
  save_checkpoint(testing::random_policy(13, 8, 1, 8), dir_ / "good.ckpt");
  const auto bytes = read_bytes(dir_ / "good.ckpt");

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  write_bytes(dir_ / "magic.ckpt", bad_magic);
  EXPECT_THROW(load_checkpoint(dir_ / "magic.ckpt"), FormatError);

  auto bad_version = bytes;
  bad_version[8] = 99;
  write_bytes(dir_ / "version.ckpt", bad_version);
  EXPECT_THROW(load_checkpoint(dir_ / "version.ckpt"), FormatError);

  write_bytes(dir_ / "short.ckpt", std::vector<char>(bytes.begin(), bytes.begin() + bytes.size() / 2));
  EXPECT_THROW(load_checkpoint(dir_ / "short.ckpt"), FormatError);

  auto flipped = bytes;
  flipped[bytes.size() - 12] ^= 0x01;
  write_bytes(dir_ / "flipped.ckpt", flipped);
  EXPECT_THROW(load_checkpoint(dir_ / "flipped.ckpt"), FormatError);

  auto trailing = bytes;
  trailing.push_back('!');
  write_bytes(dir_ / "trailing.ckpt", trailing);
  EXPECT_THROW(load_checkpoint(dir_ / "trailing.ckpt"), FormatError);

  EXPECT_THROW(load_checkpoint(dir_ / "missing.ckpt"), Error);
}

}  // namespace
}  // namespace oar::policy
