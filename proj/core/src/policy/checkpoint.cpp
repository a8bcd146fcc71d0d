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

#include "oar/policy/checkpoint.hpp"

#include <zlib.h>

#include <array>
#include <bit>
#include <fstream>

#include "oar/common/error.hpp"

namespace oar::policy {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

constexpr std::array<char, 8> kMagic = {'O', 'A', 'R', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kMaxNameLength = 4096;
constexpr std::uint32_t kMaxRank = 8;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <typename T>
  void put(T value) {
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }
  void bytes(const void* data, std::size_t count) { out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(count)); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}
  template <typename T>
  T get(const char* what) {
    T value{};
    bytes(&value, sizeof(T), what);
    return value;
  }
  void bytes(void* data, std::size_t count, const char* what) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in_.gcount()) != count) {
      throw FormatError(source_ + ": truncated checkpoint while reading " + what);
    }
  }
  [[nodiscard]] const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
};

std::uint32_t payload_crc(std::span<const double> data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size_bytes()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void save_checkpoint(const Policy& policy, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot open checkpoint for writing: " + path.string());
  }
  Writer w(out);
  w.bytes(kMagic.data(), kMagic.size());
  w.put<std::uint32_t>(kCheckpointVersion);
  const auto& cfg = policy.config();
  for (const std::size_t field : {cfg.vocab_size, cfg.d_model, cfg.n_layers, cfg.n_heads, cfg.max_seq_len}) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(field));
  }
  w.put<std::uint32_t>(cfg.pad_id);
  w.put<std::uint32_t>(cfg.bos_id);
  w.put<std::uint32_t>(cfg.eos_id);
  const auto params = policy.parameters();
  const auto& names = policy.parameter_names();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& name = names[i];
    const auto& tensor = *params[i];
    w.put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(tensor.rank()));
    for (const auto dim : tensor.shape()) {
      w.put<std::uint64_t>(dim);
    }
    w.put<std::uint64_t>(tensor.size());
    w.bytes(tensor.data().data(), tensor.data().size_bytes());
    w.put<std::uint32_t>(payload_crc(tensor.data()));
  }
  out.flush();
  if (!out) {
    throw Error("failed writing checkpoint: " + path.string());
  }
}

Policy load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open checkpoint: " + path.string());
  }
  Reader r(in, path.string());
  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size(), "magic");
  if (magic != kMagic) {
    throw FormatError(r.source() + ": not an oarlab checkpoint (bad magic)");
  }
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw FormatError(r.source() + ": unsupported checkpoint version " + std::to_string(version));
  }
  PolicyConfig cfg;
  cfg.vocab_size = r.get<std::uint32_t>("vocab_size");
  cfg.d_model = r.get<std::uint32_t>("d_model");
  cfg.n_layers = r.get<std::uint32_t>("n_layers");
  cfg.n_heads = r.get<std::uint32_t>("n_heads");
  cfg.max_seq_len = r.get<std::uint32_t>("max_seq_len");
  cfg.pad_id = r.get<std::uint32_t>("pad_id");
  cfg.bos_id = r.get<std::uint32_t>("bos_id");
  cfg.eos_id = r.get<std::uint32_t>("eos_id");
  try {
    cfg.validate();
  } catch (const ContractViolation& e) {
    throw FormatError(r.source() + ": invalid config header: " + e.what());
  }
  const auto count = r.get<std::uint32_t>("tensor count");
  std::vector<NamedTensor> tensors;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_length = r.get<std::uint32_t>("name length");
    if (name_length == 0 || name_length > kMaxNameLength) {
      throw FormatError(r.source() + ": invalid tensor name length " + std::to_string(name_length));
    }
    std::string name(name_length, '\0');
    r.bytes(name.data(), name.size(), "tensor name");
    const auto rank = r.get<std::uint32_t>("tensor rank");
    if (rank == 0 || rank > kMaxRank) {
      throw FormatError(r.source() + ": tensor " + name + " has invalid rank " + std::to_string(rank));
    }
    numerics::Shape shape;
    for (std::uint32_t d = 0; d < rank; ++d) {
      shape.push_back(static_cast<std::size_t>(r.get<std::uint64_t>("tensor dimension")));
    }
    const auto elements = r.get<std::uint64_t>("element count");
    if (elements != numerics::element_count(shape)) {
      throw FormatError(r.source() + ": tensor " + name + " element count does not match its shape");
    }
    std::vector<double> data(elements);
    r.bytes(data.data(), elements * sizeof(double), "tensor payload");
    const auto stored_crc = r.get<std::uint32_t>("tensor checksum");
    if (stored_crc != payload_crc(data)) {
      throw FormatError(r.source() + ": checksum mismatch in tensor " + name);
    }
    tensors.push_back({std::move(name), Tensor(std::move(shape), std::move(data))});
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError(r.source() + ": trailing bytes after last tensor");
  }
  try {
    return Policy(cfg, std::move(tensors));
  } catch (const ContractViolation& e) {
    throw FormatError(r.source() + ": " + e.what());
  }
}

}  // namespace oar::policy
