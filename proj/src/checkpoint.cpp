// Copyright 2026 The Tempo Authors
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

#include "tempo/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <unordered_set>

#include "tempo/io.hpp"

namespace tempo {

namespace {

constexpr std::string_view kMagic = "TEMPOCK1";

static_assert(std::endian::native == std::endian::little, "checkpoint codec assumes a little-endian host");

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view b) : bytes_(b) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string_view take(std::uint64_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) throw ParseError("checkpoint truncated at byte " + std::to_string(pos_));
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const Tensor& Checkpoint::at(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t;
  throw ParseError("checkpoint has no tensor '" + name + "'");
}

bool Checkpoint::contains(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return true;
  return false;
}

std::string encode_checkpoint(const Checkpoint& ck) {
  std::string out(kMagic);
  const std::string meta = ck.meta.dump();
  put<std::uint64_t>(out, meta.size());
  out += meta;
  put<std::uint64_t>(out, ck.tensors.size());
  for (const auto& t : ck.tensors) {
    if (t.data.size() != t.rows * t.cols) throw ContractError("tensor '" + t.name + "' data does not match its shape");
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out += t.name;
    put<std::uint64_t>(out, t.rows);
    put<std::uint64_t>(out, t.cols);
    out.append(reinterpret_cast<const char*>(t.data.data()), t.data.size() * sizeof(double));
  }
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(kMagic.size()) != kMagic) throw ParseError("not a checkpoint file (bad magic)");
  Checkpoint ck;
  const auto meta_len = r.get<std::uint64_t>();
  try {
    ck.meta = nlohmann::json::parse(r.take(meta_len));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint metadata: ") + e.what());
  }
  const auto count = r.get<std::uint64_t>();
  std::unordered_set<std::string> seen;
  for (std::uint64_t k = 0; k < count; ++k) {
    Tensor t;
    const auto name_len = r.get<std::uint32_t>();
    t.name = std::string(r.take(name_len));
    if (!seen.insert(t.name).second) throw ParseError("checkpoint repeats tensor '" + t.name + "'");
    t.rows = r.get<std::uint64_t>();
    t.cols = r.get<std::uint64_t>();
    if (t.cols != 0 && t.rows > (bytes.size() / sizeof(double)) / t.cols)
      throw ParseError("checkpoint tensor '" + t.name + "' shape exceeds file size");
    const auto raw = r.take(t.rows * t.cols * sizeof(double));
    t.data.resize(t.rows * t.cols);
    std::memcpy(t.data.data(), raw.data(), raw.size());
    ck.tensors.push_back(std::move(t));
  }
  if (!r.done()) throw ParseError("checkpoint has trailing bytes");
  return ck;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  write_file(path.string(), encode_checkpoint(ck));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path.string())); }

}  // namespace tempo
