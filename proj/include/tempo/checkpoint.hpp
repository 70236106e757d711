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

#pragma once

// Flat named-tensor container: an 8-byte magic, a JSON metadata block and a
// list of float64 tensors with shape headers. All integers little-endian.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tempo/errors.hpp"
#include "tempo/nn.hpp"

namespace tempo {

struct Tensor {
  std::string name;
  std::uint64_t rows = 0, cols = 0;
  std::vector<double> data;  // row-major
};

struct Checkpoint {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<Tensor> tensors;

  const Tensor& at(const std::string& name) const;
  bool contains(const std::string& name) const;
};

std::string encode_checkpoint(const Checkpoint& ck);
Checkpoint decode_checkpoint(std::string_view bytes);
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::filesystem::path& path);

template <typename Scalar>
Tensor to_tensor(const std::string& name, const Mat<Scalar>& m) {
  Tensor t{name, static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols()), {}};
  t.data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) t.data.push_back(static_cast<double>(m(i, j)));
  return t;
}

template <typename Scalar>
void from_tensor(const Tensor& t, Mat<Scalar>& m) {
  if (t.rows != static_cast<std::uint64_t>(m.rows()) || t.cols != static_cast<std::uint64_t>(m.cols()))
    throw ParseError("checkpoint tensor '" + t.name + "' has shape " + std::to_string(t.rows) + "x" +
                     std::to_string(t.cols) + ", expected " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = static_cast<Scalar>(t.data[k++]);
}

template <typename Scalar>
void export_params(const ParamList<Scalar>& params, Checkpoint& ck) {
  for (const auto& p : params) ck.tensors.push_back(to_tensor(p.name, p.param->value));
}

/// Every parameter must be present with a matching shape.
template <typename Scalar>
void import_params(const Checkpoint& ck, const ParamList<Scalar>& params) {
  for (const auto& p : params) from_tensor(ck.at(p.name), p.param->value);
}

}  // namespace tempo
