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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tempo {

struct NormalizeOptions {
  // CJK Unified Ideographs Extension A and the compatibility block.
  bool include_cjk_extensions = false;
};

/// Normalized text on the canonical axis. Indices are code-point positions.
struct NormalizedText {
  std::u32string text;
  /// raw_to_norm[i] is the number of retained code points before raw code
  /// point i; the map has one extra trailing entry equal to text.size().
  std::vector<std::size_t> raw_to_norm;
  /// retained[i] is true when raw code point i was kept.
  std::vector<bool> retained;
};

/// Lowercases ASCII letters and keeps only ASCII letters, digits and CJK
/// ideographs. Invalid UTF-8 bytes are dropped.
NormalizedText normalize_text(std::string_view raw_utf8, const NormalizeOptions& opts = {});

std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

bool is_cjk_ideograph(char32_t c, bool include_extensions);

}  // namespace tempo
