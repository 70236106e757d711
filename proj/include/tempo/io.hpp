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

#include <string>
#include <string_view>
#include <vector>

namespace tempo {

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

/// Splits on '\n'; a trailing '\r' is kept (the formats are LF-only).
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split_tabs(std::string_view line);

std::string_view trim(std::string_view s);

}  // namespace tempo
