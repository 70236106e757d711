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

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tempo/text.hpp"
#include "tempo/track.hpp"

namespace tempo {

struct WordSpan {
  std::string surface;
  double start_s = 0.0;
  double end_s = 0.0;
};

enum class SourceTag { A, B };

/// One aligner's word-level spans over an utterance. Words are time-ordered
/// and non-overlapping.
struct AlignmentSeq {
  std::string utterance_id;
  std::vector<WordSpan> words;
  SourceTag source = SourceTag::A;
  /// Raw transcript when the source carries one.
  std::optional<std::string> transcript;
  /// End of the audio (or of the interval tier), when known.
  std::optional<double> end_of_audio_s;
  /// Repairs applied while parsing (clipped overlaps).
  std::vector<std::string> warnings;
};

/// A word's span on the normalized text axis, [char_begin, char_end).
struct AxisSpan {
  std::size_t char_begin = 0;
  std::size_t char_end = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  /// Index of the originating word in its AlignmentSeq.
  std::size_t word_index = 0;

  friend bool operator==(const AxisSpan&, const AxisSpan&) = default;
};

/// Parses one utterance in word-record format:
///
///   #utt=<id>
///   #text=<transcript>        (optional)
///   #end=<seconds>            (optional)
///   surface<TAB>start_s<TAB>end_s
///
/// An overlap of at most one frame period is clipped with a warning; larger
/// overlaps are errors.
AlignmentSeq parse_word_alignment(std::string_view text, FrameRate rate = {},
                                  SourceTag source = SourceTag::A);

/// Same format, several `#utt=` blocks per file.
std::vector<AlignmentSeq> parse_word_alignments(std::string_view text, FrameRate rate = {},
                                                SourceTag source = SourceTag::A);

std::string serialize_word_alignment(const AlignmentSeq& seq);

struct TextGridOptions {
  std::set<std::string> silence_labels{"", "sil", "sp", "spn"};
};

/// Reads an interval tier from a long-format TextGrid. Silence intervals are
/// not words; their extent survives as the gaps between words and as
/// end_of_audio_s (the tier xmax).
AlignmentSeq parse_textgrid(std::string_view text, std::string_view tier_name,
                            const TextGridOptions& opts = {}, SourceTag source = SourceTag::B);

/// Thrown by project_to_axis; names the word that could not be placed.
class ProjectionError : public std::runtime_error {
 public:
  ProjectionError(std::size_t word_index, const std::string& surface)
      : std::runtime_error("cannot project word " + std::to_string(word_index) + " ('" + surface +
                           "') onto the normalized axis"),
        word_index_(word_index) {}
  std::size_t word_index() const { return word_index_; }

 private:
  std::size_t word_index_;
};

/// Greedy left-to-right placement of each word's normalized surface at its
/// earliest occurrence at or after the cursor. Words that normalize to the
/// empty string are dropped.
std::vector<AxisSpan> project_to_axis(const AlignmentSeq& seq, std::u32string_view normalized,
                                      const NormalizeOptions& opts = {});

}  // namespace tempo
