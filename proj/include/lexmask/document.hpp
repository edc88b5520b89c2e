// Copyright 2026 The lexmask Authors
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

#include "lexmask/utf8.hpp"

namespace lexmask {

// Half-open range [start, start + len) of character or token positions.
struct WordSpan {
  std::size_t start = 0;
  std::size_t len = 0;
  std::size_t end() const { return start + len; }
  bool operator==(const WordSpan&) const = default;
};

// Text split into characters, with word spans partitioning the characters.
struct SegmentedDoc {
  std::string text;
  std::vector<std::size_t> offsets;  // byte offset of each char, plus end
  std::vector<WordSpan> word_spans;

  std::size_t size() const { return offsets.empty() ? 0 : offsets.size() - 1; }

  std::string_view chars(std::size_t start, std::size_t len) const {
    return std::string_view(text).substr(offsets[start],
                                         offsets[start + len] - offsets[start]);
  }
  std::string_view char_at(std::size_t i) const { return chars(i, 1); }
  std::string_view word(std::size_t span) const {
    return chars(word_spans[span].start, word_spans[span].len);
  }

  std::vector<std::string> words() const {
    std::vector<std::string> out;
    out.reserve(word_spans.size());
    for (std::size_t i = 0; i < word_spans.size(); ++i) out.emplace_back(word(i));
    return out;
  }
};

// Byte offsets of every code point in `text`, with a trailing end offset.
inline std::vector<std::size_t> char_offsets(std::string_view text) {
  std::vector<std::size_t> offs;
  offs.reserve(text.size() + 1);
  for (std::size_t pos = 0; pos < text.size();) {
    offs.push_back(pos);
    pos += utf8::decode_at(text, pos).size;
  }
  offs.push_back(text.size());
  return offs;
}

// Builds a document from pre-segmented words (e.g. a "words" JSON field).
inline SegmentedDoc doc_from_words(const std::vector<std::string>& words) {
  SegmentedDoc doc;
  for (const auto& w : words) doc.text += w;
  doc.offsets = char_offsets(doc.text);
  std::size_t pos = 0;
  for (const auto& w : words) {
    const std::size_t n = utf8::length(w);
    if (n == 0) continue;
    doc.word_spans.push_back({pos, n});
    pos += n;
  }
  return doc;
}

}  // namespace lexmask
