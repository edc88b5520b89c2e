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

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "lexmask/document.hpp"
#include "lexmask/error.hpp"
#include "lexmask/lexicon.hpp"
#include "lexmask/utf8.hpp"

namespace lexmask {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

using StringSet = std::unordered_set<std::string, StringHash, std::equal_to<>>;

// Immutable word dictionary for forward maximum matching.
class SegmentDict {
 public:
  SegmentDict() = default;

  bool contains(std::string_view w) const { return words_.find(w) != words_.end(); }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  std::size_t max_word_len() const { return max_word_len_; }
  const StringSet& words() const { return words_; }

 private:
  friend SegmentDict build_dict(std::span<const std::string>, const Lexicon&);
  StringSet words_;
  std::size_t max_word_len_ = 0;
};

// Union of the word list and all lexicon words, so lexicon entries are
// always segmentable as single units.
inline SegmentDict build_dict(std::span<const std::string> word_list,
                              const Lexicon& lexicon) {
  SegmentDict dict;
  auto insert = [&](std::string_view w) {
    if (w.empty()) throw ValidationError("dictionary: empty entry");
    utf8::validate(w);
    dict.max_word_len_ = std::max(dict.max_word_len_, utf8::length(w));
    dict.words_.emplace(w);
  };
  for (const auto& w : word_list) insert(w);
  for (const auto& [w, e] : lexicon.entries()) insert(w);
  return dict;
}

inline SegmentDict build_dict(std::span<const std::string> word_list) {
  return build_dict(word_list, Lexicon{});
}

// Forward maximum matching. At each position the longest dictionary word
// wins; failing that, a run of ASCII letters and digits forms one span, and
// anything else is a single-character span.
inline SegmentedDoc segment_fmm(std::string_view text, const SegmentDict& dict) {
  SegmentedDoc doc;
  doc.text = std::string(text);
  doc.offsets = char_offsets(text);
  const std::size_t n = doc.size();
  const auto& offs = doc.offsets;
  doc.word_spans.reserve(n);

  for (std::size_t i = 0; i < n;) {
    std::size_t len = 0;
    for (std::size_t k = std::min(dict.max_word_len(), n - i); k >= 1; --k) {
      if (dict.contains(text.substr(offs[i], offs[i + k] - offs[i]))) {
        len = k;
        break;
      }
    }
    if (len == 0) {
      auto is_alnum_at = [&](std::size_t p) {
        return offs[p + 1] - offs[p] == 1 &&
               utf8::is_ascii_alnum(static_cast<unsigned char>(text[offs[p]]));
      };
      len = 1;
      if (is_alnum_at(i)) {
        while (i + len < n && is_alnum_at(i + len)) ++len;
      }
    }
    doc.word_spans.push_back({i, len});
    i += len;
  }
  return doc;
}

// Number of non-whitespace word spans.
inline std::size_t word_count(const SegmentedDoc& doc) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < doc.word_spans.size(); ++i) {
    n += !utf8::is_space(doc.word(i));
  }
  return n;
}

}  // namespace lexmask
