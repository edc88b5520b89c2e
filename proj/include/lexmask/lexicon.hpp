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
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lexmask/document.hpp"
#include "lexmask/error.hpp"
#include "lexmask/utf8.hpp"

namespace lexmask {

struct LexiconEntry {
  double score = 0.0;  // relevance in [0, 1]
  bool is_seed = false;
  bool operator==(const LexiconEntry&) const = default;
};

// Scored domain vocabulary. Seeds always carry score 1.
class Lexicon {
 public:
  using Map = std::map<std::string, LexiconEntry, std::less<>>;

  // Inserts or merges an entry; duplicates keep the higher score.
  void add(std::string_view word, LexiconEntry entry) {
    if (word.empty()) throw ValidationError("lexicon: empty word");
    if (!(entry.score >= 0.0 && entry.score <= 1.0)) {
      throw ValidationError("lexicon: score out of [0,1] for '" +
                            std::string(word) + "'");
    }
    if (entry.is_seed && entry.score != 1.0) {
      throw ValidationError("lexicon: seed '" + std::string(word) +
                            "' must have score 1");
    }
    auto it = entries_.find(word);
    if (it == entries_.end()) {
      entries_.emplace(std::string(word), entry);
      seed_count_ += entry.is_seed;
      return;
    }
    if (entry.is_seed && !it->second.is_seed) ++seed_count_;
    it->second.is_seed = it->second.is_seed || entry.is_seed;
    it->second.score = std::max(it->second.score, entry.score);
  }

  bool contains(std::string_view word) const {
    return entries_.find(word) != entries_.end();
  }
  const LexiconEntry* find(std::string_view word) const {
    auto it = entries_.find(word);
    return it == entries_.end() ? nullptr : &it->second;
  }

  const Map& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t seed_count() const { return seed_count_; }

  std::vector<std::string> words() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [w, e] : entries_) out.push_back(w);
    return out;
  }
  std::vector<std::string> seeds() const {
    std::vector<std::string> out;
    for (const auto& [w, e] : entries_) {
      if (e.is_seed) out.push_back(w);
    }
    return out;
  }

  bool operator==(const Lexicon&) const = default;

 private:
  Map entries_;
  std::size_t seed_count_ = 0;
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  for (;;) {
    auto tab = line.find('\t');
    out.push_back(line.substr(0, tab));
    if (tab == std::string_view::npos) break;
    line.remove_prefix(tab + 1);
  }
  return out;
}

inline void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

// TSV rows "word<TAB>score<TAB>seed_flag". Blank lines are skipped.
inline Lexicon parse_lexicon(std::istream& in) {
  Lexicon lex;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    detail::chomp(line);
    if (line.empty()) continue;
    auto fields = detail::split_tabs(line);
    if (fields.size() != 3) {
      throw FormatError("lexicon row needs 3 tab-separated fields, got " +
                            std::to_string(fields.size()),
                        lineno);
    }
    double score = 0;
    auto sv = fields[1];
    auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), score);
    if (ec != std::errc() || p != sv.data() + sv.size()) {
      throw FormatError("bad score '" + std::string(sv) + "'", lineno);
    }
    if (fields[2] != "0" && fields[2] != "1") {
      throw FormatError("seed flag must be 0 or 1", lineno);
    }
    try {
      utf8::validate(fields[0]);
    } catch (const Utf8Error& e) {
      throw FormatError(e.what(), lineno);
    }
    try {
      lex.add(fields[0], {score, fields[2] == "1"});
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return lex;
}

inline Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError(path);
  return parse_lexicon(in);
}

inline void write_lexicon(std::ostream& out, const Lexicon& lex) {
  char buf[32];
  for (const auto& [word, e] : lex.entries()) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, e.score);
    out << word << '\t' << std::string_view(buf, end - buf) << '\t'
        << (e.is_seed ? '1' : '0') << '\n';
  }
}

// One entry per line; anything after the first tab or space is ignored, so
// frequency-annotated dictionaries load as plain word lists.
inline std::vector<std::string> parse_word_list(std::istream& in) {
  std::vector<std::string> words;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    detail::chomp(line);
    auto cut = line.find_first_of(" \t");
    if (cut != std::string::npos) line.resize(cut);
    if (line.empty()) continue;
    try {
      utf8::validate(line);
    } catch (const Utf8Error& e) {
      throw FormatError(e.what(), lineno);
    }
    words.push_back(line);
  }
  return words;
}

inline std::vector<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError(path);
  return parse_word_list(in);
}

struct LexiconMatch {
  std::uint64_t doc_id = 0;
  std::vector<std::size_t> word_span_indices;  // strictly increasing
};

// Word-level matching: a span matches when its whole surface string is a
// lexicon entry. Substrings of longer words never match.
inline LexiconMatch find_lexicon_words(const SegmentedDoc& doc,
                                       const Lexicon& lex,
                                       std::uint64_t doc_id = 0) {
  LexiconMatch m{doc_id, {}};
  if (lex.empty()) return m;
  for (std::size_t i = 0; i < doc.word_spans.size(); ++i) {
    if (lex.contains(doc.word(i))) m.word_span_indices.push_back(i);
  }
  return m;
}

// Adds every scored word at or above `cutoff` that is not yet present.
template <typename Scores>
Lexicon expand_lexicon(Lexicon lex, const Scores& scores, double cutoff) {
  if (!(cutoff > 0.0 && cutoff <= 1.0)) {
    throw ValidationError("expand_lexicon: cutoff must be in (0,1]");
  }
  for (const auto& [word, score] : scores) {
    if (score >= cutoff && !lex.contains(word)) lex.add(word, {score, false});
  }
  return lex;
}

}  // namespace lexmask
