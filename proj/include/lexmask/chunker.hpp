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
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexmask/document.hpp"
#include "lexmask/error.hpp"
#include "lexmask/lexicon.hpp"
#include "lexmask/segment.hpp"
#include "lexmask/utf8.hpp"

namespace lexmask {

using TokenId = std::int32_t;

// Token vocabulary; the id of a token is its line number (0-based) in the
// vocab file.
class Vocab {
 public:
  static Vocab from_tokens(std::vector<std::string> tokens) {
    Vocab v;
    v.tokens_ = std::move(tokens);
    for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
      if (!v.ids_.emplace(v.tokens_[i], static_cast<TokenId>(i)).second) {
        throw ValidationError("vocab: duplicate token '" + v.tokens_[i] +
                              "' at line " + std::to_string(i + 1));
      }
    }
    auto special = [&](std::string_view name) {
      auto id = v.find(name);
      if (!id) throw ValidationError("vocab: missing special token " + std::string(name));
      return *id;
    };
    v.cls_ = special("[CLS]");
    v.sep_ = special("[SEP]");
    v.mask_ = special("[MASK]");
    v.unk_ = special("[UNK]");
    v.pad_ = special("[PAD]");
    for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
      const auto id = static_cast<TokenId>(i);
      if (!v.is_special(id)) v.regular_.push_back(id);
    }
    return v;
  }

  std::optional<TokenId> find(std::string_view token) const {
    auto it = ids_.find(token);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  TokenId id_or_unk(std::string_view token) const {
    return find(token).value_or(unk_);
  }

  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }

  TokenId cls_id() const { return cls_; }
  TokenId sep_id() const { return sep_; }
  TokenId mask_id() const { return mask_; }
  TokenId unk_id() const { return unk_; }
  TokenId pad_id() const { return pad_; }

  bool is_special(TokenId id) const {
    return id == cls_ || id == sep_ || id == mask_ || id == unk_ || id == pad_;
  }
  // Ids eligible as random replacements.
  const std::vector<TokenId>& regular_ids() const { return regular_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> ids_;
  std::vector<TokenId> regular_;
  TokenId cls_ = 0, sep_ = 0, mask_ = 0, unk_ = 0, pad_ = 0;
};

inline Vocab parse_vocab(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    detail::chomp(line);
    tokens.push_back(line);
  }
  return Vocab::from_tokens(std::move(tokens));
}

inline Vocab load_vocab(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError(path);
  return parse_vocab(in);
}

// Token ids of one document with its whole-word groups.
struct TokenizedDoc {
  std::vector<TokenId> ids;
  std::vector<WordSpan> groups;
  std::vector<char> group_is_lexicon;  // parallel to groups
  std::vector<std::size_t> group_source;  // word span each group came from
};

namespace detail {

inline TokenId lookup_ascii_run(std::string_view run, const Vocab& vocab) {
  if (auto id = vocab.find(run)) return *id;
  std::string lower(run);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return vocab.id_or_unk(lower);
}

}  // namespace detail

// One token per character, except that ASCII letter/digit runs become a
// single token. Whitespace produces no tokens, so whitespace spans yield no
// group; every other word span becomes exactly one group.
inline TokenizedDoc tokenize(const SegmentedDoc& doc, const Vocab& vocab) {
  TokenizedDoc out;
  out.ids.reserve(doc.size());
  for (std::size_t s = 0; s < doc.word_spans.size(); ++s) {
    const auto& span = doc.word_spans[s];
    const std::size_t first = out.ids.size();
    for (std::size_t i = span.start; i < span.end();) {
      auto ch = doc.char_at(i);
      if (ch.size() == 1 && utf8::is_ascii_alnum(static_cast<unsigned char>(ch[0]))) {
        std::size_t j = i + 1;
        while (j < span.end()) {
          auto c = doc.char_at(j);
          if (c.size() != 1 || !utf8::is_ascii_alnum(static_cast<unsigned char>(c[0]))) break;
          ++j;
        }
        out.ids.push_back(detail::lookup_ascii_run(doc.chars(i, j - i), vocab));
        i = j;
        continue;
      }
      if (!utf8::is_space(ch)) out.ids.push_back(vocab.id_or_unk(ch));
      ++i;
    }
    if (out.ids.size() > first) {
      out.groups.push_back({first, out.ids.size() - first});
      out.group_is_lexicon.push_back(0);
      out.group_source.push_back(s);
    }
  }
  return out;
}

// Tokenizes and flags the groups whose source span is a lexicon match.
inline TokenizedDoc tokenize(const SegmentedDoc& doc, const Vocab& vocab,
                             const LexiconMatch& match) {
  TokenizedDoc out = tokenize(doc, vocab);
  std::size_t m = 0;
  const auto& hits = match.word_span_indices;
  for (std::size_t g = 0; g < out.groups.size(); ++g) {
    while (m < hits.size() && hits[m] < out.group_source[g]) ++m;
    if (m < hits.size() && hits[m] == out.group_source[g]) out.group_is_lexicon[g] = 1;
  }
  return out;
}

struct ChunkOrigin {
  std::uint64_t first_doc = 0;
  std::size_t first_offset = 0;  // token offset inside first_doc
  std::uint64_t last_doc = 0;
  bool operator==(const ChunkOrigin&) const = default;
};

// Fixed-length window of the concatenated token stream.
struct TokenChunk {
  std::uint64_t chunk_id = 0;
  std::vector<TokenId> ids;
  std::vector<WordSpan> word_groups;
  std::vector<std::size_t> lexicon_groups;  // indices into word_groups
  ChunkOrigin origin;
  bool operator==(const TokenChunk&) const = default;
};

// Ordered reducer that cuts the concatenation of all pushed documents into
// windows of exactly `length` tokens. Words crossing a window boundary are
// split into one group per window, each keeping the lexicon flag. The
// trailing partial window is discarded by finish().
class Chunker {
 public:
  explicit Chunker(std::size_t length) : length_(length) {
    if (length < 8) throw ValidationError("chunk length must be >= 8");
    reset_buffer();
  }

  template <typename Emit>
  void push(const TokenizedDoc& doc, std::uint64_t doc_id, Emit&& emit) {
    total_tokens_ += doc.ids.size();
    for (std::size_t g = 0; g < doc.groups.size(); ++g) {
      const auto& grp = doc.groups[g];
      std::size_t pos = grp.start;
      while (pos < grp.end()) {
        if (buf_.ids.empty()) buf_.origin = {doc_id, pos, doc_id};
        const std::size_t take =
            std::min(length_ - buf_.ids.size(), grp.end() - pos);
        if (doc.group_is_lexicon[g]) buf_.lexicon_groups.push_back(buf_.word_groups.size());
        buf_.word_groups.push_back({buf_.ids.size(), take});
        buf_.ids.insert(buf_.ids.end(), doc.ids.begin() + static_cast<std::ptrdiff_t>(pos),
                        doc.ids.begin() + static_cast<std::ptrdiff_t>(pos + take));
        buf_.origin.last_doc = doc_id;
        pos += take;
        if (buf_.ids.size() == length_) {
          buf_.chunk_id = next_id_++;
          emit(std::move(buf_));
          reset_buffer();
        }
      }
    }
  }

  // Drops the incomplete tail; returns the number of tokens dropped.
  std::size_t finish() {
    const std::size_t dropped = buf_.ids.size();
    reset_buffer();
    dropped_ += dropped;
    return dropped;
  }

  std::size_t length() const { return length_; }
  std::uint64_t chunks_emitted() const { return next_id_; }
  std::size_t total_tokens() const { return total_tokens_; }
  std::size_t dropped_tokens() const { return dropped_; }

 private:
  void reset_buffer() {
    buf_ = TokenChunk{};
    buf_.ids.reserve(length_);
  }

  std::size_t length_;
  TokenChunk buf_;
  std::uint64_t next_id_ = 0;
  std::size_t total_tokens_ = 0;
  std::size_t dropped_ = 0;
};

struct ChunkStreamResult {
  std::vector<TokenChunk> chunks;
  std::size_t dropped_tail = 0;
};

template <typename Docs>
ChunkStreamResult chunk_stream(const Docs& docs, std::size_t length = 128) {
  Chunker chunker(length);
  ChunkStreamResult out;
  std::uint64_t doc_id = 0;
  for (const TokenizedDoc& d : docs) {
    chunker.push(d, doc_id++, [&](TokenChunk&& c) { out.chunks.push_back(std::move(c)); });
  }
  out.dropped_tail = chunker.finish();
  return out;
}

}  // namespace lexmask
