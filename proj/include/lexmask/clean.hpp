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
#include <map>
#include <optional>
#include <ranges>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "lexmask/utf8.hpp"

namespace lexmask {

struct RawPost {
  std::string source_id;
  std::string user_id;
  std::string text;
};

struct CleanDoc {
  std::string source_id;
  std::string text;
  std::size_t original_length = 0;  // code points before cleaning
};

// ECMAScript patterns for ASCII and common CJK kaomoji. Each pattern keeps
// group 1 (the left context) in the replacement, which lets it act as a
// left word boundary without lookbehind.
inline std::vector<std::string> default_kaomoji_patterns() {
  return {
      R"((^|[^A-Za-z0-9])[:;=][-'^]?[()DPp|/\\\[\]](?![A-Za-z0-9]))",
      R"((^|[^A-Za-z0-9])(?:T_T|T\.T|QAQ|QWQ|TAT|orz|Orz|OTZ|\^_\^|\^\^|>_<|-_-|=_=|<3)(?![A-Za-z0-9]))",
      R"(()(?:o\(╥﹏╥\)o|\(╥﹏╥\)|╥﹏╥|\(´･ω･`\)|\(\*\^▽\^\*\)|\(｡・ω・｡\)))",
  };
}

struct CleaningConfig {
  bool strip_urls = true;
  bool strip_mentions = true;
  bool strip_hashtags = true;      // paired #topic# spans
  bool strip_emoji = true;
  bool strip_bracket_emoticons = true;  // Weibo-style [哈哈], [doge]
  std::vector<std::regex> kaomoji;
  std::size_t min_chars = 4;
  bool drop_single_char_spam = true;

  static CleaningConfig defaults() {
    CleaningConfig c;
    c.set_kaomoji(default_kaomoji_patterns());
    return c;
  }

  void set_kaomoji(const std::vector<std::string>& patterns) {
    kaomoji.clear();
    for (const auto& p : patterns) kaomoji.emplace_back(p, std::regex::ECMAScript);
  }
};

namespace detail {

inline bool is_emoji(char32_t c) {
  return (c >= 0x1F000 && c <= 0x1FAFF) ||  // mahjong .. symbols ext-A
         (c >= 0x2600 && c <= 0x27BF) ||    // misc symbols, dingbats
         (c >= 0x2300 && c <= 0x23FF) ||    // misc technical (watch, hourglass)
         (c >= 0x2B00 && c <= 0x2BFF) ||    // arrows, stars
         (c >= 0xFE00 && c <= 0xFE0F) ||    // variation selectors
         (c >= 0xE0020 && c <= 0xE007F) ||  // tag sequences
         c == 0x200D || c == 0x20E3 || c == 0x3030 || c == 0x303D ||
         c == 0x3297 || c == 0x3299 || c == 0x2122 || c == 0x2139 ||
         c == 0x203C || c == 0x2049;
}

// Control, format and private-use characters that carry no text.
inline bool is_junk(char32_t c) {
  if (c < 0x20) return !utf8::is_space(c);
  return c == 0x7F || (c >= 0x80 && c <= 0x9F) || c == 0x200B ||
         c == 0x200C || c == 0x200E || c == 0x200F ||
         (c >= 0x202A && c <= 0x202E) || (c >= 0x2060 && c <= 0x2064) ||
         c == 0xFEFF || c == 0xFFFC || c == 0xFFFD ||
         (c >= 0xE000 && c <= 0xF8FF) || c >= 0xF0000;
}

inline bool is_cjk_ideograph(char32_t c) {
  return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) ||
         (c >= 0x20000 && c <= 0x2FFFF) || (c >= 0xF900 && c <= 0xFAFF);
}

inline bool is_punct(char32_t c) {
  if (c < 0x80) return c > 0x20 && c < 0x7F && !utf8::is_ascii_alnum(c);
  return (c >= 0x2000 && c <= 0x206F) || (c >= 0x3000 && c <= 0x303F) ||
         (c >= 0xFE10 && c <= 0xFE6F) ||
         (c >= 0xFF00 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) ||
         (c >= 0xFF3B && c <= 0xFF40) || (c >= 0xFF5B && c <= 0xFF65) ||
         (c >= 0x00A1 && c <= 0x00BF);
}

inline bool is_url_char(char32_t c) {
  if (c >= 0x80 || c <= 0x20) return false;
  return utf8::is_ascii_alnum(c) ||
         std::u32string_view(U"-._~:/?#[]@!$&'()*+,;=%").find(c) !=
             std::u32string_view::npos;
}

inline bool is_mention_char(char32_t c) {
  if (c < 0x80) return utf8::is_ascii_alnum(c) || c == '_' || c == '-';
  return !utf8::is_space(c) && !is_punct(c) && !is_emoji(c) && !is_junk(c);
}

inline char32_t ascii_lower(char32_t c) {
  return (c >= 'A' && c <= 'Z') ? c + 32 : c;
}

// True when cps[i..] starts with the ASCII literal, ignoring case.
inline bool starts_with_ci(const std::vector<char32_t>& cps, std::size_t i,
                           std::string_view lit) {
  if (i + lit.size() > cps.size()) return false;
  for (std::size_t k = 0; k < lit.size(); ++k) {
    if (ascii_lower(cps[i + k]) != static_cast<char32_t>(lit[k])) return false;
  }
  return true;
}

// Length of a URL starting at i, 0 if none. Trailing sentence punctuation
// is left in place.
inline std::size_t match_url(const std::vector<char32_t>& cps, std::size_t i) {
  std::size_t head = 0;
  if (starts_with_ci(cps, i, "https://")) {
    head = 8;
  } else if (starts_with_ci(cps, i, "http://")) {
    head = 7;
  } else if (starts_with_ci(cps, i, "t.cn/") &&
             (i == 0 || (!utf8::is_ascii_alnum(cps[i - 1]) &&
                         cps[i - 1] != '.'))) {
    head = 5;
  } else {
    return 0;
  }
  std::size_t j = i + head;
  while (j < cps.size() && is_url_char(cps[j])) ++j;
  while (j > i + head &&
         std::u32string_view(U".,;:!?'\")").find(cps[j - 1]) !=
             std::u32string_view::npos) {
    --j;
  }
  return j - i;
}

inline std::size_t match_mention(const std::vector<char32_t>& cps,
                                 std::size_t i) {
  constexpr std::size_t kMaxNick = 30;
  if (cps[i] != '@' && cps[i] != 0xFF20) return 0;
  if (i > 0 && utf8::is_ascii_alnum(cps[i - 1])) return 0;  // e-mail
  std::size_t j = i + 1;
  while (j < cps.size() && j - i - 1 < kMaxNick && is_mention_char(cps[j])) ++j;
  return j > i + 1 ? j - i : 0;
}

inline std::size_t match_hashtag(const std::vector<char32_t>& cps,
                                 std::size_t i) {
  constexpr std::size_t kMaxTopic = 64;
  if (cps[i] != '#' && cps[i] != 0xFF03) return 0;
  for (std::size_t j = i + 1; j < cps.size() && j - i <= kMaxTopic + 1; ++j) {
    if (cps[j] == '\n' || cps[j] == '\r') return 0;
    if (cps[j] == cps[i]) return j > i + 1 ? j - i + 1 : 0;
  }
  return 0;
}

inline std::size_t match_bracket_emoticon(const std::vector<char32_t>& cps,
                                          std::size_t i) {
  constexpr std::size_t kMaxName = 8;
  if (cps[i] != '[') return 0;
  std::size_t j = i + 1;
  while (j < cps.size() && j - i - 1 < kMaxName &&
         (is_cjk_ideograph(cps[j]) ||
          (cps[j] < 0x80 && utf8::is_ascii_alnum(cps[j])))) {
    ++j;
  }
  if (j == i + 1 || j >= cps.size() || cps[j] != ']') return 0;
  return j - i + 1;
}

// One left-to-right removal pass followed by whitespace normalization.
inline std::string clean_pass(std::string_view text, const CleaningConfig& rules) {
  std::string s(text);
  for (const auto& re : rules.kaomoji) s = std::regex_replace(s, re, "$1");

  std::vector<char32_t> cps;
  cps.reserve(s.size());
  for (const auto& cp : utf8::decode(s)) cps.push_back(cp.value);

  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < cps.size();) {
    std::size_t skip = 0;
    if (rules.strip_urls) skip = match_url(cps, i);
    if (!skip && rules.strip_mentions) skip = match_mention(cps, i);
    if (!skip && rules.strip_hashtags) skip = match_hashtag(cps, i);
    if (!skip && rules.strip_bracket_emoticons) skip = match_bracket_emoticon(cps, i);
    if (skip) {
      i += skip;
      continue;
    }
    const char32_t c = cps[i++];
    if (utf8::is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (is_junk(c) || (rules.strip_emoji && is_emoji(c))) continue;
    if (pending_space) out.push_back(' ');
    pending_space = false;
    utf8::append(out, c);
  }
  return out;
}

}  // namespace detail

// Strips URLs, @-mentions, #topic# spans, emoji, kaomoji and control
// characters, collapsing whitespace runs to one space. Removal can bring
// new artifacts together ("http@x://" loses the mention and becomes a URL),
// so passes repeat until the text is stable; the result is a fixed point.
inline std::string clean_text(std::string_view raw, const CleaningConfig& rules) {
  utf8::validate(raw);
  std::string cur = detail::clean_pass(raw, rules);
  for (;;) {
    std::string next = detail::clean_pass(cur, rules);
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

inline std::size_t content_length(std::string_view text) {
  std::size_t n = 0;
  for (const auto& cp : utf8::decode(text)) n += !utf8::is_space(cp.value);
  return n;
}

enum class Verdict { kKeep, kDrop };

inline Verdict filter_short(const CleanDoc& doc, std::size_t min_chars) {
  return content_length(doc.text) < min_chars ? Verdict::kDrop : Verdict::kKeep;
}

// Repeated-character spam: a single distinct non-space code point.
inline bool is_meaningless(std::string_view text) {
  char32_t first = 0;
  bool seen = false;
  for (const auto& cp : utf8::decode(text)) {
    if (utf8::is_space(cp.value)) continue;
    if (!seen) {
      first = cp.value, seen = true;
    } else if (cp.value != first) {
      return false;
    }
  }
  return seen;
}

// Cleans a post and applies the length and spam filters.
inline std::optional<CleanDoc> clean_post(const RawPost& post,
                                          const CleaningConfig& rules) {
  CleanDoc doc{post.source_id, clean_text(post.text, rules),
               utf8::length(post.text)};
  if (filter_short(doc, rules.min_chars) == Verdict::kDrop) return std::nullopt;
  if (rules.drop_single_char_spam && is_meaningless(doc.text)) return std::nullopt;
  return doc;
}

struct SourceStats {
  std::size_t users = 0;
  std::size_t posts = 0;
  bool operator==(const SourceStats&) const = default;
};

struct CorpusStats {
  std::map<std::string, SourceStats> per_source;
  std::size_t total_users = 0;
  std::size_t total_posts = 0;
  std::size_t kept_after_cleaning = 0;
  bool operator==(const CorpusStats&) const = default;
};

// Partial statistics over one partition of the corpus. merge() is
// associative and commutative. Users are distinct per source; the corpus
// total is the sum over sources, since user ids are platform-scoped.
class StatsAccumulator {
 public:
  void add_post(const RawPost& post) {
    auto& src = sources_[post.source_id];
    ++src.posts;
    if (!post.user_id.empty()) src.users.insert(post.user_id);
  }

  void add_kept(const CleanDoc&) { ++kept_; }

  void merge(const StatsAccumulator& other) {
    for (const auto& [name, src] : other.sources_) {
      auto& mine = sources_[name];
      mine.posts += src.posts;
      mine.users.insert(src.users.begin(), src.users.end());
    }
    kept_ += other.kept_;
  }

  CorpusStats finish() const {
    CorpusStats stats;
    for (const auto& [name, src] : sources_) {
      stats.per_source[name] = {src.users.size(), src.posts};
      stats.total_users += src.users.size();
      stats.total_posts += src.posts;
    }
    stats.kept_after_cleaning = kept_;
    return stats;
  }

 private:
  struct Source {
    std::unordered_set<std::string> users;
    std::size_t posts = 0;
  };
  std::map<std::string, Source> sources_;
  std::size_t kept_ = 0;
};

template <std::ranges::input_range Posts, std::ranges::input_range Kept>
CorpusStats aggregate_stats(Posts&& posts, Kept&& kept) {
  StatsAccumulator acc;
  for (const RawPost& p : posts) acc.add_post(p);
  for (const CleanDoc& d : kept) acc.add_kept(d);
  return acc.finish();
}

}  // namespace lexmask
