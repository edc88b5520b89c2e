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

// Pipeline stages as callable commands. Each command reads its inputs from
// disk, writes one output artifact and, for file outputs, a manifest
// `<output>.manifest.json` recording the configuration, input digests and
// counts needed to regenerate the artifact.

#include <cstddef>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexmask/chunker.hpp"
#include "lexmask/clean.hpp"
#include "lexmask/error.hpp"
#include "lexmask/io.hpp"
#include "lexmask/lexicon.hpp"
#include "lexmask/masker.hpp"
#include "lexmask/metrics.hpp"
#include "lexmask/parallel.hpp"
#include "lexmask/propagation.hpp"
#include "lexmask/segment.hpp"

namespace lexmask::cli {

using nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
  std::string input;
  std::string output;
  std::string format = "jsonl";  // raw input: jsonl | text
  std::string source = "unknown";
  std::string lexicon;
  std::string seeds;
  std::vector<std::string> dicts;
  std::string vocab;
  std::size_t chunk_len = 128;
  double budget = 0.20;
  std::string policy = "0.8:0.1:0.1";
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::size_t min_chars = 4;
  bool spam_filter = true;
  std::vector<std::string> kaomoji;  // added to the default patterns
  std::string averaging = "macro";
  std::string positive;  // binary averaging; defaults to the second class
  std::vector<std::string> labels;
  std::size_t folds = 5;
  std::size_t n = 0;
  std::size_t window = 5;
  double min_weight = 0.0;
  double tol = 1e-6;
  std::size_t max_iter = 1000;
  double cutoff = 0.5;
};

// Every field that can influence an output. Worker count is excluded:
// outputs do not depend on it.
inline json config_json(const RunConfig& c) {
  return json{{"input", c.input},       {"output", c.output},
              {"format", c.format},     {"source", c.source},
              {"lexicon", c.lexicon},   {"seeds", c.seeds},
              {"dict", c.dicts},        {"vocab", c.vocab},
              {"chunk_len", c.chunk_len}, {"budget", c.budget},
              {"policy", c.policy},     {"seed", c.seed},
              {"min_chars", c.min_chars}, {"spam_filter", c.spam_filter},
              {"kaomoji", c.kaomoji},   {"averaging", c.averaging},
              {"positive", c.positive}, {"labels", c.labels},
              {"folds", c.folds},       {"n", c.n},
              {"window", c.window},     {"min_weight", c.min_weight},
              {"tol", c.tol},           {"max_iter", c.max_iter},
              {"cutoff", c.cutoff}};
}

struct CommandResult {
  json counts;
  std::string manifest_path;  // empty when output went to stdout
};

namespace detail {

inline bool to_stdout(const RunConfig& c) { return c.output.empty() || c.output == "-"; }

inline void require_path(const std::string& path, const char* flag) {
  if (path.empty()) throw ValidationError(std::string("missing required --") + flag);
}

inline std::string write_manifest(const RunConfig& cfg, const std::string& command,
                                  const std::vector<std::pair<std::string, std::string>>& inputs,
                                  const json& counts) {
  if (to_stdout(cfg)) return {};
  const json config = config_json(cfg);
  json in = json::object();
  for (const auto& [role, path] : inputs) {
    if (!path.empty()) in[role] = {{"path", path}, {"sha256", io::sha256_file(path)}};
  }
  json manifest{{"tool", "lexmask"},
                {"version", kToolVersion},
                {"command", command},
                {"config", config},
                {"config_hash", io::sha256(config.dump())},
                {"inputs", in},
                {"output", {{"path", cfg.output}, {"sha256", io::sha256_file(cfg.output)}}},
                {"counts", counts},
                {"seed", cfg.seed},
                {"runtime", {{"workers", cfg.workers}}}};
  const std::string path = cfg.output + ".manifest.json";
  auto out = io::open_out(path);
  out << manifest.dump(2) << '\n';
  return path;
}

// Writes a JSON document to the configured output or stdout.
inline void emit_document(const RunConfig& cfg, const json& doc) {
  if (to_stdout(cfg)) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  auto out = io::open_out(cfg.output);
  out << doc.dump(2) << '\n';
}

inline CleaningConfig cleaning_rules(const RunConfig& cfg) {
  CleaningConfig rules = CleaningConfig::defaults();
  auto patterns = default_kaomoji_patterns();
  patterns.insert(patterns.end(), cfg.kaomoji.begin(), cfg.kaomoji.end());
  try {
    rules.set_kaomoji(patterns);
  } catch (const std::regex_error& e) {
    throw ValidationError(std::string("bad kaomoji pattern: ") + e.what());
  }
  rules.min_chars = cfg.min_chars;
  rules.drop_single_char_spam = cfg.spam_filter;
  return rules;
}

inline RawPost parse_raw(const std::string& line, std::size_t lineno, const RunConfig& cfg) {
  if (cfg.format == "text") {
    try {
      utf8::validate(line);
    } catch (const Utf8Error& e) {
      throw FormatError(e.what(), lineno);
    }
    return {cfg.source, "", line};
  }
  auto rec = io::parse_record(line, lineno);
  RawPost post;
  post.source_id = io::require_string(rec, "source", lineno);
  if (post.source_id.empty()) throw FormatError("empty \"source\"", lineno);
  post.text = io::require_string(rec, "text", lineno);
  if (auto it = rec.find("user"); it != rec.end() && !it->is_null()) {
    post.user_id = io::label_text(*it);
  }
  return post;
}

inline std::optional<CleanDoc> clean_raw(const RawPost& post, const CleaningConfig& rules,
                                         std::size_t lineno) {
  try {
    return clean_post(post, rules);
  } catch (const Utf8Error& e) {
    throw FormatError(e.what(), lineno);
  }
}

// Dictionary, lexicon and vocabulary shared by the text-consuming stages.
struct Resources {
  Lexicon lexicon;
  SegmentDict dict;
  std::optional<Vocab> vocab;
};

inline Resources load_resources(const RunConfig& cfg, bool need_vocab) {
  Resources r;
  if (!cfg.lexicon.empty()) r.lexicon = load_lexicon(cfg.lexicon);
  std::vector<std::string> words;
  for (const auto& path : cfg.dicts) {
    auto more = load_word_list(path);
    words.insert(words.end(), more.begin(), more.end());
  }
  r.dict = build_dict(words, r.lexicon);
  if (need_vocab) {
    require_path(cfg.vocab, "vocab");
    r.vocab = load_vocab(cfg.vocab);
  }
  return r;
}

// A record with a "words" array is taken as already segmented; otherwise
// its "text" is segmented with the dictionary.
inline SegmentedDoc doc_from_record(const json& rec, std::size_t lineno, const SegmentDict& dict) {
  if (auto it = rec.find("words"); it != rec.end()) {
    if (!it->is_array()) throw FormatError("\"words\" must be an array", lineno);
    std::vector<std::string> words;
    for (const auto& w : *it) {
      if (!w.is_string()) throw FormatError("\"words\" entries must be strings", lineno);
      words.push_back(w.get<std::string>());
    }
    return doc_from_words(words);
  }
  return segment_fmm(io::require_string(rec, "text", lineno), dict);
}

inline TokenizedDoc prepare(const SegmentedDoc& doc, const Resources& res) {
  return tokenize(doc, *res.vocab, find_lexicon_words(doc, res.lexicon));
}

inline json spans_json(const std::vector<WordSpan>& spans) {
  json a = json::array();
  for (const auto& s : spans) a.push_back({s.start, s.len});
  return a;
}

inline json chunk_json(const TokenChunk& c) {
  return json{{"chunk_id", c.chunk_id},
              {"ids", c.ids},
              {"groups", spans_json(c.word_groups)},
              {"lexicon_groups", c.lexicon_groups},
              {"origin",
               {{"first_doc", c.origin.first_doc},
                {"first_offset", c.origin.first_offset},
                {"last_doc", c.origin.last_doc}}}};
}

inline TokenChunk chunk_from_json(const json& rec, std::size_t lineno) {
  try {
    TokenChunk c;
    c.chunk_id = rec.at("chunk_id").get<std::uint64_t>();
    c.ids = rec.at("ids").get<std::vector<TokenId>>();
    std::size_t next = 0;
    for (const auto& g : rec.at("groups")) {
      WordSpan s{g.at(0).get<std::size_t>(), g.at(1).get<std::size_t>()};
      if (s.start != next || s.len == 0) {
        throw FormatError("chunk groups do not partition the chunk", lineno);
      }
      next = s.end();
      c.word_groups.push_back(s);
    }
    if (next != c.ids.size()) throw FormatError("chunk groups do not cover the chunk", lineno);
    if (auto it = rec.find("lexicon_groups"); it != rec.end()) {
      c.lexicon_groups = it->get<std::vector<std::size_t>>();
    }
    if (auto it = rec.find("origin"); it != rec.end()) {
      c.origin = {it->value("first_doc", std::uint64_t{0}),
                  it->value("first_offset", std::size_t{0}),
                  it->value("last_doc", std::uint64_t{0})};
    }
    return c;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad chunk record: ") + e.what(), lineno);
  }
}

inline json masked_json(const MaskedExample& ex, const TokenChunk& chunk) {
  std::vector<WordSpan> masked, lexical;
  for (auto g : ex.plan.masked_groups) masked.push_back(chunk.word_groups[g]);
  for (auto g : ex.plan.lexicon_groups) lexical.push_back(chunk.word_groups[g]);
  return json{{"chunk_id", chunk.chunk_id},
              {"input_ids", ex.input_ids},
              {"labels", ex.labels},
              {"masked_groups", spans_json(masked)},
              {"lexicon_groups", spans_json(lexical)}};
}

// Downstream half shared by `mask` and `run`: chunks documents in order,
// masks chunks in parallel batches and writes them in chunk order.
class MaskingSink {
 public:
  MaskingSink(const RunConfig& cfg, const Vocab& vocab, std::ostream& out)
      : chunker_(cfg.chunk_len), vocab_(vocab), out_(out), workers_(cfg.workers) {
    policy_.budget = cfg.budget;
    policy_.rng_seed = cfg.seed;
    parse_replacement(cfg.policy, policy_);
  }

  void add_doc(const TokenizedDoc& doc) {
    chunker_.push(doc, next_doc_++, [&](TokenChunk&& c) { add_chunk(std::move(c)); });
  }

  void add_chunk(TokenChunk&& chunk) {
    pending_.push_back(std::move(chunk));
    if (pending_.size() >= kBatch) flush();
  }

  json finish() {
    dropped_ += chunker_.finish();
    flush();
    return json{{"chunks", chunks_},
                {"tokens_dropped", dropped_},
                {"masked_positions", masked_positions_},
                {"lexicon_positions", lexicon_positions_},
                {"replaced_mask", replaced_[0]},
                {"replaced_random", replaced_[1]},
                {"kept", replaced_[2]}};
  }

 private:
  static constexpr std::size_t kBatch = 1024;

  void flush() {
    std::vector<std::string> lines(pending_.size());
    std::vector<MaskedExample> examples(pending_.size());
    parallel_for(pending_.size(), workers_, [&](std::size_t i) {
      const auto& chunk = pending_[i];
      auto plan = plan_masks(chunk, policy_);
      examples[i] = apply_masks(chunk, plan, policy_, vocab_);
      lines[i] = masked_json(examples[i], chunk).dump();
    });
    for (std::size_t i = 0; i < pending_.size(); ++i) {
      out_ << lines[i] << '\n';
      ++chunks_;
      masked_positions_ += examples[i].plan.masked_positions.size();
      for (auto g : examples[i].plan.lexicon_groups) {
        lexicon_positions_ += pending_[i].word_groups[g].len;
      }
      for (auto r : examples[i].replacements) ++replaced_[static_cast<int>(r)];
    }
    pending_.clear();
  }

  Chunker chunker_;
  const Vocab& vocab_;
  std::ostream& out_;
  unsigned workers_;
  MaskPolicy policy_;
  std::vector<TokenChunk> pending_;
  std::uint64_t next_doc_ = 0;
  std::size_t chunks_ = 0, dropped_ = 0, masked_positions_ = 0, lexicon_positions_ = 0;
  std::size_t replaced_[3] = {0, 0, 0};
};

}  // namespace detail

// Raw posts -> cleaned JSONL {"source","user","text"}; dropped posts omitted.
inline CommandResult cmd_clean(const RunConfig& cfg) {
  detail::require_path(cfg.input, "input");
  detail::require_path(cfg.output, "output");
  const auto rules = detail::cleaning_rules(cfg);
  auto in = io::open_in(cfg.input);
  auto out = io::open_out(cfg.output);
  std::size_t read = 0, kept = 0;
  io::map_lines_ordered<std::optional<std::string>>(
      in, cfg.workers,
      [&](const std::string& line, std::size_t lineno) -> std::optional<std::string> {
        auto post = detail::parse_raw(line, lineno, cfg);
        auto doc = detail::clean_raw(post, rules, lineno);
        if (!doc) return std::nullopt;
        return json{{"source", post.source_id}, {"user", post.user_id}, {"text", doc->text}}.dump();
      },
      [&](std::optional<std::string>&& rec) {
        ++read;
        if (!rec) return;
        ++kept;
        out << *rec << '\n';
      });
  out.close();
  json counts{{"posts", read}, {"kept", kept}, {"dropped", read - kept}};
  return {counts, detail::write_manifest(cfg, "clean", {{"input", cfg.input}}, counts)};
}

// Adds a "words" array to each record.
inline CommandResult cmd_segment(const RunConfig& cfg) {
  detail::require_path(cfg.input, "input");
  detail::require_path(cfg.output, "output");
  const auto res = detail::load_resources(cfg, false);
  auto in = io::open_in(cfg.input);
  auto out = io::open_out(cfg.output);
  std::size_t docs = 0, words = 0;
  io::map_lines_ordered<std::pair<std::string, std::size_t>>(
      in, cfg.workers,
      [&](const std::string& line, std::size_t lineno) {
        auto rec = io::parse_record(line, lineno);
        SegmentedDoc doc;
        try {
          doc = segment_fmm(io::require_string(rec, "text", lineno), res.dict);
        } catch (const Utf8Error& e) {
          throw FormatError(e.what(), lineno);
        }
        rec["words"] = doc.words();
        return std::pair{rec.dump(), word_count(doc)};
      },
      [&](std::pair<std::string, std::size_t>&& r) {
        ++docs;
        words += r.second;
        out << r.first << '\n';
      });
  out.close();
  json counts{{"docs", docs}, {"words", words}};
  return {counts, detail::write_manifest(cfg, "segment",
                                         {{"input", cfg.input}, {"lexicon", cfg.lexicon}}, counts)};
}

// Segmented or plain-text documents -> fixed-length token chunks.
inline CommandResult cmd_chunk(const RunConfig& cfg) {
  detail::require_path(cfg.input, "input");
  detail::require_path(cfg.output, "output");
  const auto res = detail::load_resources(cfg, true);
  auto in = io::open_in(cfg.input);
  auto out = io::open_out(cfg.output);
  Chunker chunker(cfg.chunk_len);
  std::uint64_t doc_id = 0;
  std::size_t lexicon_groups = 0;
  io::map_lines_ordered<TokenizedDoc>(
      in, cfg.workers,
      [&](const std::string& line, std::size_t lineno) {
        auto rec = io::parse_record(line, lineno);
        return detail::prepare(detail::doc_from_record(rec, lineno, res.dict), res);
      },
      [&](TokenizedDoc&& doc) {
        chunker.push(doc, doc_id++, [&](TokenChunk&& c) {
          lexicon_groups += c.lexicon_groups.size();
          out << detail::chunk_json(c).dump() << '\n';
        });
      });
  const std::size_t dropped = chunker.finish();
  out.close();
  json counts{{"docs", doc_id},
              {"tokens", chunker.total_tokens()},
              {"chunks", chunker.chunks_emitted()},
              {"tokens_dropped", dropped},
              {"lexicon_groups", lexicon_groups}};
  return {counts, detail::write_manifest(cfg, "chunk",
                                         {{"input", cfg.input},
                                          {"vocab", cfg.vocab},
                                          {"lexicon", cfg.lexicon}},
                                         counts)};
}

// Chunk records (with "ids") or documents -> masked examples.
inline CommandResult cmd_mask(const RunConfig& cfg) {
  detail::require_path(cfg.input, "input");
  detail::require_path(cfg.output, "output");
  const auto res = detail::load_resources(cfg, true);
  auto in = io::open_in(cfg.input);
  auto out = io::open_out(cfg.output);
  detail::MaskingSink sink(cfg, *res.vocab, out);
  using Item = std::variant<TokenChunk, TokenizedDoc>;
  std::optional<bool> chunk_mode;
  io::map_lines_ordered<std::pair<Item, std::size_t>>(
      in, cfg.workers,
      [&](const std::string& line, std::size_t lineno) {
        auto rec = io::parse_record(line, lineno);
        if (rec.contains("ids")) return std::pair{Item{detail::chunk_from_json(rec, lineno)}, lineno};
        return std::pair{Item{detail::prepare(detail::doc_from_record(rec, lineno, res.dict), res)},
                         lineno};
      },
      [&](std::pair<Item, std::size_t>&& item) {
        const bool is_chunk = std::holds_alternative<TokenChunk>(item.first);
        if (!chunk_mode) chunk_mode = is_chunk;
        if (*chunk_mode != is_chunk) {
          throw FormatError("input mixes chunk records and documents", item.second);
        }
        if (is_chunk) {
          sink.add_chunk(std::get<TokenChunk>(std::move(item.first)));
        } else {
          sink.add_doc(std::get<TokenizedDoc>(item.first));
        }
      });
  json counts = sink.finish();
  out.close();
  return {counts, detail::write_manifest(cfg, "mask",
                                         {{"input", cfg.input},
                                          {"vocab", cfg.vocab},
                                          {"lexicon", cfg.lexicon}},
                                         counts)};
}

// Raw posts straight to masked examples: clean, filter, segment, chunk, mask.
inline CommandResult cmd_run(const RunConfig& cfg) {
  detail::require_path(cfg.input, "input");
  detail::require_path(cfg.output, "output");
  const auto rules = detail::cleaning_rules(cfg);
  const auto res = detail::load_resources(cfg, true);
  auto in = io::open_in(cfg.input);
  auto out = io::open_out(cfg.output);
  detail::MaskingSink sink(cfg, *res.vocab, out);
  std::size_t posts = 0, kept = 0;
  io::map_lines_ordered<std::optional<TokenizedDoc>>(
      in, cfg.workers,
      [&](const std::string& line, std::size_t lineno) -> std::optional<TokenizedDoc> {
        auto post = detail::parse_raw(line, lineno, cfg);
        auto doc = detail::clean_raw(post, rules, lineno);
        if (!doc) return std::nullopt;
        return detail::prepare(segment_fmm(doc->text, res.dict), res);
      },
      [&](std::optional<TokenizedDoc>&& doc) {
        ++posts;
        if (!doc) return;
        ++kept;
        sink.add_doc(*doc);
      });
  json counts = sink.finish();
  counts["posts"] = posts;
  counts["kept"] = kept;
  out.close();
  return {counts, detail::write_manifest(cfg, "run",
                                         {{"input", cfg.input},
                                          {"vocab", cfg.vocab},
                                          {"lexicon", cfg.lexicon}},
                                         counts)};
}

inline json stats_json(const CorpusStats& s) {
  json per = json::object();
  for (const auto& [name, src] : s.per_source) per[name] = {{"users", src.users}, {"posts", src.posts}};
  return json{{"per_source", per},
              {"total_users", s.total_users},
              {"total_posts", s.total_posts},
              {"kept_after_cleaning", s.kept_after_cleaning}};
}

inline CorpusStats compute_stats(std::istream& in, const RunConfig& cfg) {
  const auto rules = detail::cleaning_rules(cfg);
  StatsAccumulator acc;
  io::map_lines_ordered<std::pair<RawPost, bool>>(
      in, cfg.workers,
      [&](const std::string& line, std::size_t lineno) {
        auto post = detail::parse_raw(line, lineno, cfg);
        const bool keep = detail::clean_raw(post, rules, lineno).has_value();
        post.text.clear();
        return std::pair{std::move(post), keep};
      },
      [&](std::pair<RawPost, bool>&& r) {
        acc.add_post(r.first);
        if (r.second) acc.add_kept(CleanDoc{});
      },
      16384);
  return acc.finish();
}

// Per-source distinct users and post counts of a raw corpus.
inline CommandResult cmd_stats(const RunConfig& cfg) {
  detail::require_path(cfg.input, "input");
  auto in = io::open_in(cfg.input);
  const auto stats = compute_stats(in, cfg);
  const json doc = stats_json(stats);
  detail::emit_document(cfg, doc);
  json counts{{"total_users", stats.total_users}, {"total_posts", stats.total_posts}};
  return {counts, detail::write_manifest(cfg, "stats", {{"input", cfg.input}}, counts)};
}

// Grows the lexicon by label propagation over a PPMI word graph built from
// the input documents. Seeds are the lexicon's seed entries plus any words
// in --seeds; seeds that never occur in the corpus are reported and skipped.
inline CommandResult cmd_expand_lexicon(const RunConfig& cfg) {
  detail::require_path(cfg.input, "input");
  detail::require_path(cfg.output, "output");
  detail::require_path(cfg.lexicon, "lexicon");
  const auto res = detail::load_resources(cfg, false);
  std::set<std::string> seeds;
  for (auto& s : res.lexicon.seeds()) seeds.insert(s);
  if (!cfg.seeds.empty()) {
    for (auto& s : load_word_list(cfg.seeds)) seeds.insert(s);
  }

  CooccurrenceCounts counts(cfg.window);
  auto in = io::open_in(cfg.input);
  io::map_lines_ordered<SegmentedDoc>(
      in, cfg.workers,
      [&](const std::string& line, std::size_t lineno) {
        return detail::doc_from_record(io::parse_record(line, lineno), lineno, res.dict);
      },
      [&](SegmentedDoc&& doc) { counts.add(doc); });
  const auto graph = build_graph_from_counts(counts, cfg.min_weight);

  std::vector<std::string> present, missing;
  for (const auto& s : seeds) (graph.find(s) ? present : missing).push_back(s);
  for (const auto& s : missing) std::cerr << "lexmask: seed not in corpus graph: " << s << '\n';

  const auto prop = propagate_labels(graph, present, cfg.tol, cfg.max_iter);
  Lexicon base = res.lexicon;
  for (const auto& s : seeds) {
    if (!base.contains(s)) base.add(s, {1.0, true});
  }
  const auto expanded = expand_lexicon(base, prop.scores, cfg.cutoff);

  auto out = io::open_out(cfg.output);
  write_lexicon(out, expanded);
  out.close();
  json c{{"nodes", graph.node_count()},
         {"edges", graph.edge_count()},
         {"seeds_used", present.size()},
         {"seeds_missing", missing},
         {"iterations", prop.iterations},
         {"converged", prop.converged},
         {"entries_before", base.size()},
         {"entries_after", expanded.size()}};
  return {c, detail::write_manifest(cfg, "expand-lexicon",
                                    {{"input", cfg.input},
                                     {"lexicon", cfg.lexicon},
                                     {"seeds", cfg.seeds}},
                                    c)};
}

inline json probe_json(const Probe& p) {
  return json{{"original", p.original},
              {"masked", p.masked},
              {"target", p.target},
              {"tokens", p.tokens},
              {"span", {p.span.start, p.span.len}}};
}

// Input lines are {"sentence", "target"} (or "start"/"len") records or
// "sentence<TAB>target".
inline CommandResult cmd_probe(const RunConfig& cfg) {
  detail::require_path(cfg.input, "input");
  auto in = io::open_in(cfg.input);
  std::ostringstream buf;
  std::size_t probes = 0;
  io::map_lines_ordered<std::string>(
      in, 1,
      [&](const std::string& line, std::size_t lineno) {
        Probe p;
        try {
          if (line.front() == '{') {
            auto rec = io::parse_record(line, lineno);
            const auto sentence = io::require_string(rec, "sentence", lineno);
            if (rec.contains("start")) {
              p = make_probe(sentence, WordSpan{rec.at("start").get<std::size_t>(),
                                                rec.value("len", std::size_t{0})});
            } else {
              p = make_probe(sentence, io::require_string(rec, "target", lineno));
            }
          } else {
            auto tab = line.find('\t');
            if (tab == std::string::npos) throw FormatError("expected sentence<TAB>target", lineno);
            p = make_probe(line.substr(0, tab), line.substr(tab + 1));
          }
        } catch (const ValidationError& e) {
          throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
        } catch (const json::exception& e) {
          throw FormatError(e.what(), lineno);
        }
        return probe_json(p).dump();
      },
      [&](std::string&& rec) {
        ++probes;
        buf << rec << '\n';
      });
  if (detail::to_stdout(cfg)) {
    std::cout << buf.str();
  } else {
    auto out = io::open_out(cfg.output);
    out << buf.str();
  }
  json counts{{"probes", probes}};
  return {counts, detail::write_manifest(cfg, "probe", {{"input", cfg.input}}, counts)};
}

inline json report_json(const EvalReport& r) {
  json per = json::object();
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    const auto& k = r.per_class[c];
    const auto s = scores_from(k.tp, k.fp, k.fn);
    per[r.classes[c]] = {{"tp", k.tp}, {"fp", k.fp}, {"fn", k.fn},
                         {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
  }
  return json{{"averaging", to_string(r.averaging)},
              {"classes", r.classes},
              {"per_class", per},
              {"samples", r.samples},
              {"precision", r.scores.precision},
              {"recall", r.scores.recall},
              {"f1", r.scores.f1}};
}

// Scores a predictions file. Records carrying a "fold" field are also
// scored per fold, with the unweighted mean over folds reported.
inline CommandResult cmd_eval(const RunConfig& cfg) {
  detail::require_path(cfg.input, "input");
  const Averaging averaging = parse_averaging(cfg.averaging);
  struct Row {
    SampleLabels gold, pred;
    std::optional<std::string> fold;
  };
  std::vector<Row> rows;
  auto in = io::open_in(cfg.input);
  io::map_lines_ordered<Row>(
      in, cfg.workers,
      [&](const std::string& line, std::size_t lineno) {
        auto rec = io::parse_record(line, lineno);
        auto labels = [&](const char* key) {
          auto it = rec.find(key);
          if (it == rec.end()) throw FormatError(std::string("missing \"") + key + "\"", lineno);
          SampleLabels out;
          if (it->is_array()) {
            for (const auto& v : *it) out.push_back(io::label_text(v));
          } else {
            out.push_back(io::label_text(*it));
          }
          return out;
        };
        Row row{labels("gold"), labels("pred"), std::nullopt};
        if (auto it = rec.find("fold"); it != rec.end()) row.fold = io::label_text(*it);
        return row;
      },
      [&](Row&& r) { rows.push_back(std::move(r)); });

  std::vector<std::string> classes = cfg.labels;
  bool multi = false;
  if (classes.empty()) {
    std::set<std::string> seen;
    for (const auto& r : rows) {
      seen.insert(r.gold.begin(), r.gold.end());
      seen.insert(r.pred.begin(), r.pred.end());
    }
    classes.assign(seen.begin(), seen.end());
  }
  for (const auto& r : rows) multi = multi || r.gold.size() != 1 || r.pred.size() != 1;
  const LabelSet labels(classes, multi);
  std::size_t positive = 1;
  if (!cfg.positive.empty()) positive = labels.index_of(cfg.positive);

  auto score = [&](const std::vector<const Row*>& subset) {
    std::vector<SampleLabels> g, p;
    for (const auto* r : subset) {
      g.push_back(r->gold);
      p.push_back(r->pred);
    }
    return evaluate(g, p, labels, averaging, positive);
  };
  std::vector<const Row*> all;
  std::map<std::string, std::vector<const Row*>> by_fold;
  for (const auto& r : rows) {
    all.push_back(&r);
    if (r.fold) by_fold[*r.fold].push_back(&r);
  }
  const auto overall = score(all);
  json doc = report_json(overall);
  doc["multi_label"] = multi;
  if (!by_fold.empty()) {
    json folds = json::object();
    Scores mean;
    for (const auto& [name, subset] : by_fold) {
      const auto rep = score(subset);
      folds[name] = report_json(rep);
      mean.precision += rep.scores.precision;
      mean.recall += rep.scores.recall;
      mean.f1 += rep.scores.f1;
    }
    const double k = static_cast<double>(by_fold.size());
    doc["folds"] = folds;
    doc["fold_mean"] = {{"precision", mean.precision / k},
                        {"recall", mean.recall / k},
                        {"f1", mean.f1 / k}};
  }
  detail::emit_document(cfg, doc);
  json counts{{"samples", rows.size()}, {"f1", overall.scores.f1}};
  return {counts, detail::write_manifest(cfg, "eval", {{"input", cfg.input}}, counts)};
}

// Fold assignment for cross-validation over --n samples, or over the
// non-blank lines of --input when --n is 0.
inline CommandResult cmd_folds(const RunConfig& cfg) {
  std::size_t n = cfg.n;
  if (n == 0) {
    detail::require_path(cfg.input, "input");
    auto in = io::open_in(cfg.input);
    std::string line;
    while (std::getline(in, line)) n += line.find_first_not_of(" \t\r") != std::string::npos;
  }
  const auto folds = kfold_split(n, cfg.folds, cfg.seed);
  json doc{{"n", n}, {"k", cfg.folds}, {"seed", cfg.seed}, {"folds", folds}};
  detail::emit_document(cfg, doc);
  json counts{{"n", n}, {"k", cfg.folds}};
  return {counts, detail::write_manifest(cfg, "folds", {{"input", cfg.n ? "" : cfg.input}}, counts)};
}

// Dataset shape: split sizes, class count, mean labels and mean words per
// sample. Records are {"split", "labels" | "label", "text"}.
inline CommandResult cmd_summary(const RunConfig& cfg) {
  detail::require_path(cfg.input, "input");
  const auto res = detail::load_resources(cfg, false);
  std::vector<LabeledSample> samples;
  auto in = io::open_in(cfg.input);
  io::map_lines_ordered<LabeledSample>(
      in, cfg.workers,
      [&](const std::string& line, std::size_t lineno) {
        auto rec = io::parse_record(line, lineno);
        LabeledSample s;
        try {
          s.split = parse_split(io::require_string(rec, "split", lineno));
        } catch (const ValidationError& e) {
          throw FormatError(e.what(), lineno);
        }
        s.text = io::require_string(rec, "text", lineno);
        if (auto it = rec.find("labels"); it != rec.end() && it->is_array()) {
          for (const auto& v : *it) s.labels.push_back(io::label_text(v));
        } else if (auto it2 = rec.find("label"); it2 != rec.end()) {
          s.labels.push_back(io::label_text(*it2));
        } else {
          throw FormatError("missing \"labels\" or \"label\"", lineno);
        }
        return s;
      },
      [&](LabeledSample&& s) { samples.push_back(std::move(s)); });
  const auto sum = dataset_summary(samples, res.dict);
  json doc{{"n_train", sum.n_train}, {"n_val", sum.n_val},   {"n_test", sum.n_test},
           {"C", sum.num_classes},   {"C_bar", sum.mean_labels}, {"W_bar", sum.mean_words}};
  detail::emit_document(cfg, doc);
  return {doc, detail::write_manifest(cfg, "summary", {{"input", cfg.input}}, doc)};
}

}  // namespace lexmask::cli
