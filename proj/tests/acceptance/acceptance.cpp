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

// Acceptance suite: one [PASS]/[FAIL] line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lexmask/commands.hpp"
#include "lexmask/lexmask.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace {

using namespace lexmask;
using nlohmann::json;
using testing_support::read_file;
using testing_support::TempDir;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void check(int id, const char* name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] AC%d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  std::fflush(stdout);
}

unsigned hw_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Synthetic corpus world: a CJK alphabet, dictionary, lexicon and vocab.
struct World {
  std::vector<std::string> alphabet;
  std::vector<std::string> dict_words, lex_words;
  Lexicon lexicon;
  SegmentDict dict;
  Vocab vocab;
};

World make_world(std::uint64_t seed) {
  World w;
  std::mt19937_64 rng(seed);
  for (char32_t c = 0x4E00; c < 0x4E00 + 300; ++c) w.alphabet.push_back(utf8::encode(c));
  std::uniform_int_distribution<std::size_t> pick(0, w.alphabet.size() - 1), len(2, 4);
  auto word = [&] {
    std::string s;
    for (std::size_t n = len(rng); n > 0; --n) s += w.alphabet[pick(rng)];
    return s;
  };
  std::set<std::string> dict;
  while (dict.size() < 2000) dict.insert(word());
  w.dict_words.assign(dict.begin(), dict.end());
  std::set<std::string> lex;
  while (lex.size() < 200) {
    auto s = word();
    if (!dict.count(s)) lex.insert(s);
  }
  w.lex_words.assign(lex.begin(), lex.end());
  std::size_t i = 0;
  for (const auto& s : w.lex_words) {
    const bool seed_word = i++ < 40;
    w.lexicon.add(s, {seed_word ? 1.0 : 0.5 + 0.002 * static_cast<double>(i), seed_word});
  }
  w.dict = build_dict(w.dict_words, w.lexicon);
  auto tokens = testing_support::vocab_tokens();
  tokens.resize(5);
  tokens.insert(tokens.end(), w.alphabet.begin(), w.alphabet.end());
  w.vocab = Vocab::from_tokens(tokens);
  return w;
}

// Text of about n characters built from lexicon words (rate p_lex),
// dictionary words and loose characters.
std::string synth_text(const World& w, std::mt19937_64& rng, std::size_t n, double p_lex) {
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<std::size_t> a(0, w.alphabet.size() - 1),
      d(0, w.dict_words.size() - 1), l(0, w.lex_words.size() - 1);
  std::string s;
  std::size_t chars = 0;
  while (chars < n) {
    const double r = u(rng);
    const std::string& piece =
        r < p_lex ? w.lex_words[l(rng)] : r < p_lex + 0.55 ? w.dict_words[d(rng)] : w.alphabet[a(rng)];
    s += piece;
    chars += utf8::length(piece);
  }
  return s;
}

void write_world(const World& w, const TempDir& dir) {
  std::ofstream dict(dir.file("dict.txt"));
  for (const auto& s : w.dict_words) dict << s << '\n';
  std::ofstream lex(dir.file("lexicon.tsv"));
  write_lexicon(lex, w.lexicon);
  std::ofstream vocab(dir.file("vocab.txt"));
  for (std::size_t i = 0; i < w.vocab.size(); ++i) vocab << w.vocab.token(static_cast<TokenId>(i)) << '\n';
}

// Raw JSONL posts with URLs, mentions, hashtags and some too-short lines.
std::string synth_posts(const World& w, std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(4, 60), noise(0, 9);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string text = synth_text(w, rng, len(rng), 0.04);
    switch (noise(rng)) {
      case 0: text += " http://t.cn/A" + std::to_string(i); break;
      case 1: text = "@用户" + std::to_string(i % 97) + " " + text; break;
      case 2: text = "#话题#" + text; break;
      case 3: text = w.alphabet[i % w.alphabet.size()]; break;
      default: break;
    }
    out += json{{"source", "src" + std::to_string(i % 4)}, {"user", std::to_string(i % 5003)},
                {"text", text}}
               .dump();
    out += '\n';
  }
  return out;
}

cli::RunConfig world_config(const TempDir& dir) {
  cli::RunConfig cfg;
  cfg.dicts = {dir.file("dict.txt")};
  cfg.lexicon = dir.file("lexicon.tsv");
  cfg.vocab = dir.file("vocab.txt");
  cfg.seed = 20240607;
  return cfg;
}

// clean -> segment -> chunk -> mask through the command layer; returns
// the masked dataset path.
std::string staged_pipeline(cli::RunConfig cfg, const std::string& raw, const std::string& tag) {
  const auto base = raw + "." + tag;
  cfg.input = raw;
  cfg.output = base + ".clean.jsonl";
  cli::cmd_clean(cfg);
  cfg.input = cfg.output;
  cfg.output = base + ".seg.jsonl";
  cli::cmd_segment(cfg);
  cfg.input = cfg.output;
  cfg.output = base + ".chunks.jsonl";
  cli::cmd_chunk(cfg);
  cfg.input = cfg.output;
  cfg.output = base + ".masked.jsonl";
  cli::cmd_mask(cfg);
  return cfg.output;
}

// ---- criteria 1 to 4 share one set of 10,000 chunks ----

struct MaskingRun {
  std::vector<TokenChunk> chunks;
  std::vector<MaskedExample> examples;
  // Word boundaries of the source documents, indexed by stream position.
  std::vector<char> word_start, word_end;
  double seconds = 0;
};

MaskingRun masking_run(const World& w) {
  MaskingRun run;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> len(20, 200);
  const double rates[] = {0.0, 0.02, 0.05, 0.12, 0.4};
  Chunker chunker(128);
  std::uint64_t doc_id = 0;
  while (run.chunks.size() < 10000) {
    const auto doc = segment_fmm(synth_text(w, rng, len(rng), rates[doc_id % 5]), w.dict);
    const auto tok = tokenize(doc, w.vocab, find_lexicon_words(doc, w.lexicon, doc_id));
    const std::size_t base = run.word_start.size();
    run.word_start.resize(base + tok.ids.size());
    run.word_end.resize(base + tok.ids.size());
    for (const auto& g : tok.groups) {
      run.word_start[base + g.start] = 1;
      run.word_end[base + g.end() - 1] = 1;
    }
    chunker.push(tok, doc_id++, [&](TokenChunk&& c) {
      if (run.chunks.size() < 10000) run.chunks.push_back(std::move(c));
    });
  }
  MaskPolicy policy;
  policy.rng_seed = 31337;
  run.examples.resize(run.chunks.size());
  parallel_for(run.chunks.size(), hw_workers(), [&](std::size_t i) {
    run.examples[i] = apply_masks(run.chunks[i], plan_masks(run.chunks[i], policy), policy, w.vocab);
  });
  run.seconds = seconds_since(t0);
  return run;
}

Outcome ac1_budget(const MaskingRun& run) {
  const std::size_t t = mask_threshold(128, 0.20);
  std::size_t under = 0, overshoot = 0, topped = 0, saturated = 0, excess = 0;
  for (std::size_t i = 0; i < run.chunks.size(); ++i) {
    const auto& c = run.chunks[i];
    const auto& plan = run.examples[i].plan;
    std::size_t lex = 0, longest = 0;
    for (auto g : c.lexicon_groups) lex += c.word_groups[g].len;
    for (const auto& g : c.word_groups) longest = std::max(longest, g.len);
    const std::size_t masked = plan.masked_positions.size();
    if (masked < t) ++under;
    if (lex < t) {
      ++topped;
      if (masked > t + longest - 1) ++overshoot;
    } else {
      ++saturated;
      if (masked != lex) ++excess;
    }
  }
  Outcome o;
  o.pass = t == 26 && under == 0 && overshoot == 0 && excess == 0 && run.seconds < 10.0;
  o.detail = fmt("%zu chunks, T=%zu, under=%zu, overshoot=%zu, extra-beyond-lexicon=%zu "
                 "(%zu topped up, %zu lexicon-saturated), %.2fs",
                 run.chunks.size(), t, under, overshoot, excess, topped, saturated, run.seconds);
  return o;
}

Outcome ac2_lexicon(const World& w, const MaskingRun& run) {
  // A group counts as a lexicon occurrence when it is flagged, or when it
  // is a whole source word whose characters spell a lexicon entry.
  std::size_t flagged = 0, spelled = 0, violations = 0, missed = 0;
  for (std::size_t i = 0; i < run.chunks.size(); ++i) {
    const auto& c = run.chunks[i];
    const auto& ex = run.examples[i];
    const std::size_t offset = i * c.ids.size();
    std::set<std::size_t> flags(c.lexicon_groups.begin(), c.lexicon_groups.end());
    for (std::size_t g = 0; g < c.word_groups.size(); ++g) {
      const auto& span = c.word_groups[g];
      const bool whole = run.word_start[offset + span.start] && run.word_end[offset + span.end() - 1];
      std::string text;
      for (std::size_t p = span.start; p < span.end(); ++p) text += w.vocab.token(c.ids[p]);
      const bool is_word = whole && w.lexicon.contains(text);
      missed += is_word && !flags.count(g);
      if (!is_word && !flags.count(g)) continue;
      flagged += flags.count(g);
      spelled += is_word;
      for (std::size_t p = span.start; p < span.end(); ++p) {
        if (ex.labels[p] == kIgnoreLabel) {
          ++violations;
          break;
        }
      }
    }
  }
  Outcome o;
  o.pass = violations == 0 && missed == 0 && spelled > 0;
  o.detail = fmt("%zu flagged groups, %zu whole lexicon words re-found from token ids, %zu unflagged, "
                 "%zu unmasked",
                 flagged, spelled, missed, violations);
  return o;
}

Outcome ac3_atomicity(const MaskingRun& run) {
  std::size_t groups = 0, partial = 0, stray = 0;
  for (std::size_t i = 0; i < run.chunks.size(); ++i) {
    const auto& c = run.chunks[i];
    const auto& ex = run.examples[i];
    for (const auto& g : c.word_groups) {
      std::size_t hit = 0;
      for (std::size_t p = g.start; p < g.end(); ++p) hit += ex.labels[p] != kIgnoreLabel;
      partial += hit != 0 && hit != g.len;
      ++groups;
    }
    for (std::size_t p = 0; p < c.ids.size(); ++p) {
      if (ex.labels[p] == kIgnoreLabel && ex.input_ids[p] != c.ids[p]) ++stray;
    }
  }
  return {partial == 0 && stray == 0,
          fmt("%zu groups, %zu partially masked, %zu unlabelled positions altered", groups, partial,
              stray)};
}

Outcome ac4_replacement(const MaskingRun& run) {
  std::size_t n[3] = {0, 0, 0}, total = 0;
  for (const auto& ex : run.examples) {
    for (auto r : ex.replacements) ++n[static_cast<int>(r)], ++total;
  }
  const double f[3] = {double(n[0]) / double(total), double(n[1]) / double(total),
                       double(n[2]) / double(total)};
  const bool ok = total >= 10000 && std::abs(f[0] - 0.8) <= 0.02 && std::abs(f[1] - 0.1) <= 0.02 &&
                  std::abs(f[2] - 0.1) <= 0.02;
  return {ok, fmt("%zu positions: mask %.4f, random %.4f, keep %.4f", total, f[0], f[1], f[2])};
}

// ---- remaining criteria ----

Outcome ac5_determinism(const World& w) {
  TempDir dir("ac5");
  write_world(w, dir);
  const auto raw = dir.file("raw.jsonl");
  testing_support::write_file(raw, synth_posts(w, 5, 20000));
  auto cfg = world_config(dir);

  std::vector<std::pair<std::string, std::string>> outputs;
  for (const auto& [tag, workers] : std::vector<std::pair<std::string, unsigned>>{
           {"w1a", 1}, {"w1b", 1}, {"w8", 8}}) {
    cfg.workers = workers;
    outputs.emplace_back(tag, read_file(staged_pipeline(cfg, raw, tag)));
  }
  for (unsigned workers : {1u, 8u}) {
    cfg.workers = workers;
    cfg.input = raw;
    cfg.output = dir.file("run" + std::to_string(workers) + ".jsonl");
    cli::cmd_run(cfg);
    outputs.emplace_back("run" + std::to_string(workers), read_file(cfg.output));
  }
  std::size_t differ = 0;
  for (const auto& [tag, text] : outputs) differ += text != outputs.front().second;
  const auto lines = std::count(outputs.front().second.begin(), outputs.front().second.end(), '\n');
  return {differ == 0 && lines > 0,
          fmt("%zu runs (staged x3 incl. 8 workers, one-pass x2), %ld masked chunks, %zu differing, "
              "sha256 %.16s...",
              outputs.size(), static_cast<long>(lines), differ,
              io::sha256(outputs.front().second).c_str())};
}

Outcome ac6_corpus_stats() {
  struct Src {
    const char* name;
    std::size_t users, posts;
  };
  const Src table[] = {{"Zoufan", 351069, 2346879},
                       {"Chaohua", 69102, 504072},
                       {"SWDD", 3711, 785689},
                       {"WU3D", 10325, 408797}};
  TempDir dir("ac6");
  const auto t0 = Clock::now();
  {
    std::ofstream out(dir.file("corpus.jsonl"), std::ios::binary);
    for (const auto& s : table) {
      const std::string head = std::string("{\"source\":\"") + s.name + "\",\"user\":\"u";
      for (std::size_t i = 0; i < s.posts; ++i) {
        out << head << i % s.users << "\",\"text\":\"今天心情不好\"}\n";
      }
    }
  }
  cli::RunConfig cfg;
  cfg.input = dir.file("corpus.jsonl");
  cfg.output = dir.file("stats.json");
  cfg.workers = hw_workers();
  cli::cmd_stats(cfg);
  const auto doc = json::parse(read_file(cfg.output));
  bool ok = doc.at("total_users") == 434207 && doc.at("total_posts") == 4045437;
  for (const auto& s : table) {
    ok = ok && doc.at("per_source").at(s.name).at("users") == s.users &&
         doc.at("per_source").at(s.name).at("posts") == s.posts;
  }
  return {ok, fmt("total_users=%zu total_posts=%zu over 4 sources, %.1fs",
                  doc.at("total_users").get<std::size_t>(), doc.at("total_posts").get<std::size_t>(),
                  seconds_since(t0))};
}

Outcome ac7_probes() {
  TempDir dir("ac7");
  testing_support::write_file(dir.file("probes.jsonl"),
                              "{\"sentence\":\"经常责怪自己\",\"target\":\"责怪\"}\n"
                              "{\"sentence\":\"呼吸有困难\",\"target\":\"困难\"}\n"
                              "{\"sentence\":\"想到死亡的事\",\"target\":\"死亡\"}\n");
  cli::RunConfig cfg;
  cfg.input = dir.file("probes.jsonl");
  cfg.output = dir.file("out.jsonl");
  cli::cmd_probe(cfg);
  const std::vector<std::string> want = {"经常[MASK][MASK]自己", "呼吸有[MASK][MASK]",
                                         "想到[MASK][MASK]的事"};
  std::istringstream in(read_file(cfg.output));
  std::size_t match = 0, i = 0;
  for (std::string line; std::getline(in, line); ++i) {
    match += i < want.size() && json::parse(line).at("masked") == want[i];
  }
  return {match == 3 && i == 3, fmt("%zu/3 masked sentences character-exact", match)};
}

Outcome ac8_segmentation() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> nwords(0, 50), wlen(1, 5), tlen(0, 64), asz(3, 19);
  std::size_t mismatch = 0, broken = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t a = asz(rng);
    std::vector<std::vector<std::string>> dict_chars;
    std::vector<std::string> words;
    for (std::size_t i = nwords(rng); i > 0; --i) {
      dict_chars.push_back(testing_support::random_chars(rng, wlen(rng), a));
      words.push_back(testing_support::join(dict_chars.back()));
    }
    const auto text = testing_support::random_chars(rng, tlen(rng), a);
    const auto doc = segment_fmm(testing_support::join(text), build_dict(words));
    mismatch += doc.words() != oracle::greedy_longest_match(text, dict_chars);
    std::size_t next = 0;
    bool ok = true;
    for (const auto& s : doc.word_spans) {
      ok = ok && s.start == next && s.len >= 1;
      next = s.end();
    }
    broken += !(ok && next == text.size());
  }
  return {mismatch == 0 && broken == 0,
          fmt("1000 pairs, %zu oracle mismatches, %zu partition failures", mismatch, broken)};
}

Outcome ac9_metrics() {
  std::mt19937_64 rng(9);
  std::bernoulli_distribution coin(0.3);
  std::uniform_int_distribution<std::size_t> ncls(2, 6), len(1, 50);
  std::size_t compared = 0, off = 0, micro_acc_bad = 0, single = 0;
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::string> cls;
    for (std::size_t c = (t % 4 == 0) ? 2 : ncls(rng); c > 0; --c) cls.push_back("k" + std::to_string(c));
    const bool multi = t % 3 == 2;
    const LabelSet labels(cls, multi);
    std::uniform_int_distribution<std::size_t> pick(0, cls.size() - 1);
    std::vector<SampleLabels> g, p;
    std::size_t hits = 0;
    for (std::size_t i = len(rng); i > 0; --i) {
      SampleLabels a, b;
      if (multi) {
        for (const auto& c : cls) {
          if (coin(rng)) a.push_back(c);
          if (coin(rng)) b.push_back(c);
        }
      } else {
        a = {cls[pick(rng)]};
        b = {cls[pick(rng)]};
        hits += a == b;
      }
      g.push_back(a);
      p.push_back(b);
    }
    std::vector<std::pair<Averaging, std::size_t>> modes = {{Averaging::kMacro, 1}, {Averaging::kMicro, 1}};
    if (cls.size() == 2) modes.push_back({Averaging::kBinary, t % 2});
    for (const auto& [avg, pos] : modes) {
      const auto got = evaluate(g, p, labels, avg, pos).scores;
      const auto want = oracle::brute_force_prf(g, p, cls, std::string(to_string(avg)), pos);
      const double d = std::max({std::abs(got.precision - want.p), std::abs(got.recall - want.r),
                                 std::abs(got.f1 - want.f)});
      worst = std::max(worst, d);
      off += d > 1e-12;
      ++compared;
    }
    if (!multi) {
      ++single;
      const auto micro = evaluate(g, p, labels, Averaging::kMicro).scores;
      micro_acc_bad += std::abs(micro.f1 - double(hits) / double(g.size())) > 1e-12;
    }
  }
  return {off == 0 && micro_acc_bad == 0,
          fmt("%zu comparisons over 1000 sets, %zu beyond 1e-12 (max diff %.2e); micro=accuracy "
              "failures %zu/%zu",
              compared, off, worst, micro_acc_bad, single)};
}

Outcome ac10_propagation() {
  std::mt19937_64 rng(10);
  std::size_t oracle_off = 0, small = 0;
  double worst = 0;
  for (int t = 0; t < 300; ++t) {
    auto r = testing_support::random_graph(rng, 6);
    const auto got = propagate_labels(r.graph, r.seeds, 1e-13, 100000);
    const auto want = oracle::dense_propagation(r.dense, r.seed, 1e-13, 100000, nullptr);
    for (std::size_t i = 0; i < want.size(); ++i) {
      const double d = std::abs(got.scores.at(r.graph.nodes()[i]) - want[i]);
      worst = std::max(worst, d);
      oracle_off += d > 1e-9;
    }
    ++small;
  }
  std::size_t bounds = 0, clamp = 0, unconverged = 0;
  const std::size_t max_iter = 10000;
  for (int t = 0; t < 100; ++t) {
    auto r = testing_support::random_graph(rng, 20);
    for (std::size_t cap = 1; cap <= 12; ++cap) {
      const auto partial = propagate_labels(r.graph, r.seeds, 1e-9, cap);
      for (const auto& [word, f] : partial.scores) bounds += f < 0.0 || f > 1.0;
      for (const auto& s : r.seeds) clamp += partial.scores.at(s) != 1.0;
    }
    const auto full = propagate_labels(r.graph, r.seeds, 1e-9, max_iter);
    unconverged += !full.converged || full.iterations > max_iter;
  }
  return {oracle_off == 0 && bounds == 0 && clamp == 0 && unconverged == 0,
          fmt("%zu small graphs vs dense oracle (max diff %.2e); 100 graphs: %zu bound, %zu clamp "
              "violations, %zu not converged within %zu",
              small, worst, bounds, clamp, unconverged, max_iter)};
}

Outcome ac11_throughput(const World& w) {
  TempDir dir("ac11");
  write_world(w, dir);
  const auto raw = dir.file("raw.jsonl");
  testing_support::write_file(raw, synth_posts(w, 11, 100000));
  auto cfg = world_config(dir);
  cfg.workers = hw_workers();
  const auto t0 = Clock::now();
  const auto out = staged_pipeline(cfg, raw, "tp");
  const double secs = seconds_since(t0);
  const auto text = read_file(out);
  const auto chunks = std::count(text.begin(), text.end(), '\n');
  return {secs < 60.0 && chunks > 0,
          fmt("100000 posts -> %ld chunks in %.2fs with %u worker(s)", static_cast<long>(chunks), secs,
              cfg.workers)};
}

}  // namespace

int main() {
  const World world = make_world(2024);
  const auto run = masking_run(world);
  check(1, "masking budget", [&] { return ac1_budget(run); });
  check(2, "lexicon priority", [&] { return ac2_lexicon(world, run); });
  check(3, "whole-word atomicity", [&] { return ac3_atomicity(run); });
  check(4, "replacement policy", [&] { return ac4_replacement(run); });
  check(5, "determinism", [&] { return ac5_determinism(world); });
  check(6, "corpus statistics totals", ac6_corpus_stats);
  check(7, "probe sentences", ac7_probes);
  check(8, "segmentation oracle", ac8_segmentation);
  check(9, "metrics oracle", ac9_metrics);
  check(10, "label propagation", ac10_propagation);
  check(11, "throughput", [&] { return ac11_throughput(world); });
  std::printf("%d of 11 criteria failed\n", failures);
  return failures;
}
