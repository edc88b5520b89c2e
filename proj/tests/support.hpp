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

// Random generators and fixtures shared by the unit and acceptance suites.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "lexmask/chunker.hpp"
#include "lexmask/lexicon.hpp"
#include "lexmask/propagation.hpp"

namespace testing_support {

namespace fs = std::filesystem;

// A small pool of CJK characters plus a few ASCII letters and digits.
inline const std::vector<std::string>& alphabet() {
  static const std::vector<std::string> a = {"我", "你", "很", "难", "过", "抑", "郁", "崩",
                                             "溃", "绝", "望", "好", "的", "了", "心", "情",
                                             "a", "b", "7"};
  return a;
}

inline std::vector<std::string> random_chars(std::mt19937_64& rng, std::size_t n,
                                             std::size_t alphabet_size) {
  std::uniform_int_distribution<std::size_t> pick(0, alphabet_size - 1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(alphabet()[pick(rng)]);
  return out;
}

inline std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (const auto& p : parts) s += p;
  return s;
}

// Vocab with the five special tokens followed by `alphabet()` and some
// filler tokens, so random replacement has a realistic pool.
inline std::vector<std::string> vocab_tokens() {
  std::vector<std::string> t = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
  for (const auto& c : alphabet()) t.push_back(c);
  for (const char* c : {"吗", "是", "不", "想", "死", "亡", "事", "到", "经", "常", "责", "怪",
                        "自", "己", "呼", "吸", "有", "困", "看", "小", "明", "天", "今"}) {
    t.push_back(c);
  }
  return t;
}

inline lexmask::Vocab test_vocab() { return lexmask::Vocab::from_tokens(vocab_tokens()); }

// Random chunk of `length` tokens cut into groups of 1..max_group tokens,
// with each group flagged lexicon with probability p_lex.
inline lexmask::TokenChunk random_chunk(std::mt19937_64& rng, std::uint64_t id,
                                        std::size_t length, std::size_t max_group,
                                        double p_lex) {
  lexmask::TokenChunk c;
  c.chunk_id = id;
  std::uniform_int_distribution<std::size_t> glen(1, max_group);
  std::uniform_int_distribution<lexmask::TokenId> tok(5, 40);
  std::bernoulli_distribution lex(p_lex);
  while (c.ids.size() < length) {
    const std::size_t n = std::min(glen(rng), length - c.ids.size());
    if (lex(rng)) c.lexicon_groups.push_back(c.word_groups.size());
    c.word_groups.push_back({c.ids.size(), n});
    for (std::size_t k = 0; k < n; ++k) c.ids.push_back(tok(rng));
  }
  return c;
}

// Random weighted undirected graph with node 0 always a seed; `dense` is
// the same graph as an adjacency matrix.
struct RandomGraph {
  std::vector<std::vector<double>> dense;
  lexmask::AssociationGraph graph;
  std::vector<bool> seed;
  std::vector<std::string> seeds;
};

inline RandomGraph random_graph(std::mt19937_64& rng, std::size_t max_nodes) {
  std::uniform_int_distribution<std::size_t> nn(2, max_nodes);
  std::uniform_real_distribution<double> w(0.05, 3.0);
  std::bernoulli_distribution edge(0.45), is_seed(0.25);
  const std::size_t n = nn(rng);
  RandomGraph r;
  r.dense.assign(n, std::vector<double>(n, 0.0));
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("n" + std::to_string(10 + i));
  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!edge(rng)) continue;
      const double x = w(rng);
      r.dense[i][j] = r.dense[j][i] = x;
      edges.emplace_back(names[i], names[j], x);
    }
  }
  r.seed.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || is_seed(rng)) {
      r.seed[i] = true;
      r.seeds.push_back(names[i]);
    }
  }
  r.graph = lexmask::AssociationGraph::from_edges(names, edges);
  return r;
}

inline void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fresh scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("lexmask_" + tag + "_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

}  // namespace testing_support
