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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexmask/document.hpp"
#include "lexmask/error.hpp"
#include "lexmask/segment.hpp"
#include "lexmask/utf8.hpp"

namespace lexmask {

// Undirected weighted word graph. Node ids are positions in nodes(),
// which is sorted.
class AssociationGraph {
 public:
  struct Edge {
    std::size_t to;
    double weight;
  };

  // Builds a graph from an explicit edge list. Parallel edges accumulate.
  static AssociationGraph from_edges(
      std::vector<std::string> nodes,
      const std::vector<std::tuple<std::string, std::string, double>>& edges) {
    AssociationGraph g;
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    g.init_nodes(std::move(nodes));
    for (const auto& [u, v, w] : edges) {
      auto iu = g.find(u), iv = g.find(v);
      if (!iu || !iv) throw ValidationError("edge references unknown node");
      g.add_edge(*iu, *iv, w);
    }
    return g;
  }

  std::optional<std::size_t> find(std::string_view word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Edge>& neighbors(std::size_t v) const { return adj_[v]; }
  double degree(std::size_t v) const { return degree_[v]; }

  double weight(std::size_t u, std::size_t v) const {
    for (const auto& e : adj_[u]) {
      if (e.to == v) return e.weight;
    }
    return 0.0;
  }

 private:
  template <typename Counts>
  friend AssociationGraph build_graph_from_counts(const Counts&, double);

  void init_nodes(std::vector<std::string> nodes) {
    nodes_ = std::move(nodes);
    adj_.assign(nodes_.size(), {});
    degree_.assign(nodes_.size(), 0.0);
    index_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i], i);
  }

  void add_edge(std::size_t u, std::size_t v, double w) {
    if (u == v) throw ValidationError("self-loop on '" + nodes_[u] + "'");
    if (!(w >= 0.0)) throw ValidationError("negative edge weight");
    auto bump = [&](std::size_t a, std::size_t b) {
      for (auto& e : adj_[a]) {
        if (e.to == b) {
          e.weight += w;
          return false;
        }
      }
      adj_[a].push_back({b, w});
      return true;
    };
    if (bump(u, v)) ++edge_count_;
    bump(v, u);
    degree_[u] += w;
    degree_[v] += w;
  }

  // Caller guarantees (u, v) is not yet an edge.
  void add_unique_edge(std::size_t u, std::size_t v, double w) {
    adj_[u].push_back({v, w});
    adj_[v].push_back({u, w});
    degree_[u] += w;
    degree_[v] += w;
    ++edge_count_;
  }

  std::vector<std::string> nodes_;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> index_;
  std::vector<std::vector<Edge>> adj_;
  std::vector<double> degree_;
  std::size_t edge_count_ = 0;
};

// Windowed co-occurrence counts over segmented documents. Whitespace spans
// are skipped; two words co-occur when at most `window` words apart.
class CooccurrenceCounts {
 public:
  explicit CooccurrenceCounts(std::size_t window) : window_(window) {
    if (window == 0) throw ValidationError("co-occurrence window must be >= 1");
  }

  void add(const SegmentedDoc& doc) {
    std::vector<std::uint32_t> seq;
    seq.reserve(doc.word_spans.size());
    for (std::size_t i = 0; i < doc.word_spans.size(); ++i) {
      auto w = doc.word(i);
      if (utf8::is_space(w)) continue;
      seq.push_back(intern(w));
    }
    for (std::size_t i = 0; i < seq.size(); ++i) {
      for (std::size_t j = i + 1; j <= i + window_ && j < seq.size(); ++j) {
        if (seq[i] != seq[j]) ++pairs_[key(seq[i], seq[j])];
      }
    }
  }

  // Folds another partition's counts into this one.
  void merge(const CooccurrenceCounts& other) {
    for (const auto& w : other.words_) intern(w);
    for (const auto& [k, c] : other.pairs_) {
      auto a = index_.at(other.words_[k >> 32]);
      auto b = index_.at(other.words_[k & 0xFFFFFFFFu]);
      pairs_[key(a, b)] += c;
    }
  }

  std::size_t window() const { return window_; }
  const std::vector<std::string>& words() const { return words_; }

  // Visits every unordered pair once as (word_a, word_b, count).
  template <typename F>
  void for_each_pair(F&& f) const {
    for (const auto& [k, c] : pairs_) {
      f(words_[k >> 32], words_[k & 0xFFFFFFFFu], c);
    }
  }

 private:
  static std::uint64_t key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t{a} << 32) | b;
  }

  std::uint32_t intern(std::string_view w) {
    auto it = index_.find(w);
    if (it != index_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(words_.size());
    words_.emplace_back(w);
    index_.emplace(words_.back(), id);
    return id;
  }

  std::size_t window_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> index_;
  std::unordered_map<std::uint64_t, std::uint64_t> pairs_;
};

// PPMI(u,v) = max(0, log(c(u,v) * D / (c(u) * c(v)))) where the count
// matrix is symmetric, c(u) is a row sum and D the sum of all cells.
// Edges with zero PPMI or weight below min_weight are omitted.
template <typename Counts>
AssociationGraph build_graph_from_counts(const Counts& counts,
                                         double min_weight) {
  std::vector<std::string> nodes = counts.words();
  std::sort(nodes.begin(), nodes.end());
  AssociationGraph g;
  g.init_nodes(std::move(nodes));

  std::vector<double> marginal(g.node_count(), 0.0);
  double total = 0.0;
  counts.for_each_pair([&](const std::string& a, const std::string& b,
                           std::uint64_t c) {
    marginal[*g.find(a)] += static_cast<double>(c);
    marginal[*g.find(b)] += static_cast<double>(c);
    total += 2.0 * static_cast<double>(c);
  });

  // Collect first so insertion order (and thus adjacency order) is fixed.
  std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
  counts.for_each_pair([&](const std::string& a, const std::string& b,
                           std::uint64_t c) {
    const auto u = *g.find(a), v = *g.find(b);
    const double pmi =
        std::log(static_cast<double>(c) * total / (marginal[u] * marginal[v]));
    if (pmi > 0.0 && pmi >= min_weight) {
      edges.emplace_back(std::min(u, v), std::max(u, v), pmi);
    }
  });
  std::sort(edges.begin(), edges.end());
  for (const auto& [u, v, w] : edges) g.add_unique_edge(u, v, w);
  return g;
}

template <typename Docs>
AssociationGraph build_association_graph(const Docs& corpus,
                                         std::size_t window,
                                         double min_weight) {
  CooccurrenceCounts counts(window);
  for (const SegmentedDoc& doc : corpus) counts.add(doc);
  return build_graph_from_counts(counts, min_weight);
}

struct PropagationResult {
  std::map<std::string, double, std::less<>> scores;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> residuals;  // max |F_{t+1} - F_t| per iteration
};

// Clamped label propagation: each non-seed takes the degree-normalized
// weighted mean of its neighbours' scores, seeds are reset to 1 after every
// sweep. Scores start at 1 for seeds and 0 elsewhere, so they stay in
// [0, 1]. Nodes without edges keep 0.
template <typename Seeds>
PropagationResult propagate_labels(const AssociationGraph& graph,
                                   const Seeds& seeds, double tol,
                                   std::size_t max_iter) {
  if (!(tol > 0.0)) throw ValidationError("propagate_labels: tol must be > 0");
  const std::size_t n = graph.node_count();
  std::vector<char> is_seed(n, 0);
  for (const auto& s : seeds) {
    auto id = graph.find(s);
    if (!id) throw ValidationError("seed not in graph: " + std::string(s));
    is_seed[*id] = 1;
  }

  std::vector<double> cur(n, 0.0), next(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) cur[v] = is_seed[v] ? 1.0 : 0.0;

  PropagationResult result;
  while (result.iterations < max_iter) {
    double residual = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (is_seed[v]) {
        next[v] = 1.0;
      } else if (graph.degree(v) > 0.0) {
        double acc = 0.0;
        for (const auto& e : graph.neighbors(v)) acc += e.weight * cur[e.to];
        next[v] = std::clamp(acc / graph.degree(v), 0.0, 1.0);
      } else {
        next[v] = 0.0;
      }
      residual = std::max(residual, std::abs(next[v] - cur[v]));
    }
    cur.swap(next);
    ++result.iterations;
    result.residuals.push_back(residual);
    if (residual < tol) {
      result.converged = true;
      break;
    }
  }
  for (std::size_t v = 0; v < n; ++v) result.scores.emplace(graph.nodes()[v], cur[v]);
  return result;
}

}  // namespace lexmask
