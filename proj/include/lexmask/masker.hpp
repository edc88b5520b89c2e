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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexmask/chunker.hpp"
#include "lexmask/document.hpp"
#include "lexmask/error.hpp"
#include "lexmask/rng.hpp"
#include "lexmask/utf8.hpp"

namespace lexmask {

inline constexpr TokenId kIgnoreLabel = -100;

struct MaskPolicy {
  double budget = 0.20;   // minimum masked fraction of a chunk
  double p_mask = 0.8;    // replace with [MASK]
  double p_random = 0.1;  // replace with a random regular token
  double p_keep = 0.1;    // leave unchanged
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (!(budget > 0.0 && budget < 1.0)) {
      throw ValidationError("mask budget must be in (0,1)");
    }
    if (p_mask < 0 || p_random < 0 || p_keep < 0 ||
        std::abs(p_mask + p_random + p_keep - 1.0) > 1e-9) {
      throw ValidationError("replacement probabilities must be >= 0 and sum to 1");
    }
  }
};

// Parses "mask:random:keep", e.g. "0.8:0.1:0.1".
inline void parse_replacement(std::string_view ratios, MaskPolicy& policy) {
  double parts[3];
  for (int i = 0; i < 3; ++i) {
    auto colon = ratios.find(':');
    if ((i < 2) == (colon == std::string_view::npos)) {
      throw ValidationError("policy must look like mask:random:keep");
    }
    auto field = ratios.substr(0, colon);
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), parts[i]);
    if (ec != std::errc() || p != field.data() + field.size()) {
      throw ValidationError("bad policy component '" + std::string(field) + "'");
    }
    ratios = colon == std::string_view::npos ? std::string_view{} : ratios.substr(colon + 1);
  }
  policy.p_mask = parts[0];
  policy.p_random = parts[1];
  policy.p_keep = parts[2];
  policy.validate();
}

// ceil(budget * length), tolerant of products such as 0.2 * 10 that land a
// rounding error above an integer.
inline std::size_t mask_threshold(std::size_t length, double budget) {
  return static_cast<std::size_t>(std::ceil(budget * static_cast<double>(length) - 1e-9));
}

struct MaskPlan {
  std::uint64_t chunk_id = 0;
  std::vector<std::size_t> masked_groups;     // sorted group indices
  std::vector<std::size_t> masked_positions;  // sorted token positions
  std::vector<std::size_t> lexicon_groups;    // sorted, subset of masked_groups
  bool operator==(const MaskPlan&) const = default;
};

enum class Replacement : std::uint8_t { kMask, kRandom, kKeep };

struct MaskedExample {
  std::vector<TokenId> input_ids;
  std::vector<TokenId> labels;
  MaskPlan plan;
  std::vector<Replacement> replacements;  // one per masked position
  bool operator==(const MaskedExample&) const = default;
};

namespace detail {
enum : std::uint64_t { kPlanStream = 1, kApplyStream = 2 };
}

// Selects the groups to mask in one chunk. Lexicon groups are always
// masked. While fewer than ceil(budget * L) positions are masked, further
// whole non-lexicon groups are drawn uniformly without replacement; drawing
// stops as soon as the threshold is reached. The draw order comes from a
// generator keyed by (policy.rng_seed, chunk_id) only.
inline MaskPlan plan_masks(const TokenChunk& chunk,
                           std::span<const std::size_t> lexicon_groups,
                           const MaskPolicy& policy) {
  policy.validate();
  const std::size_t ngroups = chunk.word_groups.size();
  MaskPlan plan;
  plan.chunk_id = chunk.chunk_id;

  std::vector<char> chosen(ngroups, 0);
  std::size_t masked = 0;
  for (std::size_t g : lexicon_groups) {
    if (g >= ngroups) {
      throw ValidationError("lexicon group " + std::to_string(g) +
                            " out of range for chunk " + std::to_string(chunk.chunk_id));
    }
    if (!chosen[g]) {
      chosen[g] = 1;
      masked += chunk.word_groups[g].len;
      plan.lexicon_groups.push_back(g);
    }
  }
  std::sort(plan.lexicon_groups.begin(), plan.lexicon_groups.end());

  const std::size_t threshold = mask_threshold(chunk.ids.size(), policy.budget);
  if (masked < threshold) {
    std::vector<std::size_t> pool;
    pool.reserve(ngroups);
    for (std::size_t g = 0; g < ngroups; ++g) {
      if (!chosen[g]) pool.push_back(g);
    }
    Rng rng(derive_seed(derive_seed(policy.rng_seed, chunk.chunk_id), detail::kPlanStream));
    std::size_t remaining = pool.size();
    while (masked < threshold && remaining > 0) {
      const std::size_t k = rng.below(remaining);
      const std::size_t g = pool[k];
      pool[k] = pool[--remaining];
      chosen[g] = 1;
      masked += chunk.word_groups[g].len;
    }
  }

  for (std::size_t g = 0; g < ngroups; ++g) {
    if (!chosen[g]) continue;
    plan.masked_groups.push_back(g);
    const auto& grp = chunk.word_groups[g];
    for (std::size_t p = grp.start; p < grp.end(); ++p) plan.masked_positions.push_back(p);
  }
  return plan;
}

inline MaskPlan plan_masks(const TokenChunk& chunk, const MaskPolicy& policy) {
  return plan_masks(chunk, chunk.lexicon_groups, policy);
}

// Applies per-position replacement to every planned position. Labels hold
// the original id at planned positions and kIgnoreLabel elsewhere.
inline MaskedExample apply_masks(const TokenChunk& chunk, const MaskPlan& plan,
                                 const MaskPolicy& policy, const Vocab& vocab) {
  policy.validate();
  if (policy.p_random > 0.0 && vocab.regular_ids().empty()) {
    throw ValidationError("random replacement needs at least one regular token");
  }
  MaskedExample ex;
  ex.input_ids = chunk.ids;
  ex.labels.assign(chunk.ids.size(), kIgnoreLabel);
  ex.plan = plan;
  ex.replacements.reserve(plan.masked_positions.size());

  Rng rng(derive_seed(derive_seed(policy.rng_seed, chunk.chunk_id), detail::kApplyStream));
  const auto& regular = vocab.regular_ids();
  for (std::size_t p : plan.masked_positions) {
    if (p >= chunk.ids.size()) throw ValidationError("plan position out of range");
    ex.labels[p] = chunk.ids[p];
    const double u = rng.uniform();
    if (u < policy.p_mask) {
      ex.input_ids[p] = vocab.mask_id();
      ex.replacements.push_back(Replacement::kMask);
    } else if (u < policy.p_mask + policy.p_random) {
      ex.input_ids[p] = regular[rng.below(regular.size())];
      ex.replacements.push_back(Replacement::kRandom);
    } else {
      ex.replacements.push_back(Replacement::kKeep);
    }
  }
  return ex;
}

inline constexpr std::string_view kMaskMarker = "[MASK]";

struct Probe {
  std::string original;
  std::string masked;
  std::string target;
  std::vector<std::string> tokens;  // per character, masked ones as [MASK]
  WordSpan span;                    // character span of the target
};

// Replaces each character of the span [start, start + len) with [MASK].
inline Probe make_probe(std::string_view sentence, WordSpan span) {
  auto chars = utf8::chars(sentence);
  if (span.len == 0 || span.end() > chars.size()) {
    throw ValidationError("probe span [" + std::to_string(span.start) + ", " +
                          std::to_string(span.end()) + ") out of bounds for " +
                          std::to_string(chars.size()) + " characters");
  }
  Probe probe;
  probe.original = std::string(sentence);
  probe.span = span;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    if (i >= span.start && i < span.end()) {
      probe.target += chars[i];
      probe.tokens.emplace_back(kMaskMarker);
    } else {
      probe.tokens.push_back(chars[i]);
    }
    probe.masked += probe.tokens.back();
  }
  return probe;
}

// Masks the first occurrence of `target`.
inline Probe make_probe(std::string_view sentence, std::string_view target) {
  const auto at = sentence.find(target);
  if (target.empty() || at == std::string_view::npos) {
    throw ValidationError("probe target '" + std::string(target) +
                          "' not found in '" + std::string(sentence) + "'");
  }
  return make_probe(sentence, WordSpan{utf8::length(sentence.substr(0, at)),
                                       utf8::length(target)});
}

}  // namespace lexmask
