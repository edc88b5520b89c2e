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
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexmask/error.hpp"
#include "lexmask/rng.hpp"
#include "lexmask/segment.hpp"

namespace lexmask {

class LabelSet {
 public:
  LabelSet(std::vector<std::string> classes, bool multi_label = false)
      : classes_(std::move(classes)), multi_label_(multi_label) {
    if (classes_.empty()) throw ValidationError("label set is empty");
    for (std::size_t i = 0; i < classes_.size(); ++i) {
      if (!index_.emplace(classes_[i], i).second) {
        throw ValidationError("duplicate class '" + classes_[i] + "'");
      }
    }
  }

  std::size_t index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw ValidationError("label '" + label + "' not in label set");
    return it->second;
  }

  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }
  bool multi_label() const { return multi_label_; }

 private:
  std::vector<std::string> classes_;
  std::map<std::string, std::size_t> index_;
  bool multi_label_;
};

// Gold or predicted labels of one sample; one element for single-label.
using SampleLabels = std::vector<std::string>;

struct ClassCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
  bool operator==(const ClassCounts&) const = default;
};

// Per-class counts, indexed like labels.classes(). Multi-label samples
// contribute one decision per (sample, class) pair.
inline std::vector<ClassCounts> confusion_counts(const std::vector<SampleLabels>& golds,
                                                 const std::vector<SampleLabels>& preds,
                                                 const LabelSet& labels) {
  if (golds.size() != preds.size()) {
    throw ValidationError("gold and prediction counts differ (" +
                          std::to_string(golds.size()) + " vs " +
                          std::to_string(preds.size()) + ")");
  }
  std::vector<ClassCounts> counts(labels.size());
  std::vector<char> in_gold(labels.size()), in_pred(labels.size());
  for (std::size_t i = 0; i < golds.size(); ++i) {
    std::fill(in_gold.begin(), in_gold.end(), 0);
    std::fill(in_pred.begin(), in_pred.end(), 0);
    for (const auto& l : golds[i]) in_gold[labels.index_of(l)] = 1;
    for (const auto& l : preds[i]) in_pred[labels.index_of(l)] = 1;
    for (std::size_t c = 0; c < labels.size(); ++c) {
      counts[c].tp += in_gold[c] && in_pred[c];
      counts[c].fp += !in_gold[c] && in_pred[c];
      counts[c].fn += in_gold[c] && !in_pred[c];
    }
  }
  return counts;
}

enum class Averaging { kBinary, kMacro, kMicro };

inline std::string_view to_string(Averaging a) {
  switch (a) {
    case Averaging::kBinary: return "binary";
    case Averaging::kMacro: return "macro";
    case Averaging::kMicro: return "micro";
  }
  return "?";
}

inline Averaging parse_averaging(std::string_view s) {
  if (s == "binary") return Averaging::kBinary;
  if (s == "macro") return Averaging::kMacro;
  if (s == "micro") return Averaging::kMicro;
  throw ValidationError("unknown averaging '" + std::string(s) + "'");
}

struct Scores {
  double precision = 0, recall = 0, f1 = 0;
};

// 0/0 is taken as 0 throughout.
inline Scores scores_from(std::size_t tp, std::size_t fp, std::size_t fn) {
  auto ratio = [](double a, double b) { return b > 0 ? a / b : 0.0; };
  Scores s;
  s.precision = ratio(tp, tp + fp);
  s.recall = ratio(tp, tp + fn);
  s.f1 = ratio(2.0 * tp, 2.0 * tp + fp + fn);
  return s;
}

// binary: scores of class `positive`; macro: unweighted mean of per-class
// precision, recall and F1 (macro-F1 is not recomputed from macro-P/R);
// micro: scores of the summed counts.
inline Scores prf(const std::vector<ClassCounts>& counts, Averaging averaging,
                  std::size_t positive = 1) {
  switch (averaging) {
    case Averaging::kBinary: {
      if (counts.size() != 2) {
        throw ValidationError("binary averaging needs exactly 2 classes, got " +
                              std::to_string(counts.size()));
      }
      if (positive >= 2) throw ValidationError("positive class index out of range");
      const auto& c = counts[positive];
      return scores_from(c.tp, c.fp, c.fn);
    }
    case Averaging::kMacro: {
      Scores mean;
      if (counts.empty()) return mean;
      for (const auto& c : counts) {
        auto s = scores_from(c.tp, c.fp, c.fn);
        mean.precision += s.precision;
        mean.recall += s.recall;
        mean.f1 += s.f1;
      }
      const double n = static_cast<double>(counts.size());
      mean.precision /= n;
      mean.recall /= n;
      mean.f1 /= n;
      return mean;
    }
    case Averaging::kMicro: {
      ClassCounts sum;
      for (const auto& c : counts) {
        sum.tp += c.tp;
        sum.fp += c.fp;
        sum.fn += c.fn;
      }
      return scores_from(sum.tp, sum.fp, sum.fn);
    }
  }
  return {};
}

struct EvalReport {
  std::vector<std::string> classes;
  std::vector<ClassCounts> per_class;
  Averaging averaging = Averaging::kMacro;
  Scores scores;
  std::size_t samples = 0;
};

inline EvalReport evaluate(const std::vector<SampleLabels>& golds,
                           const std::vector<SampleLabels>& preds,
                           const LabelSet& labels, Averaging averaging,
                           std::size_t positive = 1) {
  EvalReport r;
  r.classes = labels.classes();
  r.per_class = confusion_counts(golds, preds, labels);
  r.averaging = averaging;
  r.scores = prf(r.per_class, averaging, positive);
  r.samples = golds.size();
  return r;
}

// Shuffles [0, n) with `seed` and deals indices round-robin into k folds.
// Each fold is returned sorted.
inline std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k,
                                                         std::uint64_t seed) {
  if (k < 2) throw ValidationError("k-fold needs k >= 2");
  if (n < k) {
    throw ValidationError("cannot split " + std::to_string(n) + " samples into " +
                          std::to_string(k) + " folds");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

enum class Split { kTrain, kVal, kTest };

inline Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "val" || s == "dev" || s == "valid" || s == "validation") return Split::kVal;
  if (s == "test") return Split::kTest;
  throw ValidationError("unknown split '" + std::string(s) + "'");
}

struct LabeledSample {
  Split split = Split::kTrain;
  SampleLabels labels;
  std::string text;
};

struct DatasetSummary {
  std::size_t n_train = 0, n_val = 0, n_test = 0;
  std::size_t num_classes = 0;      // C
  double mean_labels = 0.0;         // average categories per sample
  double mean_words = 0.0;          // average segmented words per sample
};

inline DatasetSummary dataset_summary(const std::vector<LabeledSample>& samples,
                                      const SegmentDict& dict) {
  DatasetSummary s;
  std::set<std::string> classes;
  std::size_t label_total = 0, word_total = 0;
  for (const auto& sample : samples) {
    switch (sample.split) {
      case Split::kTrain: ++s.n_train; break;
      case Split::kVal: ++s.n_val; break;
      case Split::kTest: ++s.n_test; break;
    }
    std::set<std::string> mine(sample.labels.begin(), sample.labels.end());
    label_total += mine.size();
    classes.insert(mine.begin(), mine.end());
    word_total += word_count(segment_fmm(sample.text, dict));
  }
  s.num_classes = classes.size();
  if (!samples.empty()) {
    s.mean_labels = static_cast<double>(label_total) / static_cast<double>(samples.size());
    s.mean_words = static_cast<double>(word_total) / static_cast<double>(samples.size());
  }
  return s;
}

}  // namespace lexmask
