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

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "lexmask/commands.hpp"

namespace {

using lexmask::cli::CommandResult;
using lexmask::cli::RunConfig;

// Shared flags live on the top-level app and fall through to every
// subcommand, so one flat config file (--config) serves all stages.
// Precedence: command line, then LEXMASK_* environment, then config file.
using EnvBindings = std::vector<std::pair<CLI::Option*, std::string>>;

void add_options(CLI::App& app, RunConfig& c, EnvBindings& bound) {
  auto env = [&](CLI::Option* o, const char* name) {
    bound.emplace_back(o, name);
    return o->envname(name);
  };
  env(app.add_option("--input,-i", c.input, "input file"), "LEXMASK_INPUT");
  env(app.add_option("--output,-o", c.output, "output file ('-' for stdout where allowed)"),
      "LEXMASK_OUTPUT");
  env(app.add_option("--format", c.format, "raw input format")
          ->check(CLI::IsMember({"jsonl", "text"})),
      "LEXMASK_FORMAT");
  env(app.add_option("--source", c.source, "source name for --format text"), "LEXMASK_SOURCE");
  env(app.add_option("--lexicon", c.lexicon, "lexicon TSV (word, score, seed flag)"),
      "LEXMASK_LEXICON");
  env(app.add_option("--seeds", c.seeds, "extra seed words, one per line"), "LEXMASK_SEEDS");
  env(app.add_option("--dict", c.dicts, "segmentation dictionary (repeatable)"), "LEXMASK_DICT");
  env(app.add_option("--vocab", c.vocab, "vocabulary, one token per line"), "LEXMASK_VOCAB");
  env(app.add_option("--chunk-len", c.chunk_len, "tokens per chunk")->capture_default_str(),
      "LEXMASK_CHUNK_LEN");
  env(app.add_option("--budget", c.budget, "minimum masked fraction")->capture_default_str(),
      "LEXMASK_BUDGET");
  env(app.add_option("--policy", c.policy, "replacement mask:random:keep")->capture_default_str(),
      "LEXMASK_POLICY");
  env(app.add_option("--seed", c.seed, "random seed")->capture_default_str(), "LEXMASK_SEED");
  env(app.add_option("--workers", c.workers, "worker threads")->capture_default_str(),
      "LEXMASK_WORKERS");
  env(app.add_option("--min-chars", c.min_chars, "minimum content characters per post")
          ->capture_default_str(),
      "LEXMASK_MIN_CHARS");
  env(app.add_option("--spam-filter", c.spam_filter, "drop single-character spam")
          ->capture_default_str(),
      "LEXMASK_SPAM_FILTER");
  env(app.add_option("--kaomoji", c.kaomoji, "extra kaomoji regex (repeatable)"),
      "LEXMASK_KAOMOJI");
  env(app.add_option("--averaging", c.averaging, "metric averaging")
          ->check(CLI::IsMember({"binary", "macro", "micro"}))
          ->capture_default_str(),
      "LEXMASK_AVERAGING");
  env(app.add_option("--positive", c.positive, "positive class for binary averaging"),
      "LEXMASK_POSITIVE");
  env(app.add_option("--labels", c.labels, "class order (repeatable)"), "LEXMASK_LABELS");
  env(app.add_option("--folds", c.folds, "cross-validation folds")->capture_default_str(),
      "LEXMASK_FOLDS");
  env(app.add_option("--n", c.n, "sample count for folds"), "LEXMASK_N");
  env(app.add_option("--window", c.window, "co-occurrence window")->capture_default_str(),
      "LEXMASK_WINDOW");
  env(app.add_option("--min-weight", c.min_weight, "minimum PPMI edge weight")
          ->capture_default_str(),
      "LEXMASK_MIN_WEIGHT");
  env(app.add_option("--tol", c.tol, "propagation tolerance")->capture_default_str(),
      "LEXMASK_TOL");
  env(app.add_option("--max-iter", c.max_iter, "propagation iteration cap")
          ->capture_default_str(),
      "LEXMASK_MAX_ITER");
  env(app.add_option("--cutoff", c.cutoff, "score cutoff for lexicon expansion")
          ->capture_default_str(),
      "LEXMASK_CUTOFF");
}

bool given(const CLI::Option* opt, const std::vector<std::string>& args) {
  for (const auto& a : args) {
    for (const auto& l : opt->get_lnames()) {
      if (a == "--" + l || a.rfind("--" + l + "=", 0) == 0) return true;
    }
    for (const auto& s : opt->get_snames()) {
      if (a.rfind("-" + s, 0) == 0 && a.rfind("--", 0) != 0) return true;
    }
  }
  return false;
}

// CLI11 consults the config file before the environment. Environment values
// are turned into arguments so they sit between the two.
std::vector<std::string> with_env(std::vector<std::string> args, const EnvBindings& bound) {
  std::vector<std::string> extra;
  for (const auto& [opt, var] : bound) {
    const char* v = std::getenv(var.c_str());
    if (v == nullptr || given(opt, args)) continue;
    extra.push_back(opt->get_name());
    extra.emplace_back(v);
  }
  auto stop = std::find(args.begin(), args.end(), "--");
  args.insert(stop, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lexmask: lexicon-guided whole-word masking data pipeline"};
  app.name("lexmask");
  app.set_version_flag("--version", std::string(lexmask::cli::kToolVersion));
  app.set_config("--config", "", "key = value configuration file");
  app.fallthrough();
  app.require_subcommand(1);

  RunConfig cfg;
  EnvBindings bound;
  add_options(app, cfg, bound);

  using Command = std::function<CommandResult(const RunConfig&)>;
  const std::map<std::string, std::pair<std::string, Command>> commands = {
      {"clean", {"clean and filter raw posts", lexmask::cli::cmd_clean}},
      {"segment", {"segment cleaned text into words", lexmask::cli::cmd_segment}},
      {"expand-lexicon", {"expand the lexicon by label propagation",
                          lexmask::cli::cmd_expand_lexicon}},
      {"chunk", {"tokenize and cut fixed-length chunks", lexmask::cli::cmd_chunk}},
      {"mask", {"build masked training examples", lexmask::cli::cmd_mask}},
      {"run", {"raw posts to masked examples in one pass", lexmask::cli::cmd_run}},
      {"stats", {"per-source corpus statistics", lexmask::cli::cmd_stats}},
      {"probe", {"mask target words in probe sentences", lexmask::cli::cmd_probe}},
      {"eval", {"precision / recall / F1 of predictions", lexmask::cli::cmd_eval}},
      {"folds", {"k-fold cross-validation split", lexmask::cli::cmd_folds}},
      {"summary", {"dataset summary statistics", lexmask::cli::cmd_summary}},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands) subs[name] = app.add_subcommand(name, entry.first);

  try {
    auto args = with_env({argv + 1, argv + argc}, bound);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 4;
  }

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    try {
      const auto result = commands.at(name).second(cfg);
      std::cerr << "lexmask " << name << ": " << result.counts.dump() << '\n';
      return 0;
    } catch (const lexmask::Error& e) {
      std::cerr << "lexmask " << name << ": " << e.what() << '\n';
      return e.exit_code();
    } catch (const std::exception& e) {
      std::cerr << "lexmask " << name << ": " << e.what() << '\n';
      return 1;
    }
  }
  return 4;
}
