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

#include <openssl/evp.h>

#include <cstddef>
#include <exception>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lexmask/error.hpp"
#include "lexmask/parallel.hpp"

namespace lexmask::io {

using nlohmann::json;

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path);
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError(path);
  return out;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("sha256: digest init failed");
    }
  }
  void update(std::string_view data) {
    EVP_DigestUpdate(ctx_.get(), data.data(), data.size());
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md, &len);
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
      out.push_back(kDigits[md[i] >> 4]);
      out.push_back(kDigits[md[i] & 0xF]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

inline std::string sha256(std::string_view data) {
  Sha256 h;
  h.update(data);
  return h.hex();
}

inline std::string sha256_file(const std::string& path) {
  auto in = open_in(path);
  Sha256 h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
  }
  return h.hex();
}

inline json parse_record(const std::string& line, std::size_t lineno) {
  try {
    auto j = json::parse(line);
    if (!j.is_object()) throw FormatError("record is not a JSON object", lineno);
    return j;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what(), lineno);
  }
}

inline std::string require_string(const json& rec, const char* key, std::size_t lineno) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) {
    throw FormatError(std::string("missing string field \"") + key + "\"", lineno);
  }
  return it->get<std::string>();
}

// Labels may be strings or scalars; non-strings are keyed by their JSON text.
inline std::string label_text(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

// Reads `in` line by line in batches, maps every non-blank line with
// map(line, lineno) across `workers` threads and feeds results to
// reduce(result) strictly in input order. Errors surface for the earliest
// offending line.
template <typename T, typename Map, typename Reduce>
void map_lines_ordered(std::istream& in, unsigned workers, Map&& map, Reduce&& reduce,
                       std::size_t batch = 4096) {
  std::vector<std::string> lines;
  std::vector<std::size_t> linenos;
  std::size_t lineno = 0;
  auto flush = [&] {
    std::vector<std::optional<T>> out(lines.size());
    std::vector<std::exception_ptr> errors(lines.size());
    parallel_for(lines.size(), workers, [&](std::size_t i) {
      try {
        out[i].emplace(map(lines[i], linenos[i]));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (errors[i]) std::rethrow_exception(errors[i]);
      reduce(std::move(*out[i]));
    }
    lines.clear();
    linenos.clear();
  };
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back(std::move(line));
    linenos.push_back(lineno);
    if (lines.size() >= batch) flush();
  }
  flush();
}

}  // namespace lexmask::io
