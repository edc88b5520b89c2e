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
#include <stdexcept>
#include <string>

namespace lexmask {

// Base error. Each subclass maps to one process exit status in the CLI.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

// A referenced file is missing or unreadable.
class FileError : public Error {
 public:
  explicit FileError(const std::string& path)
      : Error("cannot open file: " + path), path_(path) {}
  int exit_code() const noexcept override { return 2; }
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// A record could not be parsed. line is 1-based, 0 when unknown.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int exit_code() const noexcept override { return 3; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Input decoded but violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

// Malformed UTF-8 at a byte offset of the offending string.
class Utf8Error : public Error {
 public:
  explicit Utf8Error(std::size_t offset)
      : Error("invalid UTF-8 at byte offset " + std::to_string(offset)),
        offset_(offset) {}
  int exit_code() const noexcept override { return 3; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace lexmask
