// Copyright 2026 The voxanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Line-oriented parsing shared by the whitespace-separated file formats.

#ifndef VOXANON_SRC_TEXT_UTIL_HPP_
#define VOXANON_SRC_TEXT_UTIL_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace voxanon::text {

struct Line {
  std::size_t number = 0;  // 1-based
  std::vector<std::string> fields;
};

std::vector<std::string> SplitWhitespace(std::string_view s);

// Reads `path`, drops '#' comments and blank lines, and splits the rest on
// whitespace. Throws kIo when the file cannot be opened.
std::vector<Line> ReadRecords(const std::string& path);

// Strict conversion; throws kParse naming `path` and the line number.
double ParseDouble(const std::string& token, const std::string& path,
                   std::size_t line);

[[noreturn]] void ParseFail(const std::string& path, std::size_t line,
                            const std::string& what);

// Shortest round-trippable representation ("%.17g" trimmed).
std::string FormatExact(double value);

// Fixed-point with `decimals` digits (printf %.Nf).
std::string FormatFixed(double value, int decimals);

}  // namespace voxanon::text

#endif  // VOXANON_SRC_TEXT_UTIL_HPP_
