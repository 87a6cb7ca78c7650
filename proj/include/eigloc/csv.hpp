// Copyright 2026 The eigloc Authors. All Rights Reserved.
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

#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eigloc/error.hpp"

namespace eigloc::csv {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

/// Reads a numeric table with a fixed column count. A first line that does
/// not parse as numbers is treated as a header and must equal `header` when
/// one is given. Blank lines are skipped; any other malformed line throws
/// ParseError naming it.
inline std::vector<std::vector<double>> read_numeric(
    std::istream& in, std::size_t columns,
    const std::vector<std::string>& header = {}) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split(view);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (!parse_double(fields[k], row[k])) numeric = false;
    }
    if (first && !numeric) {
      first = false;
      if (!header.empty()) {
        bool match = fields.size() == header.size();
        for (std::size_t k = 0; match && k < header.size(); ++k) {
          match = fields[k] == header[k];
        }
        if (!match) throw ParseError(lineno, "unexpected header");
      }
      continue;
    }
    first = false;
    if (fields.size() != columns) {
      throw ParseError(lineno, "expected " + std::to_string(columns) +
                                   " columns, got " +
                                   std::to_string(fields.size()));
    }
    if (!numeric) throw ParseError(lineno, "non-numeric field");
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return in;
}

}  // namespace eigloc::csv
