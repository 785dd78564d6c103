//
// Copyright 2026 The DPText Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Flat key=value parsing shared by the config readers. Not installed.

#ifndef DPTEXT_SRC_KEY_VALUE_H_
#define DPTEXT_SRC_KEY_VALUE_H_

#include <charconv>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dptext/error.h"

namespace dptext::internal {

inline std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> SplitOn(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    out.emplace_back(Trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Parses "key=value" lines; '#' starts a comment. Keys must be unique.
inline std::map<std::string, std::string> ParseKeyValues(std::string_view text,
                                                         ErrorCode code) {
  std::map<std::string, std::string> out;
  int line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (!line.empty()) {
      const size_t eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw Error(code, "line " + std::to_string(line_no) +
                              ": expected key=value");
      }
      std::string key(Trim(line.substr(0, eq)));
      std::string value(Trim(line.substr(eq + 1)));
      if (key.empty()) {
        throw Error(code, "line " + std::to_string(line_no) + ": empty key");
      }
      if (!out.emplace(key, value).second) {
        throw Error(code, "duplicate key '" + key + "'");
      }
    }
    start = end + 1;
  }
  return out;
}

inline double ParseDouble(const std::string& key, const std::string& value,
                          ErrorCode code) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(code, "key '" + key + "': not a number: '" + value + "'");
  }
}

inline int64_t ParseInt(const std::string& key, const std::string& value,
                        ErrorCode code) {
  int64_t v = 0;
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw Error(code, "key '" + key + "': not an integer: '" + value + "'");
  }
  return v;
}

inline uint64_t ParseUint(const std::string& key, const std::string& value,
                          ErrorCode code) {
  uint64_t v = 0;
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw Error(code, "key '" + key + "': not an unsigned integer: '" + value +
                          "'");
  }
  return v;
}

inline bool ParseBool(const std::string& key, const std::string& value,
                      ErrorCode code) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error(code, "key '" + key + "': not a boolean: '" + value + "'");
}

// Shortest representation that parses back to the same double.
inline std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace dptext::internal

#endif  // DPTEXT_SRC_KEY_VALUE_H_
