// Copyright 2026 The fedrec Authors.
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
// Small string helpers on top of fmt. The packaged abseil has its own
// string_view type, so its string utilities do not accept std::string_view.

#ifndef FEDREC_SRC_STR_UTIL_H_
#define FEDREC_SRC_STR_UTIL_H_

#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "absl/strings/string_view.h"
#include "fmt/format.h"

template <>
struct fmt::formatter<absl::string_view> : fmt::formatter<std::string_view> {
  template <typename Context>
  auto format(absl::string_view s, Context& ctx) const {
    return fmt::formatter<std::string_view>::format(
        std::string_view(s.data(), s.size()), ctx);
  }
};

namespace fedrec {

// Concatenates the "{}" rendering of every argument.
template <typename... Args>
std::string StrCat(const Args&... args) {
  std::string out;
  (fmt::format_to(std::back_inserter(out), "{}", args), ...);
  return out;
}

inline std::vector<std::string_view> StrSplit(std::string_view s,
                                              std::string_view sep) {
  std::vector<std::string_view> parts;
  for (size_t pos = s.find(sep); pos != std::string_view::npos;
       pos = s.find(sep)) {
    parts.push_back(s.substr(0, pos));
    s.remove_prefix(pos + sep.size());
  }
  parts.push_back(s);
  return parts;
}

inline std::string_view StripWhitespace(std::string_view s) {
  const auto space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

// Splits on `sep`, trims each part and drops empty ones.
inline std::vector<std::string_view> SplitList(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (std::string_view part : StrSplit(s, std::string_view(&sep, 1))) {
    part = StripWhitespace(part);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

}  // namespace fedrec

#endif  // FEDREC_SRC_STR_UTIL_H_
