// Copyright 2026 The dialplan Authors.
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

#include "dialplan/prompt_template.hpp"

#include <vector>

#include "dialplan/errors.hpp"

namespace dialplan {
namespace {

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Splits on '\n', keeping empty lines.
std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (true) {
    std::size_t nl = s.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(s.substr(start));
      break;
    }
    lines.push_back(s.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace

std::string render_template(std::string_view tpl, const TemplateVars& vars,
                            const std::set<std::string>& omit) {
  std::string out;
  bool prev_blank = false;
  bool dropped_any = false;
  bool first = true;
  for (std::string_view line : split_lines(tpl)) {
    std::string rendered;
    bool drop = false;
    for (std::size_t i = 0; i < line.size();) {
      if (line[i] == '{') {
        std::size_t j = i + 1;
        while (j < line.size() && is_name_char(line[j])) ++j;
        if (j < line.size() && line[j] == '}' && j > i + 1) {
          std::string name(line.substr(i + 1, j - i - 1));
          if (omit.count(name)) {
            drop = true;
            break;
          }
          auto it = vars.find(name);
          if (it == vars.end()) throw InvalidArgument("unbound template placeholder {" + name + "}");
          rendered += it->second;
          i = j + 1;
          continue;
        }
      }
      rendered += line[i];
      ++i;
    }
    if (drop) {
      dropped_any = true;
      continue;
    }
    const bool blank = is_blank(rendered);
    if (blank && prev_blank && dropped_any) continue;
    if (!first) out += '\n';
    out += rendered;
    first = false;
    prev_blank = blank;
  }
  return out;
}

}  // namespace dialplan
