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

#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

namespace dialplan {

using TemplateVars = std::map<std::string, std::string>;

// Substitutes `{name}` placeholders. Any line that references a name in
// `omit` is removed along with its line break, and runs of blank lines left
// behind collapse to one. Throws InvalidArgument on a placeholder that is
// neither bound nor omitted.
std::string render_template(std::string_view tpl, const TemplateVars& vars,
                            const std::set<std::string>& omit = {});

}  // namespace dialplan
