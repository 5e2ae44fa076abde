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

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dialplan/environment.hpp"

namespace dialplan {

// One JSON object per line with the TurnRecord fields; deal_price is null
// when there was no deal. Doubles round-trip exactly.
std::string to_json_line(const TurnRecord& record);
TurnRecord parse_json_line(std::string_view line);  // throws InvalidArgument

void write_transcript(std::ostream& out, const std::vector<TurnRecord>& records);
std::vector<TurnRecord> read_transcript(std::istream& in);  // skips blank lines

void save_transcript(const std::string& path, const std::vector<TurnRecord>& records);
std::vector<TurnRecord> load_transcript(const std::string& path);  // throws IoError

// Records of several episodes concatenated in episode order.
std::vector<TurnRecord> collect_records(const std::vector<EpisodeResult>& episodes);

}  // namespace dialplan
