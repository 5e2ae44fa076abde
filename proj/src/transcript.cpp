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

#include "dialplan/transcript.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "dialplan/errors.hpp"

namespace dialplan {

using nlohmann::json;

std::string to_json_line(const TurnRecord& r) {
  json j = {
      {"episode", r.episode},
      {"case_id", r.case_id},
      {"turn", r.turn},
      {"candidates", r.candidates},
      {"action_index", r.action_index},
      {"action_name", r.action_name},
      {"system_text", r.system_text},
      {"user_text", r.user_text},
      {"emotion", r.emotion},
      {"verdict", r.verdict},
      {"reward", r.reward},
      {"status", std::string(to_string(r.status))},
      {"terminal", r.terminal},
      {"deal_price", r.deal_price ? json(*r.deal_price) : json(nullptr)},
  };
  return j.dump();
}

TurnRecord parse_json_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    TurnRecord r;
    r.episode = j.at("episode").get<std::size_t>();
    r.case_id = j.at("case_id").get<std::string>();
    r.turn = j.at("turn").get<std::size_t>();
    r.candidates = j.at("candidates").get<std::vector<int>>();
    r.action_index = j.at("action_index").get<int>();
    r.action_name = j.at("action_name").get<std::string>();
    r.system_text = j.at("system_text").get<std::string>();
    r.user_text = j.at("user_text").get<std::string>();
    r.emotion = j.at("emotion").get<std::string>();
    r.verdict = j.at("verdict").get<std::string>();
    r.reward = j.at("reward").get<double>();
    r.status = terminal_from_string(j.at("status").get<std::string>());
    r.terminal = j.at("terminal").get<bool>();
    if (!j.at("deal_price").is_null()) r.deal_price = j.at("deal_price").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad transcript line: ") + e.what());
  }
}

void write_transcript(std::ostream& out, const std::vector<TurnRecord>& records) {
  for (const TurnRecord& r : records) out << to_json_line(r) << '\n';
}

std::vector<TurnRecord> read_transcript(std::istream& in) {
  std::vector<TurnRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_json_line(line));
  }
  return out;
}

void save_transcript(const std::string& path, const std::vector<TurnRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  write_transcript(out, records);
  if (!out) throw IoError("write failed: " + path);
}

std::vector<TurnRecord> load_transcript(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  return read_transcript(in);
}

std::vector<TurnRecord> collect_records(const std::vector<EpisodeResult>& episodes) {
  std::vector<TurnRecord> out;
  for (const EpisodeResult& e : episodes) out.insert(out.end(), e.records.begin(), e.records.end());
  return out;
}

}  // namespace dialplan
