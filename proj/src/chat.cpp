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

#include "dialplan/chat.hpp"

#include <istream>
#include <ostream>

namespace dialplan {

std::optional<std::string> TerminalUser::reply(const DialogueState& state, Gateway&) {
  out_ << speaker_name(state.case_info.task, Speaker::User) << "> " << std::flush;
  std::string line;
  while (std::getline(in_, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    if (line == "/quit") return std::nullopt;
    return line;
  }
  out_ << '\n';
  return std::nullopt;
}

EpisodeResult chat_session(DialogueEnvironment& env, const CaseInfo& case_info, double epsilon,
                           Rng& rng, std::istream& in, std::ostream& out) {
  const TaskId task = case_info.task;
  out << "Case: " << case_info.background << '\n';
  auto saved_system = env.on_system;
  auto saved_turn = env.on_turn;
  env.on_system = [&](const Action& a, const std::string& text) {
    out << "[" << a.name << "]\n" << speaker_name(task, Speaker::System) << ": " << text << '\n';
  };
  env.on_turn = [&](const TurnRecord& r) {
    if (!r.verdict.empty()) out << "(critic) " << r.verdict << '\n';
  };
  TerminalUser user(in, out);
  EpisodeResult result;
  try {
    result = env.run_episode(case_info, epsilon, rng, 0, nullptr, &user);
  } catch (...) {
    env.on_system = saved_system;
    env.on_turn = saved_turn;
    throw;
  }
  env.on_system = saved_system;
  env.on_turn = saved_turn;
  out << "Episode " << to_string(result.outcome) << " after " << result.turns << " turn"
      << (result.turns == 1 ? "" : "s") << ".\n";
  return result;
}

}  // namespace dialplan
