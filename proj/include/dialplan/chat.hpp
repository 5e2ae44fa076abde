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

#include "dialplan/environment.hpp"

namespace dialplan {

/// A human playing the user role over a pair of streams. Each turn prints a
/// prompt and reads one line; "/quit" or end of input ends the episode.
class TerminalUser : public UserSource {
 public:
  TerminalUser(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
  std::optional<std::string> reply(const DialogueState& state, Gateway& gateway) override;

 private:
  std::istream& in_;
  std::ostream& out_;
};

// Runs one episode of `env` with the user read from `in`. Prints the chosen
// action and system utterance every turn, then the critic verdict, and a
// closing line with the outcome.
EpisodeResult chat_session(DialogueEnvironment& env, const CaseInfo& case_info, double epsilon,
                           Rng& rng, std::istream& in, std::ostream& out);

}  // namespace dialplan
