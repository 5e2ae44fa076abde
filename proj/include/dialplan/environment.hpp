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

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dialplan/action_prior.hpp"
#include "dialplan/emotion_tracker.hpp"
#include "dialplan/learner.hpp"
#include "dialplan/llm_gateway.hpp"
#include "dialplan/random.hpp"
#include "dialplan/tasks.hpp"
#include "dialplan/value_model.hpp"

namespace dialplan {

struct Verdict {
  double reward = 0.0;
  Terminal terminal = Terminal::Ongoing;
  std::optional<double> deal_price;
  bool matched = false;
};

// Case-insensitive containment match of the critic reply against the
// profile's options, first match wins. Options containing a placeholder
// match on the text before it. A CB deal reply is scored with cb_reward and
// needs `case_info`. An unmatched reply scores 0 and stays Ongoing.
Verdict map_critic_verdict(std::string_view raw, const TaskProfile& profile,
                           const CaseInfo* case_info = nullptr);

// The number after "reached a deal at", with currency symbols and thousands
// separators stripped. nullopt when no deal phrase is present; throws
// MalformedPrice when the phrase has no number.
std::optional<double> extract_deal_price(std::string_view raw);

// (listed - deal) / (listed - buyer_target), clamped to [0, 1]; 0 without a
// deal. Throws InvalidCase when the price slots are missing or inconsistent.
double cb_reward(std::optional<double> deal_price, const CaseInfo& case_info);

// The "Response:" segment of a system reply, or the whole reply without a
// leading "Emotion: ..." line when there is no such segment.
std::string parse_system_reply(std::string_view raw);

// The user-simulator request for `state`, history trimmed to the gateway's
// context budget.
ChatRequest build_user_request(const TaskProfile& profile, const DialogueState& state,
                               const Gateway& gateway);

// Supplies the user side of each turn.
class UserSource {
 public:
  virtual ~UserSource() = default;
  // nullopt ends the episode early (as Failed).
  virtual std::optional<std::string> reply(const DialogueState& state, Gateway& gateway) = 0;
};

// The user simulator: one call to the User role per turn.
class SimulatedUser : public UserSource {
 public:
  explicit SimulatedUser(const TaskProfile& profile) : profile_(&profile) {}
  std::optional<std::string> reply(const DialogueState& state, Gateway& gateway) override;

 private:
  const TaskProfile* profile_;
};

/// One row of the persisted transcript log.
struct TurnRecord {
  std::size_t episode = 0;
  std::string case_id;
  std::size_t turn = 0;  // 1-based
  std::vector<int> candidates;
  int action_index = 0;
  std::string action_name;
  std::string system_text;
  std::string user_text;
  std::string emotion;
  std::string verdict;
  double reward = 0.0;
  Terminal status = Terminal::Ongoing;
  bool terminal = false;
  std::optional<double> deal_price;

  bool operator==(const TurnRecord&) const = default;
};

struct EpisodeResult {
  std::size_t episode = 0;
  std::string case_id;
  std::vector<Utterance> transcript;
  std::vector<Transition> transitions;
  std::vector<TurnRecord> records;
  Terminal outcome = Terminal::Failed;
  std::size_t turns = 0;
  std::optional<double> deal_price;
  std::optional<double> sl;  // CB only; 0 for a failed negotiation
};

struct EnvironmentOptions {
  bool include_emotions = true;
};

/// Runs the self-play protocol for one task. Holds references only; the
/// caller keeps the profile, prior, head, encoder and gateway alive. The
/// head is read, never written.
class DialogueEnvironment {
 public:
  DialogueEnvironment(const TaskProfile& profile, const ActionPrior& prior,
                      const QHeadParams& params, Encoder& encoder, Gateway& gateway,
                      EnvironmentOptions options = {});

  struct TurnOutcome {
    DialogueState next_state;
    Transition transition;
    TurnRecord record;
    Terminal status = Terminal::Ongoing;
    std::optional<CandidateSet> next_candidates;  // only while Ongoing
  };

  // One turn from `state` using the already-proposed `candidates`: select,
  // speak, hear the user, track emotion, ask the critic, and propose the next
  // candidates unless the episode ended. Throws TurnLimitReached when the
  // state is already at the turn cap. A nullopt user reply ends the turn as
  // Failed without consulting the critic.
  TurnOutcome run_turn(const DialogueState& state, const CandidateSet& candidates, double epsilon,
                       Rng& rng, EncodingCache& cache, UserSource& user);

  // Loops run_turn until Completed, the turn cap or the user quits. Pushes
  // every transition into `buffer` when one is given.
  EpisodeResult run_episode(const CaseInfo& case_info, double epsilon, Rng& rng,
                            std::size_t episode_id, ReplayBuffer* buffer = nullptr,
                            UserSource* user = nullptr);

  ChatRequest system_request(const DialogueState& state, const Action& action) const;
  ChatRequest user_request(const DialogueState& state) const;
  ChatRequest critic_request(const DialogueState& state) const;

  std::string serialize(const DialogueState& state) const;

  const TaskProfile& profile() const { return profile_; }
  const ActionPrior& prior() const { return prior_; }

  // Observers, e.g. for printing in chat mode. on_system fires once the
  // system utterance exists and before the user replies.
  std::function<void(const Action&, const std::string&)> on_system;
  std::function<void(const TurnRecord&)> on_turn;

 private:
  const TaskProfile& profile_;
  const ActionPrior& prior_;
  const QHeadParams& params_;
  Encoder& encoder_;
  Gateway& gateway_;
  EnvironmentOptions options_;
  EmotionTracker tracker_;
};

}  // namespace dialplan
