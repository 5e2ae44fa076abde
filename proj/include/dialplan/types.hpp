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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dialplan {

enum class TaskId { ESConv, CIMA, CB, P4G, ExTES };

std::string_view to_string(TaskId task);
TaskId task_from_string(std::string_view name);  // throws InvalidArgument
const std::vector<TaskId>& all_tasks();

enum class Speaker { System, User };

// Display names used whenever a turn is rendered, e.g. "Therapist" / "Patient".
std::string_view speaker_name(TaskId task, Speaker speaker);

/// Per-dialogue case information. `background` carries the situation,
/// product description or sentence to translate; `text_slots` holds the
/// remaining named strings a role prompt needs (emotion_type, problem_type,
/// product). Prices live in `numeric_slots` and only for CB.
struct CaseInfo {
  TaskId task = TaskId::ESConv;
  std::string id;
  std::string background;
  std::map<std::string, double> numeric_slots;
  std::map<std::string, std::string> text_slots;

  double slot(const std::string& name) const;  // throws InvalidCase
  std::string text(const std::string& name) const;  // "" when absent

  // Throws InvalidCase when the CB price invariants or the non-CB empty
  // numeric_slots invariant do not hold.
  void validate() const;

  bool operator==(const CaseInfo&) const = default;
};

inline constexpr const char* kListedPrice = "listed_price";
inline constexpr const char* kBuyerTargetPrice = "buyer_target_price";
inline constexpr const char* kSellerDesiredPrice = "seller_desired_price";

struct Utterance {
  Speaker speaker = Speaker::System;
  std::string text;
  std::size_t turn_index = 0;

  bool operator==(const Utterance&) const = default;
};

struct EmotionTrace {
  std::vector<std::string> labels;

  // Labels joined with " -> ".
  std::string render() const;
  bool operator==(const EmotionTrace&) const = default;
};

inline constexpr std::string_view kEmotionSeparator = " -> ";

struct DialogueState {
  CaseInfo case_info;
  std::vector<Utterance> history;
  EmotionTrace emotions;
  std::size_t turn = 0;  // completed system turns

  bool operator==(const DialogueState&) const = default;
};

DialogueState initial_state(CaseInfo case_info);

// Returns a copy of `state` with `u` appended. The turn counter advances on
// system utterances only. Throws IndexMismatch unless u.turn_index equals
// the current history length.
DialogueState append_turn(const DialogueState& state, Utterance u);

struct Action {
  int index = 0;  // 1-based
  std::string name;
  std::string strategy_prompt;

  bool operator==(const Action&) const = default;
};

class ActionCatalog {
 public:
  ActionCatalog() = default;
  // Throws InvalidArgument unless indices run 1..n, names are unique and
  // every strategy prompt is non-empty.
  ActionCatalog(TaskId task, std::vector<Action> actions);

  TaskId task() const { return task_; }
  std::size_t size() const { return actions_.size(); }
  const std::vector<Action>& actions() const { return actions_; }
  bool contains(int index) const {
    return index >= 1 && static_cast<std::size_t>(index) <= actions_.size();
  }
  const Action& at(int index) const;  // throws InvalidArgument
  std::optional<int> find(std::string_view name) const;

 private:
  TaskId task_ = TaskId::ESConv;
  std::vector<Action> actions_;
};

struct Transition {
  std::string state_text;
  int action_index = 0;
  double reward = 0.0;
  std::string next_state_text;
  bool terminal = false;
  std::vector<int> candidate_indices_next;

  bool operator==(const Transition&) const = default;
};

struct SerializeOptions {
  bool include_emotions = true;
};

// "Speaker: text" lines joined by '\n'.
std::string render_history(const DialogueState& state);

// Canonical one-line state text shared by the policy prior and the value
// head:
//   Case: {bg}; History: {turns}; Emotions: {a -> b}; Actions: [n1, n2]; Next action:
// The Emotions segment is dropped entirely when include_emotions is false.
std::string serialize_state(const DialogueState& state,
                            const ActionCatalog& catalog,
                            SerializeOptions options = {});

}  // namespace dialplan
