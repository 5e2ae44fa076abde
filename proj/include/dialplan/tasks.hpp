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
#include <string>
#include <vector>

#include "dialplan/prompt_template.hpp"
#include "dialplan/types.hpp"

namespace dialplan {

enum class Terminal { Ongoing, Completed, Failed };

std::string_view to_string(Terminal t);
Terminal terminal_from_string(std::string_view name);

/// One critic option. `text` is the option exactly as offered to the critic
/// and may contain `{english_sentence}`. When `reward_from_deal` is set the
/// reward comes from the negotiated price instead of `reward`.
struct VerdictOption {
  std::string text;
  double reward = 0.0;
  Terminal terminal = Terminal::Ongoing;
  bool reward_from_deal = false;
};

/// Role prompt templates for the four self-play roles. Each role has an
/// instruction (sent as the system message) and a directive (sent as the
/// user message). Placeholders: {conversation} {emotions} {options} {k}
/// {action} {last_utterance} {background} {emotion_type} {problem_type}
/// {product} {buyer_target_price} {seller_desired_price} {english_sentence}.
/// Lines mentioning {emotions} disappear when emotion tracking is off.
struct RolePrompts {
  std::string policy_instruction;
  std::string policy_directive;
  std::string system_instruction;
  std::string system_directive;
  std::string user_instruction;
  std::string user_directive;
  std::string critic_instruction;
  std::string critic_directive;
};

struct TaskProfile {
  TaskId task = TaskId::ESConv;
  ActionCatalog catalog;
  int noop_index = 1;
  std::vector<VerdictOption> verdict_map;
  std::size_t max_turns = 8;
  RolePrompts prompts;
};

const ActionCatalog& builtin_catalog(TaskId task);

// Catalog, fallback action, critic options and role prompts for a task.
TaskProfile builtin_profile(TaskId task);

// Shortest round-trip decimal form, e.g. 120 -> "120", 99.5 -> "99.5".
std::string format_number(double v);

// Placeholder bindings shared by every role prompt. {last_utterance} is the
// latest utterance spoken by `last_from`. {options}, {k} and {action} are
// left for the caller.
TemplateVars case_vars(const DialogueState& state, Speaker last_from);

}  // namespace dialplan
