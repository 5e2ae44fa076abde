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

#include "dialplan/types.hpp"

#include <set>

#include "dialplan/errors.hpp"

namespace dialplan {

std::string_view to_string(TaskId task) {
  switch (task) {
    case TaskId::ESConv: return "ESConv";
    case TaskId::CIMA: return "CIMA";
    case TaskId::CB: return "CB";
    case TaskId::P4G: return "P4G";
    case TaskId::ExTES: return "ExTES";
  }
  return "?";
}

TaskId task_from_string(std::string_view name) {
  for (TaskId t : all_tasks()) {
    if (to_string(t) == name) return t;
  }
  throw InvalidArgument("unknown task: " + std::string(name));
}

const std::vector<TaskId>& all_tasks() {
  static const std::vector<TaskId> tasks = {TaskId::ESConv, TaskId::CIMA, TaskId::CB,
                                            TaskId::P4G, TaskId::ExTES};
  return tasks;
}

std::string_view speaker_name(TaskId task, Speaker speaker) {
  const bool sys = speaker == Speaker::System;
  switch (task) {
    case TaskId::ESConv:
    case TaskId::ExTES: return sys ? "Therapist" : "Patient";
    case TaskId::CIMA: return sys ? "Teacher" : "Student";
    case TaskId::CB: return sys ? "Buyer" : "Seller";
    case TaskId::P4G: return sys ? "Persuader" : "Persuadee";
  }
  return sys ? "System" : "User";
}

double CaseInfo::slot(const std::string& name) const {
  auto it = numeric_slots.find(name);
  if (it == numeric_slots.end()) throw InvalidCase("case " + id + " has no slot " + name);
  return it->second;
}

std::string CaseInfo::text(const std::string& name) const {
  auto it = text_slots.find(name);
  return it == text_slots.end() ? std::string() : it->second;
}

void CaseInfo::validate() const {
  if (task != TaskId::CB) {
    if (!numeric_slots.empty()) {
      throw InvalidCase("case " + id + ": numeric slots are only defined for CB");
    }
    return;
  }
  const double listed = slot(kListedPrice);
  const double target = slot(kBuyerTargetPrice);
  slot(kSellerDesiredPrice);
  if (!(listed > target && target > 0.0)) {
    throw InvalidCase("case " + id + ": need listed_price > buyer_target_price > 0");
  }
}

std::string EmotionTrace::render() const {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += kEmotionSeparator;
    out += labels[i];
  }
  return out;
}

DialogueState initial_state(CaseInfo case_info) {
  DialogueState s;
  s.case_info = std::move(case_info);
  return s;
}

DialogueState append_turn(const DialogueState& state, Utterance u) {
  if (u.turn_index != state.history.size()) {
    throw IndexMismatch("utterance turn_index " + std::to_string(u.turn_index) +
                        " != history length " + std::to_string(state.history.size()));
  }
  DialogueState next = state;
  if (u.speaker == Speaker::System) ++next.turn;
  next.history.push_back(std::move(u));
  return next;
}

ActionCatalog::ActionCatalog(TaskId task, std::vector<Action> actions)
    : task_(task), actions_(std::move(actions)) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    const Action& a = actions_[i];
    if (a.index != static_cast<int>(i) + 1) {
      throw InvalidArgument("catalog indices must run 1..n");
    }
    if (!names.insert(a.name).second) {
      throw InvalidArgument("duplicate action name: " + a.name);
    }
    if (a.strategy_prompt.empty()) {
      throw InvalidArgument("action " + a.name + " has no strategy prompt");
    }
  }
}

const Action& ActionCatalog::at(int index) const {
  if (!contains(index)) {
    throw InvalidArgument("action index out of range: " + std::to_string(index));
  }
  return actions_[static_cast<std::size_t>(index - 1)];
}

std::optional<int> ActionCatalog::find(std::string_view name) const {
  for (const Action& a : actions_) {
    if (a.name == name) return a.index;
  }
  return std::nullopt;
}

std::string render_history(const DialogueState& state) {
  std::string out;
  for (std::size_t i = 0; i < state.history.size(); ++i) {
    const Utterance& u = state.history[i];
    if (i) out += '\n';
    out += speaker_name(state.case_info.task, u.speaker);
    out += ": ";
    out += u.text;
  }
  return out;
}

std::string serialize_state(const DialogueState& state, const ActionCatalog& catalog,
                            SerializeOptions options) {
  std::string out = "Case: ";
  out += state.case_info.background;
  out += "; History: ";
  out += render_history(state);
  out += "; ";
  if (options.include_emotions) {
    out += "Emotions: ";
    out += state.emotions.render();
    out += "; ";
  }
  out += "Actions: [";
  for (std::size_t i = 0; i < catalog.actions().size(); ++i) {
    if (i) out += ", ";
    out += catalog.actions()[i].name;
  }
  out += "]; Next action:";
  return out;
}

}  // namespace dialplan
