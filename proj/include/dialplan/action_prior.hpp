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
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "dialplan/llm_gateway.hpp"
#include "dialplan/tasks.hpp"
#include "dialplan/types.hpp"

namespace dialplan {

/// Rule-based projection of free LLM text onto a catalog action. Matchers
/// are tried in table order and the first that fires wins; text nothing
/// matches maps to the fallback action. Keywords match whole words,
/// case-insensitively, after whitespace is collapsed.
class ProjectionTable {
 public:
  struct Matcher {
    int action_index = 0;
    std::string pattern;  // keyword, or regex when is_regex
    bool is_regex = false;
    std::regex compiled;
  };

  ProjectionTable() = default;
  ProjectionTable(TaskId task, int noop_index);

  void add_keyword(int action_index, std::string keyword);
  void add_regex(int action_index, std::string pattern);

  TaskId task() const { return task_; }
  int noop_index() const { return noop_index_; }
  const std::vector<Matcher>& matchers() const { return matchers_; }

  // Throws InvalidArgument if an action has no matcher, a matcher points
  // outside the catalog, or the fallback is not a catalog action.
  void validate(const ActionCatalog& catalog) const;

  // Action names (longest first, so "counter-noprice" wins over "counter"),
  // a leading option number such as "6:" or "(6)", then synonyms.
  static ProjectionTable builtin(const TaskProfile& profile);

  // Reads lines `task, action_index, pattern` and keeps those for `task`.
  // '#' starts a comment line; a pattern prefixed with "re:" is a regular
  // expression, anything else a keyword. `noop_index` is taken from the
  // profile.
  static ProjectionTable load(const std::string& path, const TaskProfile& profile);
  static ProjectionTable parse(std::string_view text, const TaskProfile& profile);

 private:
  TaskId task_ = TaskId::ESConv;
  int noop_index_ = 1;
  std::vector<Matcher> matchers_;
};

// Lowercases and collapses whitespace runs to one space, trimming the ends.
std::string normalize_text(std::string_view text);

int project(std::string_view text, const ProjectionTable& table);

struct PriorDistribution {
  std::map<int, double> weights;
  double total() const;
};

enum class CandidateSource { ListMode, BeamMode, FullCatalog };
std::string_view to_string(CandidateSource s);

struct CandidateSet {
  std::vector<int> indices;
  CandidateSource source = CandidateSource::ListMode;
  std::optional<PriorDistribution> prior;
};

struct PromptOptions {
  bool include_emotions = true;
};

// "(1) name" lines in catalog order.
std::string render_options(const ActionCatalog& catalog);

// Instruction and directive for the top-k list query.
struct PolicyPrompt {
  std::string instruction;
  std::string directive;
  std::string text() const { return instruction + "\n\n" + directive; }
};

PolicyPrompt build_policy_prompt(const DialogueState& state, const TaskProfile& profile, int k,
                                 PromptOptions options = {});

// Parses the first comma-separated run of integers. Duplicates and
// out-of-range entries are dropped, the result is cut to k and padded with
// the lowest unused indices. Throws UnparseableOutput when raw has no digit.
CandidateSet parse_topk_list(std::string_view raw, const ActionCatalog& catalog, int k);

// The candidate set used when the policy reply is unusable: the fallback
// action followed by the first k-1 other actions.
CandidateSet fallback_candidates(const ActionCatalog& catalog, int noop_index, int k);

// Grouped softmax over projected beam continuations.
PriorDistribution estimate_prior_beam(const std::vector<Continuation>& continuations,
                                      const ProjectionTable& table);

// Highest-weight actions, ties to the lower index, padded from unused
// indices in ascending order.
CandidateSet top_k(const PriorDistribution& prior, int k, const ActionCatalog& catalog);

CandidateSet full_catalog(const ActionCatalog& catalog);

enum class PriorMode { ListMode, BeamMode };

struct PriorConfig {
  PriorMode mode = PriorMode::ListMode;
  int k = 4;
  int beam_width = 8;
  bool use_prior = true;  // false: every catalog action is a candidate
  double temperature = 1.0;
  PromptOptions prompt;
};

/// Produces one turn's candidate set by querying the policy role.
class ActionPrior {
 public:
  ActionPrior(const TaskProfile& profile, ProjectionTable table, PriorConfig config);

  CandidateSet propose(const DialogueState& state, Gateway& gateway) const;

  ChatRequest list_request(const DialogueState& state, const Gateway& gateway) const;
  ChatRequest beam_request(const DialogueState& state, const Gateway& gateway) const;

  const PriorConfig& config() const { return config_; }
  const ProjectionTable& table() const { return table_; }

 private:
  TaskProfile profile_;
  ProjectionTable table_;
  PriorConfig config_;
};

}  // namespace dialplan
