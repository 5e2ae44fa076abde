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
#include <cstdint>
#include <memory>
#include <vector>

#include "dialplan/llm_gateway.hpp"
#include "dialplan/tasks.hpp"

namespace dialplan {

/// A deterministic stand-in for all five LLM roles on one case. Every case
/// has a hidden preferred action. The system role announces the strategy it
/// was asked to use, and the critic completes the dialogue exactly when the
/// preferred action was used (a bargaining deal lands at a case-specific
/// price). All other replies are pure functions of the request text and the
/// case, so runs are reproducible on any machine.
struct MockWorldOptions {
  bool allow_completion = true;
  // Share of policy replies, out of 10, that list the preferred action.
  int prior_hits_per_10 = 8;
};

int preferred_action(const CaseInfo& case_info, const ActionCatalog& catalog);

// Price the mock critic settles on for a bargaining case.
double mock_deal_price(const CaseInfo& case_info);

// n synthetic, valid cases for `task`.
std::vector<CaseInfo> mock_cases(TaskId task, std::size_t n, std::uint64_t seed = 0);

ScriptedBackend::Responder mock_responder(const TaskProfile& profile, const CaseInfo& case_info,
                                          MockWorldOptions options = {});

std::shared_ptr<ScriptedBackend> make_mock_backend(const TaskProfile& profile,
                                                   const CaseInfo& case_info,
                                                   MockWorldOptions options = {});

}  // namespace dialplan
