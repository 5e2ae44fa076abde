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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dialplan/action_prior.hpp"
#include "dialplan/learner.hpp"
#include "dialplan/llm_gateway.hpp"
#include "dialplan/types.hpp"
#include "dialplan/value_model.hpp"

namespace dialplan {

enum class RunMode { Train, Eval, Chat, Simulate };

// Where the LLM roles are served from.
enum class BackendKind { Mock, Script, Http };

struct EncoderConfig {
  std::string kind = "hash";  // "hash" or "http"
  std::string endpoint;
  std::size_t dim = kDefaultEncoderDim;
  std::uint64_t seed = 0;
};

struct RunConfig {
  TaskId task = TaskId::ESConv;
  RunMode mode = RunMode::Simulate;
  int k = 4;
  double epsilon_eval = 0.5;
  TrainConfig train;
  PriorMode prior_mode = PriorMode::ListMode;
  int beam_width = 8;

  // Ablations.
  bool use_rl = true;
  bool use_prior = true;
  bool use_emotion = true;
  bool at_count_failures = true;

  std::size_t max_turns = 8;
  std::size_t eval_episodes = 100;
  std::size_t hidden1 = 256;
  std::size_t hidden2 = 256;
  std::uint64_t seed = 7;
  std::size_t workers = 1;
  std::size_t collect_batch = 1;  // episodes collected between update rounds

  BackendKind backend = BackendKind::Mock;
  std::string script_path;
  HttpBackendConfig http;                          // shared default
  std::map<RoleTag, HttpBackendConfig> role_http;  // per-role overrides
  GatewayConfig gateway;
  EncoderConfig encoder;

  std::string cases_path;       // empty: generated mock cases
  std::string projection_path;  // empty: built-in table
  std::string checkpoint_in;
  std::string output_dir = "runs/latest";

  void validate() const;  // throws InvalidArgument
};

std::string_view to_string(RunMode mode);
RunMode run_mode_from_string(std::string_view name);
BackendKind backend_from_string(std::string_view name);

// Reads a JSON config. Keys mirror the RunConfig fields; the training
// hyperparameters live under "train", endpoints under "http" and
// "roles": {"Critic": {"endpoint": ..., "model": ...}}. Unknown keys are
// rejected. Environment variables LLM_ENDPOINT, LLM_MODEL, LLM_API_KEY and
// ENCODER_ENDPOINT override the file.
RunConfig parse_run_config(const std::string& json_text, RunConfig base = {});
RunConfig load_run_config(const std::string& path, RunConfig base = {});
void apply_env_overrides(RunConfig& config);

// Case files are JSON arrays of {"id", "task", "background",
// "numeric_slots", "text_slots"}. Every case is validated.
std::vector<CaseInfo> parse_cases(const std::string& json_text);
std::vector<CaseInfo> load_cases(const std::string& path);
std::vector<CaseInfo> cases_for_task(const std::vector<CaseInfo>& cases, TaskId task);

}  // namespace dialplan
