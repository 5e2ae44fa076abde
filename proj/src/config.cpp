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

#include "dialplan/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dialplan/errors.hpp"

namespace dialplan {

using nlohmann::json;

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Train: return "train";
    case RunMode::Eval: return "eval";
    case RunMode::Chat: return "chat";
    case RunMode::Simulate: return "simulate";
  }
  return "?";
}

RunMode run_mode_from_string(std::string_view name) {
  for (RunMode m : {RunMode::Train, RunMode::Eval, RunMode::Chat, RunMode::Simulate}) {
    if (to_string(m) == name) return m;
  }
  throw InvalidArgument("unknown mode: " + std::string(name));
}

BackendKind backend_from_string(std::string_view name) {
  if (name == "mock") return BackendKind::Mock;
  if (name == "script") return BackendKind::Script;
  if (name == "http") return BackendKind::Http;
  throw InvalidArgument("unknown backend: " + std::string(name) + " (mock, script, http)");
}

void RunConfig::validate() const {
  train.validate();
  if (k < 1) throw InvalidArgument("k must be at least 1");
  if (epsilon_eval < 0.0 || epsilon_eval > 1.0) throw InvalidArgument("epsilon_eval must lie in [0, 1]");
  if (beam_width < 1) throw InvalidArgument("beam_width must be at least 1");
  if (max_turns == 0) throw InvalidArgument("max_turns must be positive");
  if (workers == 0 || collect_batch == 0) throw InvalidArgument("workers and collect_batch must be positive");
  if (hidden1 == 0 || hidden2 == 0 || encoder.dim == 0) throw InvalidArgument("layer sizes must be positive");
  if (encoder.kind != "hash" && encoder.kind != "http") {
    throw InvalidArgument("encoder.kind must be hash or http");
  }
  if (backend == BackendKind::Script && script_path.empty()) {
    throw InvalidArgument("the script backend needs script_path");
  }
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw InvalidArgument("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_http(const json& j, HttpBackendConfig& h, const std::string& where) {
  check_keys(j, {"endpoint", "model", "api_key", "timeout_s", "logprobs"}, where);
  read(j, "endpoint", h.endpoint);
  read(j, "model", h.model);
  read(j, "api_key", h.api_key);
  read(j, "logprobs", h.supports_logprobs);
  if (j.contains("timeout_s")) h.timeout = std::chrono::seconds(j.at("timeout_s").get<int>());
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, RunConfig c) {
  try {
    const json j = json::parse(json_text);
    check_keys(j,
               {"task", "mode", "k", "epsilon_eval", "train", "prior_mode", "beam_width", "use_rl",
                "use_prior", "use_emotion", "at_count_failures", "max_turns", "eval_episodes",
                "hidden1", "hidden2", "seed", "workers", "collect_batch", "backend",
                "script_path", "http", "roles", "gateway", "encoder", "cases_path",
                "projection_path", "checkpoint_in", "output_dir"},
               "config");
    if (j.contains("task")) c.task = task_from_string(j.at("task").get<std::string>());
    if (j.contains("mode")) c.mode = run_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("backend")) c.backend = backend_from_string(j.at("backend").get<std::string>());
    if (j.contains("prior_mode")) {
      const auto m = j.at("prior_mode").get<std::string>();
      if (m == "list") c.prior_mode = PriorMode::ListMode;
      else if (m == "beam") c.prior_mode = PriorMode::BeamMode;
      else throw InvalidArgument("prior_mode must be list or beam");
    }
    read(j, "k", c.k);
    read(j, "epsilon_eval", c.epsilon_eval);
    read(j, "beam_width", c.beam_width);
    read(j, "use_rl", c.use_rl);
    read(j, "use_prior", c.use_prior);
    read(j, "use_emotion", c.use_emotion);
    read(j, "at_count_failures", c.at_count_failures);
    read(j, "max_turns", c.max_turns);
    read(j, "eval_episodes", c.eval_episodes);
    read(j, "hidden1", c.hidden1);
    read(j, "hidden2", c.hidden2);
    read(j, "seed", c.seed);
    read(j, "workers", c.workers);
    read(j, "collect_batch", c.collect_batch);
    read(j, "script_path", c.script_path);
    read(j, "cases_path", c.cases_path);
    read(j, "projection_path", c.projection_path);
    read(j, "checkpoint_in", c.checkpoint_in);
    read(j, "output_dir", c.output_dir);

    if (j.contains("train")) {
      const json& t = j.at("train");
      check_keys(t,
                 {"gamma", "batch_size", "learning_rate", "epochs", "episodes", "epsilon_start",
                  "epsilon_end", "target_sync_every", "buffer_capacity", "updates_per_episode",
                  "optimizer", "adam_beta1", "adam_beta2", "adam_eps"},
                 "train");
      read(t, "gamma", c.train.gamma);
      read(t, "batch_size", c.train.batch_size);
      read(t, "learning_rate", c.train.learning_rate);
      read(t, "epochs", c.train.epochs);
      read(t, "episodes", c.train.episodes);
      read(t, "epsilon_start", c.train.epsilon_start);
      read(t, "epsilon_end", c.train.epsilon_end);
      read(t, "target_sync_every", c.train.target_sync_every);
      read(t, "buffer_capacity", c.train.buffer_capacity);
      read(t, "updates_per_episode", c.train.updates_per_episode);
      read(t, "adam_beta1", c.train.adam_beta1);
      read(t, "adam_beta2", c.train.adam_beta2);
      read(t, "adam_eps", c.train.adam_eps);
      if (t.contains("optimizer")) {
        const auto o = t.at("optimizer").get<std::string>();
        if (o == "sgd") c.train.optimizer = OptimizerKind::GradientDescent;
        else if (o == "adam") c.train.optimizer = OptimizerKind::Adam;
        else throw InvalidArgument("optimizer must be sgd or adam");
      }
    }
    if (j.contains("http")) read_http(j.at("http"), c.http, "http");
    if (j.contains("roles")) {
      for (const auto& [name, rj] : j.at("roles").items()) {
        HttpBackendConfig h = c.http;
        read_http(rj, h, "roles." + name);
        c.role_http[role_from_string(name)] = h;
      }
    }
    if (j.contains("gateway")) {
      const json& g = j.at("gateway");
      check_keys(g, {"max_retries", "backoff_ms", "call_budget", "context_tokens"}, "gateway");
      read(g, "max_retries", c.gateway.max_retries);
      read(g, "call_budget", c.gateway.call_budget);
      read(g, "context_tokens", c.gateway.context_tokens);
      if (g.contains("backoff_ms")) {
        c.gateway.backoff_base = std::chrono::milliseconds(g.at("backoff_ms").get<int>());
      }
    }
    if (j.contains("encoder")) {
      const json& e = j.at("encoder");
      check_keys(e, {"kind", "endpoint", "dim", "seed"}, "encoder");
      read(e, "kind", c.encoder.kind);
      read(e, "endpoint", c.encoder.endpoint);
      read(e, "dim", c.encoder.dim);
      read(e, "seed", c.encoder.seed);
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad config: ") + e.what());
  }
  apply_env_overrides(c);
  return c;
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), std::move(base));
}

void apply_env_overrides(RunConfig& c) {
  c.http = http_config_from_env(c.http);
  for (auto& [role, h] : c.role_http) {
    if (std::getenv("LLM_API_KEY")) h.api_key = std::getenv("LLM_API_KEY");
  }
  if (const char* e = std::getenv("ENCODER_ENDPOINT")) {
    c.encoder.endpoint = e;
  }
}

std::vector<CaseInfo> parse_cases(const std::string& json_text) {
  std::vector<CaseInfo> out;
  try {
    const json j = json::parse(json_text);
    if (!j.is_array()) throw InvalidArgument("case file must hold a JSON array");
    for (const json& cj : j) {
      check_keys(cj, {"id", "task", "background", "numeric_slots", "text_slots"}, "case");
      CaseInfo c;
      c.id = cj.at("id").get<std::string>();
      c.task = task_from_string(cj.at("task").get<std::string>());
      c.background = cj.at("background").get<std::string>();
      read(cj, "numeric_slots", c.numeric_slots);
      read(cj, "text_slots", c.text_slots);
      c.validate();
      out.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad case file: ") + e.what());
  }
  return out;
}

std::vector<CaseInfo> load_cases(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read cases " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_cases(ss.str());
}

std::vector<CaseInfo> cases_for_task(const std::vector<CaseInfo>& cases, TaskId task) {
  std::vector<CaseInfo> out;
  for (const CaseInfo& c : cases) {
    if (c.task == task) out.push_back(c);
  }
  return out;
}

}  // namespace dialplan
