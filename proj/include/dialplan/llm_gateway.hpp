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

#include <array>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dialplan/types.hpp"

namespace dialplan {

// Which self-play role a request belongs to. Each role may be routed to its
// own backend.
enum class RoleTag { Policy, System, User, Critic, Emotion };
inline constexpr std::size_t kRoleCount = 5;

std::string_view to_string(RoleTag role);
RoleTag role_from_string(std::string_view name);

enum class MessageRole { System, User, Assistant };

struct ChatMessage {
  MessageRole role = MessageRole::User;
  std::string text;
};

inline constexpr int kProposalMaxTokens = 25;
inline constexpr int kTurnMaxTokens = 100;
inline constexpr int kEmotionMaxTokens = 10;

struct ChatRequest {
  RoleTag role_tag = RoleTag::System;
  std::string system_prompt;
  std::vector<ChatMessage> messages;
  double temperature = 1.0;
  int max_tokens = kTurnMaxTokens;
  bool want_logprobs = false;
  std::optional<int> beam_width;

  // Text of the final message, or "" when there is none.
  std::string_view last_message() const;
};

struct Continuation {
  std::string text;
  std::optional<double> logprob;

  bool operator==(const Continuation&) const = default;
};

struct ChatResponse {
  std::vector<Continuation> continuations;

  const std::string& text() const { return continuations.front().text; }
  bool operator==(const ChatResponse&) const = default;
};

ChatResponse single_response(std::string text);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  // Throws TransportError for failures worth retrying, ProtocolError for
  // everything else.
  virtual ChatResponse complete(const ChatRequest& req) = 0;
  virtual bool supports_logprobs() const = 0;
};

/// Deterministic in-process backend. A request is answered by the first
/// entry whose role matches and whose key is a substring of the request's
/// last message (an empty key matches anything), then by the optional
/// responder, then by `default_response`. Replies are cut to the request's
/// max_tokens whitespace-separated words.
class ScriptedBackend : public ChatBackend {
 public:
  struct Entry {
    RoleTag role = RoleTag::System;
    std::string key;
    ChatResponse response;
  };
  // Returns nullopt to fall through to the default response.
  using Responder = std::function<std::optional<ChatResponse>(const ChatRequest&)>;

  ScriptedBackend() : default_response_(single_response("")) {}
  ScriptedBackend(std::vector<Entry> entries, ChatResponse default_response);

  void add(RoleTag role, std::string key, ChatResponse response);
  void set_responder(Responder responder) { responder_ = std::move(responder); }
  void set_default(ChatResponse response) { default_response_ = std::move(response); }
  void set_supports_logprobs(bool v) { logprobs_ = v; }

  ChatResponse complete(const ChatRequest& req) override;
  bool supports_logprobs() const override { return logprobs_; }

  // Script file: JSON object {"default": text, "entries": [{"role": "Critic",
  // "key": "...", "responses": [text...], "logprobs": [number...]}]}.
  static ScriptedBackend load(const std::string& path);
  static ScriptedBackend parse(std::string_view json_text);

 private:
  std::vector<Entry> entries_;
  ChatResponse default_response_;
  Responder responder_;
  bool logprobs_ = true;
};

struct HttpBackendConfig {
  std::string endpoint;  // e.g. http://localhost:8000/v1/chat/completions
  std::string model;
  std::string api_key;
  std::chrono::seconds timeout{60};
  bool supports_logprobs = true;
};

// Fills endpoint/model/api_key from LLM_ENDPOINT, LLM_MODEL and LLM_API_KEY
// where those are set.
HttpBackendConfig http_config_from_env(HttpBackendConfig base = {});

/// OpenAI-compatible chat completions client. Beam requests are sent as
/// n=K with token logprobs; a continuation's logprob is the sum over its
/// tokens.
class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(HttpBackendConfig config);
  ChatResponse complete(const ChatRequest& req) override;
  bool supports_logprobs() const override { return config_.supports_logprobs; }

  // Wire helpers, exposed for tests.
  std::string build_body(const ChatRequest& req) const;
  static ChatResponse parse_body(std::string_view body, bool want_logprobs);

 private:
  HttpBackendConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

struct GatewayConfig {
  int max_retries = 2;
  std::chrono::milliseconds backoff_base{250};
  std::size_t call_budget = 0;     // 0 = unlimited
  std::size_t context_tokens = 0;  // 0 = no truncation
};

/// The single boundary through which every role talks to an LLM. Adds
/// retries with exponential backoff, a per-run call budget and per-role
/// call accounting on top of the routed backends. Safe to share between
/// threads as long as the backends are.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<ChatBackend> backend, GatewayConfig config = {});

  void route(RoleTag role, std::shared_ptr<ChatBackend> backend);
  ChatBackend& backend_for(RoleTag role) const;

  ChatResponse complete(const ChatRequest& req);

  // Requires want_logprobs and beam_width=K. Returns exactly K continuations
  // sorted by logprob, highest first. Throws UnsupportedCapability when the
  // routed backend has no logprobs.
  ChatResponse complete_beam(const ChatRequest& req);

  std::size_t calls(RoleTag role) const;
  std::size_t total_calls() const;
  void reset_counters();

  const GatewayConfig& config() const { return config_; }

  // Rough token estimate used for the context budget.
  static std::size_t estimate_tokens(std::string_view text);

  // Drops the oldest history turns two at a time until `render(history)`
  // fits the context budget, or the history is empty.
  std::vector<Utterance> fit_history(
      std::vector<Utterance> history,
      const std::function<std::string(const std::vector<Utterance>&)>& render) const;

 private:
  ChatResponse call_with_retries(const ChatRequest& req);

  GatewayConfig config_;
  std::array<std::shared_ptr<ChatBackend>, kRoleCount> backends_;
  std::array<std::atomic<std::size_t>, kRoleCount> calls_{};
  std::atomic<std::size_t> total_{0};
};

}  // namespace dialplan
