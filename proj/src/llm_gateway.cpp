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

#include "dialplan/llm_gateway.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "dialplan/errors.hpp"

namespace dialplan {

using json = nlohmann::json;

std::string_view to_string(RoleTag role) {
  switch (role) {
    case RoleTag::Policy: return "Policy";
    case RoleTag::System: return "System";
    case RoleTag::User: return "User";
    case RoleTag::Critic: return "Critic";
    case RoleTag::Emotion: return "Emotion";
  }
  return "?";
}

RoleTag role_from_string(std::string_view name) {
  for (RoleTag r : {RoleTag::Policy, RoleTag::System, RoleTag::User, RoleTag::Critic,
                    RoleTag::Emotion}) {
    if (to_string(r) == name) return r;
  }
  throw InvalidArgument("unknown role tag: " + std::string(name));
}

std::string_view ChatRequest::last_message() const {
  return messages.empty() ? std::string_view() : std::string_view(messages.back().text);
}

ChatResponse single_response(std::string text) {
  return ChatResponse{{Continuation{std::move(text), std::nullopt}}};
}

namespace {

std::string truncate_words(const std::string& text, int max_tokens) {
  if (max_tokens <= 0) return text;
  std::size_t words = 0;
  bool in_word = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const bool space = std::isspace(static_cast<unsigned char>(text[i])) != 0;
    if (!space && !in_word) {
      if (words == static_cast<std::size_t>(max_tokens)) {
        std::size_t end = i;
        while (end > 0 && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
        return text.substr(0, end);
      }
      ++words;
    }
    in_word = !space;
  }
  return text;
}

}  // namespace

// ---------------------------------------------------------------------------
// ScriptedBackend

ScriptedBackend::ScriptedBackend(std::vector<Entry> entries, ChatResponse default_response)
    : entries_(std::move(entries)), default_response_(std::move(default_response)) {}

void ScriptedBackend::add(RoleTag role, std::string key, ChatResponse response) {
  entries_.push_back({role, std::move(key), std::move(response)});
}

ChatResponse ScriptedBackend::complete(const ChatRequest& req) {
  const std::string_view last = req.last_message();
  ChatResponse out = default_response_;
  bool matched = false;
  for (const Entry& e : entries_) {
    if (e.role == req.role_tag && last.find(e.key) != std::string_view::npos) {
      out = e.response;
      matched = true;
      break;
    }
  }
  if (!matched && responder_) {
    if (auto r = responder_(req)) out = std::move(*r);
  }
  for (Continuation& c : out.continuations) c.text = truncate_words(c.text, req.max_tokens);
  return out;
}

ScriptedBackend ScriptedBackend::parse(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("script file is not valid JSON: ") + e.what());
  }
  ScriptedBackend backend;
  backend.set_default(single_response(doc.value("default", std::string())));
  for (const json& e : doc.value("entries", json::array())) {
    ChatResponse resp;
    const auto texts = e.at("responses").get<std::vector<std::string>>();
    std::vector<double> lps;
    if (e.contains("logprobs")) lps = e.at("logprobs").get<std::vector<double>>();
    if (!lps.empty() && lps.size() != texts.size()) {
      throw InvalidArgument("script entry: logprobs and responses differ in length");
    }
    for (std::size_t i = 0; i < texts.size(); ++i) {
      std::optional<double> lp;
      if (!lps.empty()) lp = lps[i];
      resp.continuations.push_back({texts[i], lp});
    }
    if (resp.continuations.empty()) throw InvalidArgument("script entry without responses");
    backend.add(role_from_string(e.at("role").get<std::string>()), e.value("key", std::string()),
                std::move(resp));
  }
  return backend;
}

ScriptedBackend ScriptedBackend::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open script file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

// ---------------------------------------------------------------------------
// HttpChatBackend

HttpBackendConfig http_config_from_env(HttpBackendConfig base) {
  if (const char* v = std::getenv("LLM_ENDPOINT")) base.endpoint = v;
  if (const char* v = std::getenv("LLM_MODEL")) base.model = v;
  if (const char* v = std::getenv("LLM_API_KEY")) base.api_key = v;
  return base;
}

HttpChatBackend::HttpChatBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const std::string& url = config_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidArgument("endpoint must start with http:// or https://: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? std::string() : url.substr(path_start);
  if (path_.empty() || path_ == "/") {
    path_ = "/v1/chat/completions";
  } else if (path_.size() >= 3 && path_.compare(path_.size() - 3, 3, "/v1") == 0) {
    path_ += "/chat/completions";
  }
}

std::string HttpChatBackend::build_body(const ChatRequest& req) const {
  json messages = json::array();
  if (!req.system_prompt.empty()) {
    messages.push_back({{"role", "system"}, {"content", req.system_prompt}});
  }
  for (const ChatMessage& m : req.messages) {
    const char* role = m.role == MessageRole::System ? "system"
                       : m.role == MessageRole::User ? "user"
                                                     : "assistant";
    messages.push_back({{"role", role}, {"content", m.text}});
  }
  json body = {{"model", config_.model},
               {"messages", messages},
               {"temperature", req.temperature},
               {"max_tokens", req.max_tokens}};
  if (req.want_logprobs) {
    body["logprobs"] = true;
    body["top_logprobs"] = 1;
    body["n"] = req.beam_width.value_or(1);
  }
  return body.dump();
}

ChatResponse HttpChatBackend::parse_body(std::string_view body, bool want_logprobs) {
  ChatResponse out;
  try {
    const json doc = json::parse(body);
    for (const json& choice : doc.at("choices")) {
      Continuation c;
      const json& content = choice.at("message").at("content");
      c.text = content.is_null() ? std::string() : content.get<std::string>();
      if (want_logprobs) {
        const json* lp = choice.contains("logprobs") ? &choice.at("logprobs") : nullptr;
        if (lp == nullptr || lp->is_null() || !lp->contains("content") ||
            lp->at("content").is_null()) {
          throw UnsupportedCapability("backend response carries no logprobs");
        }
        double sum = 0.0;
        for (const json& tok : lp->at("content")) sum += tok.at("logprob").get<double>();
        c.logprob = sum;
      }
      out.continuations.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed chat completion body: ") + e.what());
  }
  if (out.continuations.empty()) throw ProtocolError("chat completion without choices");
  return out;
}

ChatResponse HttpChatBackend::complete(const ChatRequest& req) {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  auto res = client.Post(path_, headers, build_body(req), "application/json");
  if (!res) {
    throw TransportError("request to " + config_.endpoint + " failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status >= 500) {
    throw TransportError("HTTP " + std::to_string(res->status) + " from " + config_.endpoint);
  }
  if (res->status >= 400) {
    throw ProtocolError("HTTP " + std::to_string(res->status) + " from " + config_.endpoint +
                        ": " + res->body);
  }
  return parse_body(res->body, req.want_logprobs);
}

// ---------------------------------------------------------------------------
// Gateway

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, GatewayConfig config)
    : config_(config) {
  if (!backend) throw InvalidArgument("gateway needs a backend");
  backends_.fill(std::move(backend));
}

void Gateway::route(RoleTag role, std::shared_ptr<ChatBackend> backend) {
  if (!backend) throw InvalidArgument("null backend");
  backends_[static_cast<std::size_t>(role)] = std::move(backend);
}

ChatBackend& Gateway::backend_for(RoleTag role) const {
  return *backends_[static_cast<std::size_t>(role)];
}

ChatResponse Gateway::call_with_retries(const ChatRequest& req) {
  const std::size_t n = total_.fetch_add(1) + 1;
  if (config_.call_budget != 0 && n > config_.call_budget) {
    total_.fetch_sub(1);
    throw BudgetExceeded("LLM call budget of " + std::to_string(config_.call_budget) +
                         " exhausted");
  }
  calls_[static_cast<std::size_t>(req.role_tag)].fetch_add(1);
  ChatBackend& backend = backend_for(req.role_tag);
  for (int attempt = 0;; ++attempt) {
    try {
      ChatResponse resp = backend.complete(req);
      if (resp.continuations.empty()) throw ProtocolError("backend returned no continuations");
      return resp;
    } catch (const TransportError&) {
      if (attempt >= config_.max_retries) throw;
      std::this_thread::sleep_for(config_.backoff_base * (1LL << attempt));
    }
  }
}

ChatResponse Gateway::complete(const ChatRequest& req) {
  if (req.temperature < 0.0) throw InvalidArgument("temperature must be >= 0");
  if (req.max_tokens <= 0) throw InvalidArgument("max_tokens must be positive");
  return call_with_retries(req);
}

ChatResponse Gateway::complete_beam(const ChatRequest& req) {
  if (!req.want_logprobs || !req.beam_width || *req.beam_width < 1) {
    throw InvalidArgument("beam requests need want_logprobs and beam_width >= 1");
  }
  if (!backend_for(req.role_tag).supports_logprobs()) {
    throw UnsupportedCapability("backend for role " + std::string(to_string(req.role_tag)) +
                                " returns no logprobs");
  }
  ChatResponse resp = complete(req);
  for (const Continuation& c : resp.continuations) {
    if (!c.logprob) throw UnsupportedCapability("continuation without logprob");
    if (!std::isfinite(*c.logprob)) throw ProtocolError("non-finite logprob");
  }
  std::stable_sort(resp.continuations.begin(), resp.continuations.end(),
                   [](const Continuation& a, const Continuation& b) {
                     return *a.logprob > *b.logprob;
                   });
  const auto k = static_cast<std::size_t>(*req.beam_width);
  if (resp.continuations.size() < k) {
    throw ProtocolError("backend returned " + std::to_string(resp.continuations.size()) +
                        " continuations, wanted " + std::to_string(k));
  }
  resp.continuations.resize(k);
  return resp;
}

std::size_t Gateway::calls(RoleTag role) const {
  return calls_[static_cast<std::size_t>(role)].load();
}

std::size_t Gateway::total_calls() const { return total_.load(); }

void Gateway::reset_counters() {
  for (auto& c : calls_) c.store(0);
  total_.store(0);
}

std::size_t Gateway::estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::vector<Utterance> Gateway::fit_history(
    std::vector<Utterance> history,
    const std::function<std::string(const std::vector<Utterance>&)>& render) const {
  if (config_.context_tokens == 0) return history;
  while (!history.empty() && estimate_tokens(render(history)) > config_.context_tokens) {
    const std::size_t drop = std::min<std::size_t>(2, history.size());
    history.erase(history.begin(), history.begin() + static_cast<std::ptrdiff_t>(drop));
  }
  return history;
}

}  // namespace dialplan
