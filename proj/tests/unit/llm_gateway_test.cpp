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

#include <atomic>
#include <chrono>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "dialplan/errors.hpp"
#include "dialplan/llm_gateway.hpp"

namespace dialplan {
namespace {

ChatRequest request(RoleTag role, std::string last, int max_tokens = kTurnMaxTokens) {
  ChatRequest r;
  r.role_tag = role;
  r.messages.push_back({MessageRole::User, std::move(last)});
  r.max_tokens = max_tokens;
  return r;
}

ChatResponse beam(std::vector<std::pair<std::string, double>> items) {
  ChatResponse r;
  for (auto& [t, lp] : items) r.continuations.push_back({t, lp});
  return r;
}

std::shared_ptr<ScriptedBackend> scripted() {
  auto b = std::make_shared<ScriptedBackend>();
  b->set_default(single_response("default reply"));
  b->add(RoleTag::Critic, "solved?", single_response("Yes, solved."));
  b->add(RoleTag::Policy, "TOP", beam({{"b", -2.0}, {"a", -0.5}, {"c", -1.0}}));
  return b;
}

TEST(ScriptedBackend, MatchedKeyReturnsCannedResponse) {
  Gateway gw(scripted());
  EXPECT_EQ(gw.complete(request(RoleTag::Critic, "is it solved?")).text(), "Yes, solved.");
}

TEST(ScriptedBackend, UnmatchedKeyReturnsDefault) {
  Gateway gw(scripted());
  EXPECT_EQ(gw.complete(request(RoleTag::Critic, "something else")).text(), "default reply");
  // Role must match as well as the key.
  EXPECT_EQ(gw.complete(request(RoleTag::User, "is it solved?")).text(), "default reply");
}

TEST(ScriptedBackend, RepliesAreCutToMaxTokens) {
  auto b = std::make_shared<ScriptedBackend>();
  b->set_default(single_response("one two  three four five"));
  Gateway gw(b);
  EXPECT_EQ(gw.complete(request(RoleTag::User, "x", 3)).text(), "one two  three");
}

TEST(ScriptedBackend, ResponderFillsGaps) {
  auto b = scripted();
  b->set_responder([](const ChatRequest& r) -> std::optional<ChatResponse> {
    if (r.role_tag == RoleTag::Emotion) return single_response("calm");
    return std::nullopt;
  });
  Gateway gw(b);
  EXPECT_EQ(gw.complete(request(RoleTag::Emotion, "hi")).text(), "calm");
  EXPECT_EQ(gw.complete(request(RoleTag::User, "hi")).text(), "default reply");
}

TEST(ScriptedBackend, ParsesScriptFile) {
  const auto b = ScriptedBackend::parse(R"({"default": "d", "entries": [
      {"role": "Critic", "key": "deal", "responses": ["They have reached a deal at 120"]},
      {"role": "Policy", "key": "", "responses": ["x", "y"], "logprobs": [-1, -2]}]})");
  ScriptedBackend copy = b;
  EXPECT_EQ(copy.complete(request(RoleTag::Critic, "deal?")).text(),
            "They have reached a deal at 120");
  const ChatResponse p = copy.complete(request(RoleTag::Policy, "anything"));
  ASSERT_EQ(p.continuations.size(), 2u);
  EXPECT_EQ(p.continuations[1].logprob, -2.0);
  EXPECT_THROW(ScriptedBackend::parse("{"), InvalidArgument);
  EXPECT_THROW(ScriptedBackend::parse(
                   R"({"entries": [{"role": "Policy", "responses": ["x"], "logprobs": [1, 2]}]})"),
               InvalidArgument);
}

TEST(ScriptedBackend, ConcurrentCallsGiveTheSameAnswers) {
  Gateway gw(scripted());
  std::vector<std::thread> threads;
  std::atomic<int> wrong{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 200; ++i) {
        if (gw.complete(request(RoleTag::Critic, "solved?")).text() != "Yes, solved.") ++wrong;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(wrong.load(), 0);
  EXPECT_EQ(gw.calls(RoleTag::Critic), 1600u);
}

TEST(CompleteBeam, SortsDescending) {
  Gateway gw(scripted());
  ChatRequest r = request(RoleTag::Policy, "TOP");
  r.want_logprobs = true;
  r.beam_width = 3;
  const ChatResponse resp = gw.complete_beam(r);
  ASSERT_EQ(resp.continuations.size(), 3u);
  EXPECT_EQ(resp.continuations[0].text, "a");
  EXPECT_EQ(resp.continuations[1].text, "c");
  EXPECT_EQ(resp.continuations[2].text, "b");
}

TEST(CompleteBeam, WidthOneKeepsTheBest) {
  Gateway gw(scripted());
  ChatRequest r = request(RoleTag::Policy, "TOP");
  r.want_logprobs = true;
  r.beam_width = 1;
  const ChatResponse resp = gw.complete_beam(r);
  ASSERT_EQ(resp.continuations.size(), 1u);
  EXPECT_EQ(resp.continuations[0].text, "a");
}

TEST(CompleteBeam, NoLogprobsIsUnsupported) {
  auto b = scripted();
  b->set_supports_logprobs(false);
  Gateway gw(b);
  ChatRequest r = request(RoleTag::Policy, "TOP");
  r.want_logprobs = true;
  r.beam_width = 3;
  EXPECT_THROW(gw.complete_beam(r), UnsupportedCapability);
  // A capable backend that answers without logprobs is just as unusable.
  Gateway gw2(scripted());
  ChatRequest plain = request(RoleTag::User, "x");
  plain.want_logprobs = true;
  plain.beam_width = 1;
  EXPECT_THROW(gw2.complete_beam(plain), UnsupportedCapability);
}

TEST(Gateway, BudgetIsEnforced) {
  GatewayConfig cfg;
  cfg.call_budget = 2;
  Gateway gw(scripted(), cfg);
  gw.complete(request(RoleTag::User, "a"));
  gw.complete(request(RoleTag::User, "b"));
  EXPECT_THROW(gw.complete(request(RoleTag::User, "c")), BudgetExceeded);
  EXPECT_EQ(gw.total_calls(), 2u);
}

TEST(Gateway, RoutesRolesToTheirBackends) {
  auto critic = std::make_shared<ScriptedBackend>();
  critic->set_default(single_response("from critic backend"));
  Gateway gw(scripted());
  gw.route(RoleTag::Critic, critic);
  EXPECT_EQ(gw.complete(request(RoleTag::Critic, "x")).text(), "from critic backend");
  EXPECT_EQ(gw.complete(request(RoleTag::User, "x")).text(), "default reply");
}

TEST(Gateway, FitHistoryDropsOldestPairs) {
  GatewayConfig cfg;
  cfg.context_tokens = 10;
  Gateway gw(scripted(), cfg);
  std::vector<Utterance> h;
  for (std::size_t i = 0; i < 6; ++i) {
    h.push_back({i % 2 ? Speaker::User : Speaker::System, std::string(12, 'a' + i), i});
  }
  auto render = [](const std::vector<Utterance>& hist) {
    std::string s;
    for (const auto& u : hist) s += u.text;
    return s;
  };
  const auto fitted = gw.fit_history(h, render);
  // 12 chars are 3 tokens each: three utterances (9 tokens) would fit but
  // drops come in pairs, so two remain.
  ASSERT_EQ(fitted.size(), 2u);
  EXPECT_EQ(fitted[0].text, h[4].text);
  EXPECT_EQ(fitted[1].text, h[5].text);
}

// A local chat-completions server for the wire-level tests.
class LocalServer {
 public:
  template <typename Handler>
  explicit LocalServer(Handler h) {
    server_.Post("/v1/chat/completions", h);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

constexpr const char* kOkBody =
    R"({"choices": [{"message": {"content": "hello"}, "logprobs": {"content": [
        {"token": "hel", "logprob": -0.25}, {"token": "lo", "logprob": -0.5}]}}]})";

TEST(HttpChatBackend, ServerErrorsExhaustRetries) {
  std::atomic<int> hits{0};
  LocalServer server([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 500;
  });
  GatewayConfig cfg;
  cfg.max_retries = 2;
  cfg.backoff_base = std::chrono::milliseconds(1);
  Gateway gw(std::make_shared<HttpChatBackend>(HttpBackendConfig{server.url(), "m", "", std::chrono::seconds(5), true}),
             cfg);
  EXPECT_THROW(gw.complete(request(RoleTag::System, "hi")), TransportError);
  EXPECT_EQ(hits.load(), 3);
}

TEST(HttpChatBackend, RecoversAfterTransientFailure) {
  std::atomic<int> hits{0};
  std::string seen_body;
  LocalServer server([&](const httplib::Request& req, httplib::Response& res) {
    if (hits++ == 0) {
      res.status = 503;
      return;
    }
    seen_body = req.body;
    res.set_content(kOkBody, "application/json");
  });
  GatewayConfig cfg;
  cfg.backoff_base = std::chrono::milliseconds(1);
  HttpBackendConfig hc{server.url(), "test-model", "secret", std::chrono::seconds(5), true};
  Gateway gw(std::make_shared<HttpChatBackend>(hc), cfg);
  EXPECT_EQ(gw.complete(request(RoleTag::System, "hi")).text(), "hello");
  EXPECT_EQ(hits.load(), 2);
  EXPECT_NE(seen_body.find("\"model\":\"test-model\""), std::string::npos);
}

TEST(HttpChatBackend, ClientErrorIsNotRetried) {
  std::atomic<int> hits{0};
  LocalServer server([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 400;
  });
  GatewayConfig cfg;
  cfg.backoff_base = std::chrono::milliseconds(1);
  Gateway gw(std::make_shared<HttpChatBackend>(HttpBackendConfig{server.url(), "m", "", std::chrono::seconds(5), true}),
             cfg);
  EXPECT_THROW(gw.complete(request(RoleTag::System, "hi")), ProtocolError);
  EXPECT_EQ(hits.load(), 1);
}

TEST(HttpChatBackend, WireFormat) {
  HttpChatBackend b(HttpBackendConfig{"http://localhost:9/v1", "m", "", std::chrono::seconds(1), true});
  ChatRequest r = request(RoleTag::Policy, "next?");
  r.system_prompt = "be brief";
  r.want_logprobs = true;
  r.beam_width = 4;
  const std::string body = b.build_body(r);
  EXPECT_NE(body.find("\"n\":4"), std::string::npos);
  EXPECT_NE(body.find("\"logprobs\":true"), std::string::npos);
  EXPECT_NE(body.find("\"role\":\"system\""), std::string::npos);

  const ChatResponse resp = HttpChatBackend::parse_body(kOkBody, true);
  EXPECT_DOUBLE_EQ(*resp.continuations[0].logprob, -0.75);
  EXPECT_THROW(HttpChatBackend::parse_body(R"({"choices": [{"message": {"content": "x"}}]})", true),
               UnsupportedCapability);
  EXPECT_THROW(HttpChatBackend::parse_body("not json", false), ProtocolError);
  EXPECT_THROW(HttpChatBackend::parse_body(R"({"choices": []})", false), ProtocolError);
}

}  // namespace
}  // namespace dialplan
