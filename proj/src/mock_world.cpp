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

#include "dialplan/mock_world.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <numeric>
#include <string>

#include "dialplan/random.hpp"

namespace dialplan {
namespace {

constexpr std::string_view kPlanMarker = "Following the plan of ";

std::string request_text(const ChatRequest& req) {
  std::string s = req.system_prompt;
  for (const ChatMessage& m : req.messages) {
    s += '\n';
    s += m.text;
  }
  return s;
}

// Only what the agent can see, so two cases that read the same behave the
// same.
std::uint64_t case_hash(const CaseInfo& c) {
  std::string visible = c.background;
  for (const auto& [k, v] : c.text_slots) visible += "\n" + k + "=" + v;
  for (const auto& [k, v] : c.numeric_slots) visible += "\n" + k + "=" + format_number(v);
  return fnv1a64(visible);
}

int requested_k(const std::string& text, int fallback) {
  const auto at = text.find("TOP ");
  if (at == std::string::npos) return fallback;
  int k = 0;
  for (std::size_t i = at + 4; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    k = k * 10 + (text[i] - '0');
    if (k > 1000) break;
  }
  return k > 0 ? k : fallback;
}

std::vector<int> permutation(std::size_t n, std::uint64_t seed) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 1);
  std::uint64_t state = seed;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = splitmix64(state) % i;
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (auto at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size())) {
    s.replace(at, from.size(), to);
  }
  return s;
}

}  // namespace

int preferred_action(const CaseInfo& c, const ActionCatalog& catalog) {
  return 1 + static_cast<int>(case_hash(c) % catalog.size());
}

double mock_deal_price(const CaseInfo& c) {
  const double listed = c.slot(kListedPrice);
  const double target = c.slot(kBuyerTargetPrice);
  const double frac = static_cast<double>((case_hash(c) >> 8) % 5) / 4.0;
  return target + (listed - target) * frac;
}

std::vector<CaseInfo> mock_cases(TaskId task, std::size_t n, std::uint64_t seed) {
  using Words = std::array<const char*, 6>;
  static const Words kTopics = {"a recent job loss", "an argument with a close friend",
                                "exam pressure", "moving to a new city", "a breakup",
                                "trouble sleeping"};
  static const Words kSince = {"for a few days", "since last month", "since the holidays",
                               "for almost a year", "since a family visit", "this week"};
  static const Words kMood = {"and feels alone", "and cannot focus", "and keeps worrying",
                              "and feels exhausted", "and is easily irritated",
                              "and avoids people"};
  static const Words kProducts = {"bike", "desk lamp", "sofa", "camera", "bookshelf", "guitar"};
  static const Words kCondition = {"in good condition", "with minor scratches", "barely used",
                                   "recently serviced", "with its original box",
                                   "with a small dent"};
  static const Words kAge = {"one year old", "two years old", "three years old",
                             "bought last spring", "five years old", "nearly new"};
  static const Words kSubjects = {"The cat", "My brother", "The teacher", "Our neighbour",
                                  "The small dog", "My grandmother"};
  static const Words kVerbs = {"is sleeping", "is reading", "is waiting", "is eating",
                               "is singing", "is hiding"};
  static const Words kPlaces = {"on the table", "in the garden", "at the station",
                                "under the bridge", "near the window", "in the kitchen"};
  static const Words kStance = {"has not heard of the charity before",
                                "already gives to a local food bank",
                                "doubts that donations reach children",
                                "volunteered at a school last year",
                                "is saving money for a trip", "asks a lot of questions"};
  static const Words kJob = {"a nurse", "a student", "a retired engineer", "a bus driver",
                             "a shop owner", "a software tester"};
  static const Words kTime = {"on a busy afternoon", "late in the evening", "during lunch",
                              "on a quiet weekend", "after work", "early in the morning"};

  constexpr std::size_t kCombos = 6 * 6 * 6;
  std::vector<CaseInfo> out;
  std::uint64_t state = seed ^ (static_cast<std::uint64_t>(task) << 32);
  const std::size_t offset = splitmix64(state) % kCombos;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t h = splitmix64(state);
    // 37 is coprime with 216, so the first 216 cases read differently.
    const std::size_t combo = (offset + i * 37) % kCombos;
    const std::size_t a = combo % 6, b = (combo / 6) % 6, d = combo / 36;
    std::string variant;
    if (i >= kCombos) variant = " (variant " + std::to_string(i / kCombos) + ")";
    CaseInfo c;
    c.task = task;
    c.id = std::string(to_string(task)) + "-mock-" + std::to_string(i);
    switch (task) {
      case TaskId::ESConv:
      case TaskId::ExTES:
        c.background = std::string("The seeker is struggling with ") + kTopics[a] + " " +
                       kSince[b] + " " + kMood[d] + variant + ".";
        c.text_slots = {{"emotion_type", d % 2 ? "anxiety" : "sadness"},
                        {"problem_type", kTopics[a]}};
        break;
      case TaskId::CIMA:
        c.background = std::string(kSubjects[a]) + " " + kVerbs[b] + " " + kPlaces[d] + variant;
        break;
      case TaskId::CB: {
        const double listed = 100.0 + static_cast<double>((h >> 16) % 40) * 10.0;
        const double target = listed * 0.7;
        c.background = std::string("A used ") + kProducts[a] + " " + kCondition[b] + ", " +
                       kAge[d] + variant + ".";
        c.text_slots = {{"product", kProducts[a]}};
        c.numeric_slots = {{kListedPrice, listed},
                           {kBuyerTargetPrice, target},
                           {kSellerDesiredPrice, listed * 0.95}};
        break;
      }
      case TaskId::P4G:
        c.background = std::string("The persuadee is ") + kJob[a] + " who " + kStance[b] +
                       ", met " + kTime[d] + variant + ".";
        break;
    }
    out.push_back(std::move(c));
  }
  return out;
}

ScriptedBackend::Responder mock_responder(const TaskProfile& profile, const CaseInfo& case_info,
                                          MockWorldOptions options) {
  return [profile, case_info, options](const ChatRequest& req) -> std::optional<ChatResponse> {
    const std::string text = request_text(req);
    const std::uint64_t ch = case_hash(case_info);
    const std::uint64_t h = fnv1a64(text, ch);
    const ActionCatalog& catalog = profile.catalog;
    const int preferred = preferred_action(case_info, catalog);

    switch (req.role_tag) {
      case RoleTag::Policy: {
        std::vector<int> perm = permutation(catalog.size(), h);
        if (req.want_logprobs && req.beam_width) {
          ChatResponse r;
          for (int i = 0; i < *req.beam_width; ++i) {
            const Action& a = catalog.at(perm[static_cast<std::size_t>(i) % perm.size()]);
            const double lp = -0.35 * (i + 1) - static_cast<double>((h >> (i % 48)) & 0xF) / 64.0;
            r.continuations.push_back({a.name, lp});
          }
          return r;
        }
        const int k = std::min<int>(requested_k(text, 4), static_cast<int>(catalog.size()));
        if (static_cast<int>((h >> 20) % 10) < options.prior_hits_per_10) {
          const auto pos = std::find(perm.begin(), perm.end(), preferred) - perm.begin();
          if (pos >= k) std::swap(perm[static_cast<std::size_t>(pos)], perm[(h >> 24) % k]);
        }
        std::string out;
        for (int i = 0; i < k; ++i) {
          if (i) out += ',';
          out += std::to_string(perm[static_cast<std::size_t>(i)]);
        }
        return single_response(out);
      }
      case RoleTag::System: {
        // The longest strategy prompt present names the requested action.
        const Action* chosen = &catalog.at(profile.noop_index);
        std::size_t best = 0;
        for (const Action& a : catalog.actions()) {
          if (a.strategy_prompt.size() > best && text.find(a.strategy_prompt) != std::string::npos) {
            chosen = &a;
            best = a.strategy_prompt.size();
          }
        }
        return single_response("Emotion: calm\nResponse: " + std::string(kPlanMarker) +
                               chosen->name + ", reply " + std::to_string(h % 1000) + ".");
      }
      case RoleTag::User: {
        static const std::array<const char*, 4> kReplies = {
            "I am not sure about that.", "Okay, tell me more.", "That is a fair point.",
            "Hmm, I see what you mean."};
        return single_response(std::string(kReplies[h % kReplies.size()]) + " (" +
                               std::to_string((h >> 8) % 100) + ")");
      }
      case RoleTag::Emotion: {
        static const std::array<const char*, 6> kLabels = {"anxious", "hopeful", "sad",
                                                           "calm", "frustrated", "relieved"};
        return single_response(kLabels[h % kLabels.size()]);
      }
      case RoleTag::Critic: {
        std::vector<const VerdictOption*> ongoing;
        const VerdictOption* done = nullptr;
        for (const VerdictOption& v : profile.verdict_map) {
          if (v.terminal == Terminal::Completed) done = &v;
          else ongoing.push_back(&v);
        }
        std::string used;
        const auto at = text.rfind(kPlanMarker);
        if (at != std::string::npos) {
          const auto start = at + kPlanMarker.size();
          used = text.substr(start, text.find(',', start) - start);
        }
        std::string verdict;
        if (options.allow_completion && done != nullptr && used == catalog.at(preferred).name) {
          verdict = done->text;
          if (done->reward_from_deal) {
            verdict = replace_all(verdict, "[price]", format_number(mock_deal_price(case_info)));
          }
        } else {
          verdict = ongoing[fnv1a64(used, ch) % ongoing.size()]->text;
        }
        return single_response(replace_all(verdict, "{english_sentence}", case_info.background));
      }
    }
    return std::nullopt;
  };
}

std::shared_ptr<ScriptedBackend> make_mock_backend(const TaskProfile& profile,
                                                   const CaseInfo& case_info,
                                                   MockWorldOptions options) {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->set_responder(mock_responder(profile, case_info, options));
  return backend;
}

}  // namespace dialplan
