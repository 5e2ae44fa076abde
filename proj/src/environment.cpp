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

#include "dialplan/environment.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "dialplan/errors.hpp"
#include "dialplan/log.hpp"

namespace dialplan {
namespace {

// Lowercase, whitespace collapsed, typographic apostrophes folded to '.
std::string fold(std::string_view s) {
  std::string ascii;
  ascii.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    // U+2019 RIGHT SINGLE QUOTATION MARK is E2 80 99.
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
        static_cast<unsigned char>(s[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(s[i + 2]) == 0x99 ||
         static_cast<unsigned char>(s[i + 2]) == 0x98)) {
      ascii += '\'';
      i += 2;
      continue;
    }
    ascii += s[i];
  }
  return normalize_text(ascii);
}

std::string option_stem(std::string_view option) {
  const auto cut = option.find_first_of("{[");
  std::string stem = fold(option.substr(0, cut));
  while (!stem.empty() && (stem.back() == '.' || stem.back() == ' ')) stem.pop_back();
  return stem;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\"");
  return std::string(s.substr(b, e - b + 1));
}

DialogueState with_history(const DialogueState& state, std::vector<Utterance> history) {
  DialogueState s = state;
  s.history = std::move(history);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Critic verdicts and rewards

std::optional<double> extract_deal_price(std::string_view raw) {
  const std::string text = fold(raw);
  constexpr std::string_view kPhrase = "reached a deal at";
  const auto at = text.find(kPhrase);
  if (at == std::string::npos) return std::nullopt;
  std::size_t pos = at + kPhrase.size();
  while (pos < text.size() && !std::isdigit(static_cast<unsigned char>(text[pos]))) {
    const char c = text[pos];
    const bool skippable = c == ' ' || c == '$' || c == '[' || c == ':' ||
                           (static_cast<unsigned char>(c) & 0x80) != 0;  // €, £ ...
    if (!skippable) break;
    ++pos;
  }
  std::string digits;
  bool seen_dot = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
    } else if (c == ',' && !seen_dot && pos + 1 < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[pos + 1]))) {
      continue;
    } else if (c == '.' && !seen_dot && pos + 1 < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[pos + 1]))) {
      seen_dot = true;
      digits += c;
    } else {
      break;
    }
  }
  if (digits.empty()) throw MalformedPrice("deal phrase without a price: " + std::string(raw));
  return std::strtod(digits.c_str(), nullptr);
}

double cb_reward(std::optional<double> deal_price, const CaseInfo& case_info) {
  const double listed = case_info.slot(kListedPrice);
  const double target = case_info.slot(kBuyerTargetPrice);
  if (!(listed > target)) throw InvalidCase("listed_price must exceed buyer_target_price");
  if (!deal_price) return 0.0;
  const double sl = (listed - *deal_price) / (listed - target);
  return std::clamp(sl, 0.0, 1.0);
}

Verdict map_critic_verdict(std::string_view raw, const TaskProfile& profile,
                           const CaseInfo* case_info) {
  const std::string text = fold(raw);
  for (const VerdictOption& opt : profile.verdict_map) {
    const std::string stem = option_stem(opt.text);
    if (stem.empty() || text.find(stem) == std::string::npos) continue;
    Verdict v;
    v.matched = true;
    v.reward = opt.reward;
    v.terminal = opt.terminal;
    if (opt.reward_from_deal) {
      if (case_info == nullptr) throw InvalidArgument("deal verdicts need the case");
      try {
        v.deal_price = extract_deal_price(raw);
      } catch (const MalformedPrice& e) {
        log_warning(std::string("MalformedPrice: ") + e.what());
      }
      if (!v.deal_price) return Verdict{0.0, Terminal::Ongoing, std::nullopt, false};
      v.reward = cb_reward(v.deal_price, *case_info);
    }
    return v;
  }
  log_warning("CriticUnparseable: " + std::string(raw));
  return Verdict{};
}

std::string parse_system_reply(std::string_view raw) {
  const std::string lower = [&] {
    std::string s(raw);
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }();
  const auto at = lower.find("response:");
  if (at != std::string::npos) {
    std::string out = trim(raw.substr(at + 9));
    if (!out.empty()) return out;
  }
  // Drop a leading "Emotion: ..." line if present.
  std::string_view rest = raw;
  const auto first = lower.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && lower.compare(first, 8, "emotion:") == 0) {
    const auto nl = raw.find('\n', first);
    rest = nl == std::string_view::npos ? std::string_view() : raw.substr(nl + 1);
  }
  std::string out = trim(rest);
  return out.empty() ? trim(raw) : out;
}

// ---------------------------------------------------------------------------
// Users

ChatRequest build_user_request(const TaskProfile& profile, const DialogueState& state,
                               const Gateway& gateway) {
  auto render = [&](const std::vector<Utterance>& h) {
    return render_template(profile.prompts.user_directive,
                           case_vars(with_history(state, h), Speaker::System));
  };
  const TemplateVars vars =
      case_vars(with_history(state, gateway.fit_history(state.history, render)), Speaker::System);
  ChatRequest req;
  req.role_tag = RoleTag::User;
  req.system_prompt = render_template(profile.prompts.user_instruction, vars);
  req.messages.push_back({MessageRole::User, render_template(profile.prompts.user_directive, vars)});
  req.max_tokens = kTurnMaxTokens;
  return req;
}

std::optional<std::string> SimulatedUser::reply(const DialogueState& state, Gateway& gateway) {
  return trim(gateway.complete(build_user_request(*profile_, state, gateway)).text());
}

// ---------------------------------------------------------------------------
// DialogueEnvironment

DialogueEnvironment::DialogueEnvironment(const TaskProfile& profile, const ActionPrior& prior,
                                         const QHeadParams& params, Encoder& encoder,
                                         Gateway& gateway, EnvironmentOptions options)
    : profile_(profile),
      prior_(prior),
      params_(params),
      encoder_(encoder),
      gateway_(gateway),
      options_(options),
      tracker_(options.include_emotions) {}

std::string DialogueEnvironment::serialize(const DialogueState& state) const {
  return serialize_state(state, profile_.catalog, SerializeOptions{options_.include_emotions});
}

ChatRequest DialogueEnvironment::system_request(const DialogueState& state,
                                                const Action& action) const {
  std::set<std::string> omit;
  if (!options_.include_emotions) omit.insert("emotions");
  auto vars_for = [&](const DialogueState& s) {
    TemplateVars v = case_vars(s, Speaker::User);
    v["action"] = action.strategy_prompt;
    return v;
  };
  auto render = [&](const std::vector<Utterance>& h) {
    return render_template(profile_.prompts.system_directive, vars_for(with_history(state, h)),
                           omit);
  };
  const TemplateVars vars = vars_for(with_history(state, gateway_.fit_history(state.history, render)));
  ChatRequest req;
  req.role_tag = RoleTag::System;
  req.system_prompt = render_template(profile_.prompts.system_instruction, vars, omit);
  req.messages.push_back(
      {MessageRole::User, render_template(profile_.prompts.system_directive, vars, omit)});
  req.max_tokens = kTurnMaxTokens;
  return req;
}

ChatRequest DialogueEnvironment::user_request(const DialogueState& state) const {
  return build_user_request(profile_, state, gateway_);
}

ChatRequest DialogueEnvironment::critic_request(const DialogueState& state) const {
  std::set<std::string> omit;
  if (!options_.include_emotions) omit.insert("emotions");
  auto render = [&](const std::vector<Utterance>& h) {
    return render_template(profile_.prompts.critic_directive,
                           case_vars(with_history(state, h), Speaker::User), omit);
  };
  const TemplateVars vars =
      case_vars(with_history(state, gateway_.fit_history(state.history, render)), Speaker::User);
  ChatRequest req;
  req.role_tag = RoleTag::Critic;
  req.system_prompt = render_template(profile_.prompts.critic_instruction, vars, omit);
  req.messages.push_back(
      {MessageRole::User, render_template(profile_.prompts.critic_directive, vars, omit)});
  req.max_tokens = kTurnMaxTokens;
  return req;
}

DialogueEnvironment::TurnOutcome DialogueEnvironment::run_turn(const DialogueState& state,
                                                               const CandidateSet& candidates,
                                                               double epsilon, Rng& rng,
                                                               EncodingCache& cache,
                                                               UserSource& user) {
  if (state.turn >= profile_.max_turns) {
    throw TurnLimitReached("turn cap of " + std::to_string(profile_.max_turns) + " reached");
  }
  TurnOutcome out;
  const std::string state_text = serialize(state);
  const ScoredCandidates scored =
      score_candidates(params_, state_text, candidates, profile_.catalog, cache);
  const int action_index = select_action(scored, epsilon, rng);
  const Action& action = profile_.catalog.at(action_index);

  const std::string system_text =
      parse_system_reply(gateway_.complete(system_request(state, action)).text());
  if (on_system) on_system(action, system_text);
  DialogueState next =
      append_turn(state, {Speaker::System, system_text, state.history.size()});

  TurnRecord& rec = out.record;
  rec.case_id = state.case_info.id;
  rec.turn = next.turn;
  rec.candidates = candidates.indices;
  rec.action_index = action_index;
  rec.action_name = action.name;
  rec.system_text = system_text;

  const std::optional<std::string> user_text = user.reply(next, gateway_);
  Verdict verdict;
  Terminal status = Terminal::Ongoing;
  if (!user_text) {
    status = Terminal::Failed;
  } else {
    next = append_turn(next, {Speaker::User, *user_text, next.history.size()});
    next.emotions = tracker_.observe(next.emotions, *user_text, gateway_);
    rec.user_text = *user_text;
    if (options_.include_emotions && !next.emotions.labels.empty()) {
      rec.emotion = next.emotions.labels.back();
    }
    rec.verdict = trim(gateway_.complete(critic_request(next)).text());
    verdict = map_critic_verdict(rec.verdict, profile_, &state.case_info);
    if (verdict.terminal != Terminal::Ongoing) {
      status = verdict.terminal;
    } else if (next.turn >= profile_.max_turns) {
      status = Terminal::Failed;
    }
  }

  rec.reward = verdict.reward;
  rec.status = status;
  rec.terminal = status != Terminal::Ongoing;
  rec.deal_price = verdict.deal_price;

  out.transition.state_text = state_text;
  out.transition.action_index = action_index;
  out.transition.reward = verdict.reward;
  out.transition.next_state_text = serialize(next);
  out.transition.terminal = rec.terminal;
  if (status == Terminal::Ongoing) {
    out.next_candidates = prior_.propose(next, gateway_);
    out.transition.candidate_indices_next = out.next_candidates->indices;
  }
  out.status = status;
  out.next_state = std::move(next);
  return out;
}

EpisodeResult DialogueEnvironment::run_episode(const CaseInfo& case_info, double epsilon,
                                               Rng& rng, std::size_t episode_id,
                                               ReplayBuffer* buffer, UserSource* user) {
  if (case_info.task != profile_.task) throw InvalidCase("case task does not match profile");
  case_info.validate();
  SimulatedUser simulated(profile_);
  UserSource& source = user != nullptr ? *user : simulated;

  EncodingCache cache(encoder_);
  EpisodeResult result;
  result.episode = episode_id;
  result.case_id = case_info.id;
  DialogueState state = initial_state(case_info);
  CandidateSet candidates = prior_.propose(state, gateway_);
  while (true) {
    TurnOutcome turn = run_turn(state, candidates, epsilon, rng, cache, source);
    turn.record.episode = episode_id;
    if (on_turn) on_turn(turn.record);
    result.records.push_back(turn.record);
    result.transitions.push_back(turn.transition);
    if (buffer != nullptr) buffer->push(turn.transition);
    state = std::move(turn.next_state);
    if (turn.status != Terminal::Ongoing) {
      result.outcome = turn.status;
      result.deal_price = turn.record.deal_price;
      break;
    }
    candidates = std::move(*turn.next_candidates);
  }
  result.turns = state.turn;
  result.transcript = state.history;
  if (profile_.task == TaskId::CB) {
    result.sl = result.outcome == Terminal::Completed ? cb_reward(result.deal_price, case_info)
                                                      : 0.0;
  }
  return result;
}

}  // namespace dialplan
