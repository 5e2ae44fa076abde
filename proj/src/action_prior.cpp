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

#include "dialplan/action_prior.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "dialplan/errors.hpp"

namespace dialplan {

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool keyword_fires(const std::string& text, const std::string& keyword) {
  if (keyword.empty()) return false;
  for (std::size_t pos = text.find(keyword); pos != std::string::npos;
       pos = text.find(keyword, pos + 1)) {
    const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]) || !is_word_char(keyword.front());
    const std::size_t end = pos + keyword.size();
    const bool right_ok =
        end == text.size() || !is_word_char(text[end]) || !is_word_char(keyword.back());
    if (left_ok && right_ok) return true;
  }
  return false;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

const std::vector<std::pair<int, std::vector<std::string>>>& synonyms(TaskId task) {
  static const std::vector<std::pair<int, std::vector<std::string>>> esconv = {
      {8, {"restate", "restatement", "paraphrase", "paraphrasing", "rephrase", "summarize"}},
      {6, {"reflect", "reflection", "reflecting", "mirror their feelings"}},
      {1, {"ask", "elaborate", "question", "probe"}},
      {2, {"self disclosure", "self-disclosure", "disclose", "my own experience", "share a similar"}},
      {3, {"affirm", "affirmation", "reassure", "reassurance", "encourage", "validate"}},
      {4, {"suggest", "suggestion", "suggestions", "advice", "advise", "recommend"}},
      {7, {"information", "inform", "facts", "factual", "resources"}},
      {5, {"others", "other", "chat", "small talk"}},
  };
  static const std::vector<std::pair<int, std::vector<std::string>>> cima = {
      {1, {"hint", "clue", "give knowledge", "tip"}},
      {3, {"correct the mistake", "correction", "fix", "misconception"}},
      {4, {"confirm", "confirmation", "well done", "that's right"}},
      {2, {"ask", "question", "check understanding"}},
      {5, {"others", "other", "chat"}},
  };
  static const std::vector<std::pair<int, std::vector<std::string>>> cb = {
      {6, {"vague price", "comparative", "lower than", "cheaper"}},
      {11, {"reject the price", "too expensive", "decline"}},
      {10, {"accept", "deal", "accept the price"}},
      {5, {"counteroffer", "counter offer", "new price"}},
      {4, {"offer", "initiate a price", "make an offer"}},
      {2, {"ask", "question", "inquiry"}},
      {3, {"information", "describe", "tell"}},
      {7, {"verify", "double check"}},
      {8, {"yes", "affirmative"}},
      {9, {"no", "negative"}},
      {1, {"hello", "hi", "greeting", "chat"}},
  };
  static const std::vector<std::pair<int, std::vector<std::string>>> p4g = {
      {2, {"amount", "$1", "$2", "small donation"}},
      {3, {"confirm", "ready to donate"}},
      {4, {"donate more", "a bit more"}},
      {1, {"propose donation", "ask for a donation", "suggest donating"}},
      {5, {"affirm", "rapport"}},
      {6, {"greet", "hello", "hi"}},
      {7, {"why hesitant", "hesitation", "rejection", "unwilling"}},
      {8, {"thank", "thanks", "gratitude"}},
      {9, {"logic", "logical", "reasoning", "rational"}},
      {10, {"emotional appeal", "emotion", "emotions", "sympathy"}},
      {11, {"credibility", "reputation", "trustworthy"}},
      {12, {"foot-in-the-door", "small commitment"}},
      {13, {"i also donated", "self modeling", "lead by example"}},
      {14, {"how donations are used", "donation info", "facts"}},
      {15, {"story", "anecdote"}},
      {16, {"source", "where they get information"}},
      {17, {"charitable giving", "task inquiry"}},
      {18, {"personal question", "values", "priorities"}},
      {19, {"general question", "neutral", "inquiry", "ask"}},
  };
  static const std::vector<std::pair<int, std::vector<std::string>>> extes = {
      {1, {"reflect", "reflective", "reflection", "restate", "paraphrase"}},
      {2, {"clarify", "clarifying", "ask"}},
      {3, {"validate", "validation"}},
      {4, {"empathy", "empathize", "empathetic"}},
      {5, {"affirm", "praise", "strengths"}},
      {6, {"hope", "optimism", "optimistic"}},
      {7, {"non-judgmental", "without judgment", "judgment"}},
      {8, {"suggest", "suggestion", "options", "advice"}},
      {9, {"plan together", "collaborate", "collaborative", "plan"}},
      {10, {"perspective", "point of view", "alternative view"}},
      {11, {"reframe", "reframing", "negative thoughts"}},
      {12, {"information", "inform", "facts"}},
      {13, {"normalize", "normal", "common"}},
      {14, {"self-care", "self care"}},
      {15, {"stress", "relax", "breathing"}},
      {16, {"others", "other", "chat"}},
  };
  switch (task) {
    case TaskId::ESConv: return esconv;
    case TaskId::CIMA: return cima;
    case TaskId::CB: return cb;
    case TaskId::P4G: return p4g;
    case TaskId::ExTES: return extes;
  }
  return esconv;
}

}  // namespace

// ---------------------------------------------------------------------------
// ProjectionTable

ProjectionTable::ProjectionTable(TaskId task, int noop_index)
    : task_(task), noop_index_(noop_index) {}

void ProjectionTable::add_keyword(int action_index, std::string keyword) {
  Matcher m;
  m.action_index = action_index;
  m.pattern = normalize_text(keyword);
  if (m.pattern.empty()) throw InvalidArgument("empty projection keyword");
  matchers_.push_back(std::move(m));
}

void ProjectionTable::add_regex(int action_index, std::string pattern) {
  Matcher m;
  m.action_index = action_index;
  m.is_regex = true;
  try {
    m.compiled = std::regex(pattern, std::regex::ECMAScript | std::regex::icase);
  } catch (const std::regex_error& e) {
    throw InvalidArgument("bad projection regex '" + pattern + "': " + e.what());
  }
  m.pattern = std::move(pattern);
  matchers_.push_back(std::move(m));
}

void ProjectionTable::validate(const ActionCatalog& catalog) const {
  if (!catalog.contains(noop_index_)) {
    throw InvalidArgument("projection fallback " + std::to_string(noop_index_) +
                          " is not a catalog action");
  }
  std::set<int> covered;
  for (const Matcher& m : matchers_) {
    if (!catalog.contains(m.action_index)) {
      throw InvalidArgument("projection matcher for unknown action " +
                            std::to_string(m.action_index));
    }
    covered.insert(m.action_index);
  }
  for (const Action& a : catalog.actions()) {
    if (!covered.count(a.index)) {
      throw InvalidArgument("action '" + a.name + "' has no projection matcher");
    }
  }
}

ProjectionTable ProjectionTable::builtin(const TaskProfile& profile) {
  ProjectionTable table(profile.task, profile.noop_index);
  std::vector<const Action*> by_length;
  for (const Action& a : profile.catalog.actions()) by_length.push_back(&a);
  std::stable_sort(by_length.begin(), by_length.end(), [](const Action* a, const Action* b) {
    return a->name.size() > b->name.size();
  });
  for (const Action* a : by_length) table.add_keyword(a->index, a->name);
  for (const Action& a : profile.catalog.actions()) {
    table.add_regex(a.index, "^\\(?" + std::to_string(a.index) + "\\)?(?:[:.)\\s-]|$)");
  }
  for (const auto& [index, words] : synonyms(profile.task)) {
    for (const std::string& w : words) table.add_keyword(index, w);
  }
  table.validate(profile.catalog);
  return table;
}

ProjectionTable ProjectionTable::parse(std::string_view text, const TaskProfile& profile) {
  ProjectionTable table(profile.task, profile.noop_index);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto c1 = t.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : t.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw InvalidArgument("projection table line " + std::to_string(lineno) +
                            ": expected 'task, action_index, pattern'");
    }
    const std::string task = trim(std::string_view(t).substr(0, c1));
    if (task_from_string(task) != profile.task) continue;
    int index = 0;
    try {
      index = std::stoi(trim(std::string_view(t).substr(c1 + 1, c2 - c1 - 1)));
    } catch (const std::exception&) {
      throw InvalidArgument("projection table line " + std::to_string(lineno) +
                            ": bad action index");
    }
    const std::string pattern = trim(std::string_view(t).substr(c2 + 1));
    if (pattern.rfind("re:", 0) == 0) {
      table.add_regex(index, pattern.substr(3));
    } else {
      table.add_keyword(index, pattern);
    }
  }
  table.validate(profile.catalog);
  return table;
}

ProjectionTable ProjectionTable::load(const std::string& path, const TaskProfile& profile) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open projection table " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), profile);
}

int project(std::string_view text, const ProjectionTable& table) {
  const std::string norm = normalize_text(text);
  for (const ProjectionTable::Matcher& m : table.matchers()) {
    const bool fires =
        m.is_regex ? std::regex_search(norm, m.compiled) : keyword_fires(norm, m.pattern);
    if (fires) return m.action_index;
  }
  return table.noop_index();
}

// ---------------------------------------------------------------------------
// Priors and candidate sets

double PriorDistribution::total() const {
  double s = 0.0;
  for (const auto& [a, w] : weights) s += w;
  return s;
}

std::string_view to_string(CandidateSource s) {
  switch (s) {
    case CandidateSource::ListMode: return "ListMode";
    case CandidateSource::BeamMode: return "BeamMode";
    case CandidateSource::FullCatalog: return "FullCatalog";
  }
  return "?";
}

std::string render_options(const ActionCatalog& catalog) {
  std::string out;
  for (const Action& a : catalog.actions()) {
    if (!out.empty()) out += '\n';
    out += "(" + std::to_string(a.index) + ") " + a.name;
  }
  return out;
}

PolicyPrompt build_policy_prompt(const DialogueState& state, const TaskProfile& profile, int k,
                                 PromptOptions options) {
  if (k < 1 || static_cast<std::size_t>(k) > profile.catalog.size()) {
    throw InvalidArgument("k must lie in 1..catalog size");
  }
  TemplateVars vars = case_vars(state, Speaker::User);
  vars["options"] = render_options(profile.catalog);
  vars["k"] = std::to_string(k);
  std::set<std::string> omit;
  if (!options.include_emotions) omit.insert("emotions");
  return {render_template(profile.prompts.policy_instruction, vars, omit),
          render_template(profile.prompts.policy_directive, vars, omit)};
}

namespace {

void pad_candidates(std::vector<int>& indices, const ActionCatalog& catalog, std::size_t k) {
  for (const Action& a : catalog.actions()) {
    if (indices.size() >= k) break;
    if (std::find(indices.begin(), indices.end(), a.index) == indices.end()) {
      indices.push_back(a.index);
    }
  }
}

std::size_t checked_k(int k, const ActionCatalog& catalog) {
  if (k < 1 || static_cast<std::size_t>(k) > catalog.size()) {
    throw InvalidArgument("k must lie in 1..catalog size");
  }
  return static_cast<std::size_t>(k);
}

}  // namespace

CandidateSet parse_topk_list(std::string_view raw, const ActionCatalog& catalog, int k) {
  const std::size_t want = checked_k(k, catalog);
  std::size_t pos = 0;
  while (pos < raw.size() && !std::isdigit(static_cast<unsigned char>(raw[pos]))) ++pos;
  if (pos == raw.size()) throw UnparseableOutput("no action numbers in policy reply");

  std::vector<int> indices;
  while (true) {
    // One integer; values too long to be an index are kept as out-of-range.
    long long value = 0;
    bool overflow = false;
    while (pos < raw.size() && std::isdigit(static_cast<unsigned char>(raw[pos]))) {
      if (value > 1'000'000) overflow = true;
      if (!overflow) value = value * 10 + (raw[pos] - '0');
      ++pos;
    }
    const int idx = overflow ? -1 : static_cast<int>(value);
    if (catalog.contains(idx) && std::find(indices.begin(), indices.end(), idx) == indices.end() &&
        indices.size() < want) {
      indices.push_back(idx);
    }
    std::size_t look = pos;
    while (look < raw.size() && (raw[look] == ' ' || raw[look] == '\t')) ++look;
    if (look >= raw.size() || raw[look] != ',') break;
    ++look;
    while (look < raw.size() && (raw[look] == ' ' || raw[look] == '\t')) ++look;
    if (look >= raw.size() || !std::isdigit(static_cast<unsigned char>(raw[look]))) break;
    pos = look;
  }
  pad_candidates(indices, catalog, want);
  return {std::move(indices), CandidateSource::ListMode, std::nullopt};
}

CandidateSet fallback_candidates(const ActionCatalog& catalog, int noop_index, int k) {
  const std::size_t want = checked_k(k, catalog);
  std::vector<int> indices{noop_index};
  pad_candidates(indices, catalog, want);
  return {std::move(indices), CandidateSource::ListMode, std::nullopt};
}

PriorDistribution estimate_prior_beam(const std::vector<Continuation>& continuations,
                                      const ProjectionTable& table) {
  if (continuations.empty()) throw InvalidArgument("beam prior needs continuations");
  double max_lp = -std::numeric_limits<double>::infinity();
  for (const Continuation& c : continuations) {
    if (!c.logprob || !std::isfinite(*c.logprob)) {
      throw InvalidArgument("beam continuation without a finite logprob");
    }
    max_lp = std::max(max_lp, *c.logprob);
  }
  PriorDistribution prior;
  double total = 0.0;
  for (const Continuation& c : continuations) {
    const double w = std::exp(*c.logprob - max_lp);
    prior.weights[project(c.text, table)] += w;
    total += w;
  }
  for (auto& [a, w] : prior.weights) w /= total;
  return prior;
}

CandidateSet top_k(const PriorDistribution& prior, int k, const ActionCatalog& catalog) {
  const std::size_t want = checked_k(k, catalog);
  std::vector<std::pair<int, double>> ranked;
  for (const auto& [a, w] : prior.weights) {
    if (w > 0.0 && catalog.contains(a)) ranked.emplace_back(a, w);
  }
  // std::map iterates by ascending index, so stability gives the tie rule.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  std::vector<int> indices;
  for (const auto& [a, w] : ranked) {
    if (indices.size() == want) break;
    indices.push_back(a);
  }
  pad_candidates(indices, catalog, want);
  return {std::move(indices), CandidateSource::BeamMode, prior};
}

CandidateSet full_catalog(const ActionCatalog& catalog) {
  CandidateSet set;
  set.source = CandidateSource::FullCatalog;
  for (const Action& a : catalog.actions()) set.indices.push_back(a.index);
  return set;
}

// ---------------------------------------------------------------------------
// ActionPrior

ActionPrior::ActionPrior(const TaskProfile& profile, ProjectionTable table, PriorConfig config)
    : profile_(profile), table_(std::move(table)), config_(config) {
  checked_k(config_.k, profile_.catalog);
  if (config_.beam_width < 1) throw InvalidArgument("beam width must be positive");
  table_.validate(profile_.catalog);
}

namespace {

DialogueState with_history(const DialogueState& state, std::vector<Utterance> history) {
  DialogueState s = state;
  s.history = std::move(history);
  return s;
}

}  // namespace

ChatRequest ActionPrior::list_request(const DialogueState& state, const Gateway& gateway) const {
  auto render = [&](const std::vector<Utterance>& h) {
    return build_policy_prompt(with_history(state, h), profile_, config_.k, config_.prompt).text();
  };
  const DialogueState fitted = with_history(state, gateway.fit_history(state.history, render));
  const PolicyPrompt prompt = build_policy_prompt(fitted, profile_, config_.k, config_.prompt);
  ChatRequest req;
  req.role_tag = RoleTag::Policy;
  req.system_prompt = prompt.instruction;
  req.messages.push_back({MessageRole::User, prompt.directive});
  req.temperature = config_.temperature;
  req.max_tokens = kProposalMaxTokens;
  return req;
}

ChatRequest ActionPrior::beam_request(const DialogueState& state, const Gateway& gateway) const {
  const SerializeOptions opts{config_.prompt.include_emotions};
  auto render = [&](const std::vector<Utterance>& h) {
    return serialize_state(with_history(state, h), profile_.catalog, opts);
  };
  const DialogueState fitted = with_history(state, gateway.fit_history(state.history, render));
  ChatRequest req;
  req.role_tag = RoleTag::Policy;
  req.system_prompt =
      render_template(profile_.prompts.policy_instruction, case_vars(fitted, Speaker::User));
  req.messages.push_back({MessageRole::User, serialize_state(fitted, profile_.catalog, opts)});
  req.temperature = config_.temperature;
  req.max_tokens = kProposalMaxTokens;
  req.want_logprobs = true;
  req.beam_width = config_.beam_width;
  return req;
}

CandidateSet ActionPrior::propose(const DialogueState& state, Gateway& gateway) const {
  if (!config_.use_prior) return full_catalog(profile_.catalog);
  if (config_.mode == PriorMode::BeamMode) {
    try {
      const ChatResponse resp = gateway.complete_beam(beam_request(state, gateway));
      return top_k(estimate_prior_beam(resp.continuations, table_), config_.k, profile_.catalog);
    } catch (const UnsupportedCapability&) {
      // Fall through to the list query.
    }
  }
  const ChatResponse resp = gateway.complete(list_request(state, gateway));
  try {
    return parse_topk_list(resp.text(), profile_.catalog, config_.k);
  } catch (const UnparseableOutput&) {
    return fallback_candidates(profile_.catalog, table_.noop_index(), config_.k);
  }
}

}  // namespace dialplan
