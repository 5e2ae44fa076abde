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

#include <cmath>

#include <gtest/gtest.h>

#include "dialplan/action_prior.hpp"
#include "dialplan/errors.hpp"

namespace dialplan {
namespace {

const TaskProfile& esconv() {
  static const TaskProfile p = builtin_profile(TaskId::ESConv);
  return p;
}

DialogueState esconv_state() {
  CaseInfo c;
  c.task = TaskId::ESConv;
  c.id = "e";
  c.background = "Struggling after a breakup";
  c.text_slots = {{"emotion_type", "sadness"}, {"problem_type", "breakup"}};
  DialogueState s = initial_state(c);
  s = append_turn(s, {Speaker::System, "How are you feeling?", 0});
  s = append_turn(s, {Speaker::User, "Terrible, honestly.", 1});
  s.emotions.labels = {"sad"};
  return s;
}

TEST(BuildPolicyPrompt, ListsOptionsAndDirective) {
  const PolicyPrompt p = build_policy_prompt(esconv_state(), esconv(), 4);
  const std::string text = p.text();
  EXPECT_NE(text.find("Choose the TOP 4 most suitable actions from the given options list. "
                      "Reply ONLY in the given format: 1,2,4,5"),
            std::string::npos);
  for (int i = 1; i <= 8; ++i) {
    const std::string opt = "(" + std::to_string(i) + ") " + esconv().catalog.at(i).name;
    EXPECT_NE(text.find(opt), std::string::npos) << opt;
  }
  EXPECT_EQ(text.find("(9)"), std::string::npos);
  EXPECT_NE(text.find("Emotion History: sad"), std::string::npos);
}

TEST(BuildPolicyPrompt, KIsSubstituted) {
  const std::string text = build_policy_prompt(esconv_state(), esconv(), 2).text();
  EXPECT_NE(text.find("Choose the TOP 2 most suitable actions"), std::string::npos);
  EXPECT_NE(text.find("Reply ONLY in the given format: 1,2,4,5"), std::string::npos);
}

TEST(BuildPolicyPrompt, BargainingInstruction) {
  CaseInfo c;
  c.task = TaskId::CB;
  c.id = "cb";
  c.background = "A bike";
  c.text_slots = {{"product", "bike"}};
  c.numeric_slots = {{kListedPrice, 150}, {kBuyerTargetPrice, 100}, {kSellerDesiredPrice, 140}};
  const PolicyPrompt p = build_policy_prompt(initial_state(c), builtin_profile(TaskId::CB), 4);
  EXPECT_NE(p.instruction.find("maximize the buyer's benefit"), std::string::npos);
}

TEST(BuildPolicyPrompt, EmotionAblationDropsTheHistoryLine) {
  const std::string text = build_policy_prompt(esconv_state(), esconv(), 4, {false}).text();
  EXPECT_EQ(text.find("Emotion History"), std::string::npos);
  EXPECT_EQ(text.find("sad"), std::string::npos);
}

TEST(ParseTopkList, PublishedExample) {
  const CandidateSet cs = parse_topk_list("6,8,3,1", esconv().catalog, 4);
  EXPECT_EQ(cs.indices, (std::vector<int>{6, 8, 3, 1}));
  EXPECT_EQ(cs.source, CandidateSource::ListMode);
  EXPECT_FALSE(cs.prior.has_value());
}

TEST(ParseTopkList, DedupAndOutOfRange) {
  EXPECT_EQ(parse_topk_list("6, 6, 8, 99, 3, 1", esconv().catalog, 4).indices,
            (std::vector<int>{6, 8, 3, 1}));
}

TEST(ParseTopkList, NoDigitsThrows) {
  EXPECT_THROW(parse_topk_list("no idea", esconv().catalog, 4), UnparseableOutput);
}

TEST(ParseTopkList, ShortReplyIsPadded) {
  EXPECT_EQ(parse_topk_list("Answer: 3", esconv().catalog, 4).indices,
            (std::vector<int>{3, 1, 2, 4}));
  // Only the first comma run counts.
  EXPECT_EQ(parse_topk_list("7,2 and then 5,6", esconv().catalog, 3).indices,
            (std::vector<int>{7, 2, 1}));
  EXPECT_EQ(parse_topk_list("0,99999999999999999999,4", esconv().catalog, 2).indices,
            (std::vector<int>{4, 1}));
}

TEST(ParseTopkList, RoundTripsRenderedLists) {
  const std::vector<std::vector<int>> lists = {{1, 2, 4, 5}, {8, 7, 6, 5}, {3, 1, 8, 2}};
  for (const auto& l : lists) {
    std::string s;
    for (std::size_t i = 0; i < l.size(); ++i) s += (i ? "," : "") + std::to_string(l[i]);
    EXPECT_EQ(parse_topk_list(s, esconv().catalog, 4).indices, l);
  }
}

TEST(FallbackCandidates, NoopFirst) {
  EXPECT_EQ(fallback_candidates(esconv().catalog, 5, 4).indices, (std::vector<int>{5, 1, 2, 3}));
}

TEST(Project, ActionNameMatches) {
  const ProjectionTable t = ProjectionTable::builtin(esconv());
  EXPECT_EQ(project("Reflection of feelings", t), 6);
  EXPECT_EQ(project("6: Reflection of feelings", t), 6);
  EXPECT_EQ(project("  REFLECTION   of\tfeelings ", t), 6);
}

TEST(Project, SynonymMatchesAgreeWithBruteForceScan) {
  ProjectionTable t(TaskId::ESConv, 5);
  t.add_keyword(1, "question");
  t.add_keyword(8, "restate");
  t.add_keyword(6, "feelings");
  const std::string text = "I would gently restate what they said";
  // Oracle: scan the matchers in order with a plain word search.
  int expected = t.noop_index();
  const std::string norm = normalize_text(text);
  for (const auto& m : t.matchers()) {
    const std::string padded = " " + norm + " ";
    if (padded.find(" " + m.pattern + " ") != std::string::npos) {
      expected = m.action_index;
      break;
    }
  }
  EXPECT_EQ(expected, 8);
  EXPECT_EQ(project(text, t), expected);
  EXPECT_EQ(project(text, ProjectionTable::builtin(esconv())), 8);
}

TEST(Project, UnknownTextFallsBackToNoop) {
  EXPECT_EQ(project("qzx", ProjectionTable::builtin(esconv())), 5);
}

TEST(Project, KeywordsRespectWordBoundaries) {
  ProjectionTable t(TaskId::ESConv, 5);
  t.add_keyword(1, "ask");
  EXPECT_EQ(project("a task list", t), 5);
  EXPECT_EQ(project("Ask them", t), 1);
}

TEST(ProjectionTable, ParsesFiles) {
  const std::string text =
      "# task, index, pattern\n"
      "ESConv, 1, question\nESConv, 2, self-disclosure\nESConv, 3, affirm\nESConv, 4, suggest\n"
      "ESConv, 5, others\nESConv, 6, re:reflect(ion|ing)?\nESConv, 7, information\n"
      "ESConv, 8, restate\nCB, 1, hello\n";
  const ProjectionTable t = ProjectionTable::parse(text, esconv());
  EXPECT_EQ(t.matchers().size(), 8u);
  EXPECT_EQ(project("Reflecting is best", t), 6);
  EXPECT_THROW(ProjectionTable::parse("ESConv, 1, question\n", esconv()), InvalidArgument);
  EXPECT_THROW(ProjectionTable::parse("ESConv 1 question\n", esconv()), InvalidArgument);
}

TEST(ProjectionTable, BuiltinCoversEveryTask) {
  for (TaskId task : all_tasks()) {
    const TaskProfile p = builtin_profile(task);
    const ProjectionTable t = ProjectionTable::builtin(p);
    EXPECT_NO_THROW(t.validate(p.catalog));
    for (const Action& a : p.catalog.actions()) EXPECT_EQ(project(a.name, t), a.index) << a.name;
  }
}

TEST(EstimatePriorBeam, HandComputedExample) {
  ProjectionTable t(TaskId::ESConv, 5);
  t.add_keyword(1, "alpha");
  t.add_keyword(2, "beta");
  const std::vector<Continuation> cs = {
      {"alpha one", std::log(0.5)}, {"alpha two", std::log(0.25)}, {"beta", std::log(0.25)}};
  const PriorDistribution p = estimate_prior_beam(cs, t);
  EXPECT_NEAR(p.weights.at(1), 0.75, 1e-12);
  EXPECT_NEAR(p.weights.at(2), 0.25, 1e-12);
  EXPECT_EQ(p.weights.size(), 2u);
}

TEST(EstimatePriorBeam, SingleAndNoopOnly) {
  ProjectionTable t(TaskId::ESConv, 5);
  t.add_keyword(1, "alpha");
  EXPECT_DOUBLE_EQ(estimate_prior_beam({{"alpha", -3.0}}, t).weights.at(1), 1.0);
  const PriorDistribution p = estimate_prior_beam({{"x", -1.0}, {"y", -2.0}}, t);
  EXPECT_EQ(p.weights.size(), 1u);
  EXPECT_DOUBLE_EQ(p.weights.at(5), 1.0);
}

TEST(EstimatePriorBeam, ExtremeLogprobsStayFinite) {
  ProjectionTable t(TaskId::ESConv, 5);
  t.add_keyword(1, "alpha");
  const PriorDistribution p = estimate_prior_beam({{"alpha", -1000.0}, {"beta", -1001.0}}, t);
  EXPECT_NEAR(p.total(), 1.0, 1e-12);
  EXPECT_NEAR(p.weights.at(1), 1.0 / (1.0 + std::exp(-1.0)), 1e-12);
}

TEST(TopK, Argmax) {
  PriorDistribution p;
  p.weights = {{1, 0.75}, {2, 0.25}};
  EXPECT_EQ(top_k(p, 1, esconv().catalog).indices, (std::vector<int>{1}));
}

TEST(TopK, TiesGoToTheLowerIndex) {
  PriorDistribution p;
  p.weights = {{2, 0.4}, {1, 0.4}, {3, 0.2}};
  EXPECT_EQ(top_k(p, 2, esconv().catalog).indices, (std::vector<int>{1, 2}));
}

TEST(TopK, PadsByEnumeration) {
  const ActionCatalog cat(TaskId::CIMA, {{1, "a", "p"}, {2, "b", "p"}, {3, "c", "p"},
                                         {4, "d", "p"}, {5, "e", "p"}});
  PriorDistribution p;
  p.weights = {{1, 1.0}};
  const CandidateSet cs = top_k(p, 3, cat);
  // Oracle: the massive action, then unused indices in ascending order.
  std::vector<int> expected = {1};
  for (int i = 1; i <= 5 && expected.size() < 3; ++i) {
    if (i != 1) expected.push_back(i);
  }
  EXPECT_EQ(cs.indices, expected);
  EXPECT_EQ(cs.source, CandidateSource::BeamMode);
  ASSERT_TRUE(cs.prior.has_value());
}

TEST(ActionPrior, ListModeUsesOneCallAndFallsBack) {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->set_default(single_response("I cannot say"));
  Gateway gw(backend);
  ActionPrior prior(esconv(), ProjectionTable::builtin(esconv()), PriorConfig{});
  const CandidateSet cs = prior.propose(esconv_state(), gw);
  EXPECT_EQ(cs.indices, (std::vector<int>{5, 1, 2, 3}));
  EXPECT_EQ(gw.calls(RoleTag::Policy), 1u);

  backend->add(RoleTag::Policy, "TOP 4", single_response("6,8,3,1"));
  EXPECT_EQ(prior.propose(esconv_state(), gw).indices, (std::vector<int>{6, 8, 3, 1}));
  const ChatRequest req = prior.list_request(esconv_state(), gw);
  EXPECT_EQ(req.max_tokens, kProposalMaxTokens);
  EXPECT_EQ(req.role_tag, RoleTag::Policy);
}

TEST(ActionPrior, BeamModeAndItsFallback) {
  auto backend = std::make_shared<ScriptedBackend>();
  ChatResponse beams;
  beams.continuations = {{"Reflection of feelings", -0.1}, {"restate it", -0.2},
                         {"qzx", -3.0}};
  backend->add(RoleTag::Policy, "Next action:", beams);
  backend->add(RoleTag::Policy, "TOP", single_response("2,3"));
  Gateway gw(backend);
  PriorConfig cfg;
  cfg.mode = PriorMode::BeamMode;
  cfg.beam_width = 3;
  cfg.k = 2;
  ActionPrior prior(esconv(), ProjectionTable::builtin(esconv()), cfg);
  const CandidateSet cs = prior.propose(esconv_state(), gw);
  EXPECT_EQ(cs.source, CandidateSource::BeamMode);
  EXPECT_EQ(cs.indices, (std::vector<int>{6, 8}));

  backend->set_supports_logprobs(false);
  const CandidateSet fallback = prior.propose(esconv_state(), gw);
  EXPECT_EQ(fallback.source, CandidateSource::ListMode);
  EXPECT_EQ(fallback.indices, (std::vector<int>{2, 3}));
}

TEST(ActionPrior, DisabledPriorUsesTheFullCatalog) {
  Gateway gw(std::make_shared<ScriptedBackend>());
  PriorConfig cfg;
  cfg.use_prior = false;
  ActionPrior prior(esconv(), ProjectionTable::builtin(esconv()), cfg);
  const CandidateSet cs = prior.propose(esconv_state(), gw);
  EXPECT_EQ(cs.indices, (std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(cs.source, CandidateSource::FullCatalog);
  EXPECT_EQ(gw.total_calls(), 0u);
}

}  // namespace
}  // namespace dialplan
