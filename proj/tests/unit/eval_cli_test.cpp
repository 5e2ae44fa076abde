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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dialplan/chat.hpp"
#include "dialplan/checkpoint.hpp"
#include "dialplan/config.hpp"
#include "dialplan/errors.hpp"
#include "dialplan/metrics.hpp"
#include "dialplan/mock_world.hpp"
#include "dialplan/runner.hpp"
#include "dialplan/transcript.hpp"

namespace dialplan {
namespace fs = std::filesystem;
namespace {

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dialplan_eval_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

EpisodeSummary ep(Terminal outcome, std::size_t turns, std::optional<double> sl = std::nullopt) {
  EpisodeSummary s;
  s.outcome = outcome;
  s.turns = turns;
  s.sl = sl;
  return s;
}

TEST(Metrics, AverageTurns) {
  using T = Terminal;
  EXPECT_DOUBLE_EQ(compute_at({ep(T::Completed, 2), ep(T::Completed, 3), ep(T::Completed, 4)}), 3.0);
  EXPECT_DOUBLE_EQ(compute_at({ep(T::Failed, 8), ep(T::Failed, 8)}), 8.0);
  EXPECT_DOUBLE_EQ(compute_at({ep(T::Completed, 1)}), 1.0);
  // A user quit after 3 turns still counts at the cap.
  EXPECT_DOUBLE_EQ(compute_at({ep(T::Failed, 3), ep(T::Completed, 2)}), 5.0);
  EXPECT_DOUBLE_EQ(compute_at({ep(T::Failed, 8), ep(T::Completed, 2)}, {false, 8}), 2.0);
  EXPECT_DOUBLE_EQ(compute_at({ep(T::Failed, 8)}, {false, 8}), 8.0);
  EXPECT_THROW(compute_at({}), EmptyInput);
}

TEST(Metrics, SuccessRate) {
  using T = Terminal;
  EXPECT_DOUBLE_EQ(
      compute_sr({ep(T::Completed, 1), ep(T::Failed, 8), ep(T::Completed, 2), ep(T::Failed, 8)}),
      0.5);
  EXPECT_DOUBLE_EQ(compute_sr({ep(T::Completed, 1)}), 1.0);
  EXPECT_DOUBLE_EQ(compute_sr({ep(T::Failed, 8)}), 0.0);
  EXPECT_THROW(compute_sr({}), EmptyInput);
}

TEST(Metrics, SaleToList) {
  using T = Terminal;
  const std::vector<EpisodeSummary> mix = {ep(T::Completed, 2, 0.6), ep(T::Failed, 8, 0.0),
                                           ep(T::Completed, 1, 1.0)};
  EXPECT_NEAR(compute_sl(mix, TaskId::CB), (0.6 + 0.0 + 1.0) / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(compute_sl({ep(T::Failed, 8, 0.0), ep(T::Failed, 8)}, TaskId::CB), 0.0);
  EXPECT_DOUBLE_EQ(compute_sl({ep(T::Completed, 1, 1.0)}, TaskId::CB), 1.0);
  EXPECT_THROW(compute_sl(mix, TaskId::P4G), WrongTask);
}

TEST(Metrics, ReportJsonRoundTrip) {
  using T = Terminal;
  const MetricsReport r = make_report({ep(T::Completed, 2, 0.6), ep(T::Failed, 8, 0.0)}, TaskId::CB);
  EXPECT_DOUBLE_EQ(r.at, 5.0);
  EXPECT_DOUBLE_EQ(r.sr, 0.5);
  ASSERT_TRUE(r.sl_avg.has_value());
  EXPECT_EQ(report_from_json(to_json(r, TaskId::CB)), r);
  const MetricsReport es = make_report({ep(T::Completed, 2)}, TaskId::ESConv);
  EXPECT_FALSE(es.sl_avg.has_value());
  EXPECT_EQ(report_from_json(to_json(es, TaskId::ESConv)), es);
  EXPECT_NE(render_table(r, TaskId::CB).find("SL"), std::string::npos);
}

TurnRecord record(std::size_t episode, std::size_t turn, Terminal status, double reward,
                  std::optional<double> deal = std::nullopt) {
  TurnRecord r;
  r.episode = episode;
  r.case_id = "c" + std::to_string(episode);
  r.turn = turn;
  r.candidates = {1, 2, 3, 4};
  r.action_index = 2;
  r.action_name = "inquire";
  r.system_text = "How old is it?\nA \"quote\" and a tab\t.";
  r.user_text = "Two years.";
  r.emotion = "calm";
  r.verdict = "They have not reached a deal.";
  r.reward = reward;
  r.status = status;
  r.terminal = status != Terminal::Ongoing;
  r.deal_price = deal;
  return r;
}

TEST(Transcript, JsonLineRoundTrip) {
  const TurnRecord a = record(3, 2, Terminal::Completed, 0.1 + 0.2, 133.33333333333334);
  EXPECT_EQ(parse_json_line(to_json_line(a)), a);
  const TurnRecord b = record(0, 1, Terminal::Ongoing, -0.5);
  EXPECT_EQ(to_json_line(b).find('\n'), std::string::npos);
  EXPECT_EQ(parse_json_line(to_json_line(b)), b);
  EXPECT_THROW(parse_json_line("{not json"), InvalidArgument);
  EXPECT_THROW(parse_json_line("{}"), InvalidArgument);
}

TEST(Transcript, FileRoundTrip) {
  const std::vector<TurnRecord> recs = {record(0, 1, Terminal::Ongoing, 0.0),
                                        record(0, 2, Terminal::Completed, 0.6, 120.0),
                                        record(1, 1, Terminal::Failed, 0.0)};
  const std::string path = temp_path("t.jsonl").string();
  save_transcript(path, recs);
  EXPECT_EQ(load_transcript(path), recs);
  std::stringstream ss("\n" + to_json_line(recs[0]) + "\n\n");
  EXPECT_EQ(read_transcript(ss).size(), 1u);
  EXPECT_THROW(load_transcript(temp_path("missing.jsonl").string()), IoError);
}

TEST(Metrics, SummariesFromRecords) {
  const std::vector<TurnRecord> recs = {record(5, 1, Terminal::Ongoing, 0.0),
                                        record(5, 2, Terminal::Completed, 0.6, 120.0),
                                        record(2, 1, Terminal::Ongoing, 0.0),
                                        record(2, 2, Terminal::Failed, 0.0)};
  const auto s = summarize_records(recs, TaskId::CB);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].episode, 5u);
  EXPECT_EQ(s[0].outcome, Terminal::Completed);
  EXPECT_EQ(s[0].turns, 2u);
  EXPECT_EQ(*s[0].sl, 0.6);
  EXPECT_EQ(*s[0].deal_price, 120.0);
  EXPECT_EQ(s[1].outcome, Terminal::Failed);
  EXPECT_EQ(*s[1].sl, 0.0);
}

QHeadParams random_params(std::uint64_t seed) {
  Rng rng(seed);
  QHeadParams p = QHeadParams::init(6, 5, 4, rng);
  p.target = MlpHead::glorot(6, 5, 4, rng);
  p.online.layers[1].bias(2) = -0.125;
  p.step = 123456789012ULL;
  return p;
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const QHeadParams p = random_params(1);
  const std::string path = temp_path("ck.bin").string();
  save_checkpoint(p, path);
  const QHeadParams q = load_checkpoint(path);
  EXPECT_EQ(q, p);
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd x(6);
    for (Eigen::Index j = 0; j < 6; ++j) x(j) = 2.0 * uniform01(rng) - 1.0;
    EXPECT_EQ(q.online.forward(x), p.online.forward(x));
    EXPECT_EQ(q.target.forward(x), p.target.forward(x));
  }
  // Header plus two heads of doubles.
  const std::size_t params = p.online.parameter_count() * 2;
  EXPECT_EQ(fs::file_size(path), 4 + 4 + 8 + 4 + 3 * 8 + params * 8);
}

TEST(Checkpoint, DamagedFiles) {
  const std::string path = temp_path("ck2.bin").string();
  save_checkpoint(random_params(3), path);
  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto write = [&](const std::string& b) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << b;
  };
  write(bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(load_checkpoint(path), IoError);
  write(bytes.substr(0, 10));
  EXPECT_THROW(load_checkpoint(path), Error);
  write("XXXX" + bytes.substr(4));
  EXPECT_THROW(load_checkpoint(path), FormatVersionMismatch);
  std::string v2 = bytes;
  v2[4] = 2;
  write(v2);
  EXPECT_THROW(load_checkpoint(path), FormatVersionMismatch);
  write(bytes + "x");
  EXPECT_THROW(load_checkpoint(path), IoError);
  EXPECT_THROW(load_checkpoint(temp_path("nope.bin").string()), IoError);
}

TEST(Config, DefaultsAndParsing) {
  const RunConfig d;
  EXPECT_EQ(d.k, 4);
  EXPECT_EQ(d.epsilon_eval, 0.5);
  EXPECT_EQ(d.max_turns, 8u);
  const RunConfig c = parse_run_config(R"({
    "task": "CB", "mode": "train", "k": 3, "seed": 11, "backend": "mock",
    "train": {"episodes": 50, "learning_rate": 0.001, "optimizer": "adam"},
    "gateway": {"max_retries": 4, "backoff_ms": 10},
    "encoder": {"dim": 32},
    "roles": {"Critic": {"endpoint": "http://localhost:9/v1", "model": "judge"}}
  })");
  EXPECT_EQ(c.task, TaskId::CB);
  EXPECT_EQ(c.mode, RunMode::Train);
  EXPECT_EQ(c.k, 3);
  EXPECT_EQ(c.train.episodes, 50);
  EXPECT_EQ(c.train.optimizer, OptimizerKind::Adam);
  EXPECT_EQ(c.gateway.max_retries, 4);
  EXPECT_EQ(c.gateway.backoff_base.count(), 10);
  EXPECT_EQ(c.encoder.dim, 32u);
  EXPECT_EQ(c.role_http.at(RoleTag::Critic).model, "judge");
  EXPECT_THROW(parse_run_config(R"({"tsak": "CB"})"), InvalidArgument);
  EXPECT_THROW(parse_run_config(R"({"train": {"gama": 1}})"), InvalidArgument);
  EXPECT_THROW(parse_run_config("[1,2"), InvalidArgument);
}

TEST(Config, Cases) {
  const auto cases = parse_cases(R"([
    {"id": "a", "task": "CB", "background": "A lamp",
     "numeric_slots": {"listed_price": 50, "buyer_target_price": 30, "seller_desired_price": 45},
     "text_slots": {"product": "lamp"}},
    {"id": "b", "task": "CIMA", "background": "The cat is on the table"}
  ])");
  ASSERT_EQ(cases.size(), 2u);
  EXPECT_EQ(cases[0].slot(kListedPrice), 50.0);
  EXPECT_EQ(cases_for_task(cases, TaskId::CIMA).size(), 1u);
  EXPECT_THROW(parse_cases(R"([{"id": "x", "task": "CB", "background": "no prices"}])"),
               InvalidCase);
}

RunConfig small_config(TaskId task) {
  RunConfig c;
  c.task = task;
  c.encoder.dim = 16;
  c.hidden1 = 8;
  c.hidden2 = 8;
  c.train.episodes = 12;
  c.train.batch_size = 8;
  c.train.learning_rate = 1e-3;
  c.train.epochs = 1;
  c.eval_episodes = 6;
  c.seed = 21;
  return c;
}

struct RunArtifacts {
  std::vector<TurnRecord> records;
  std::vector<double> losses;
  MetricsReport metrics;
  QHeadParams params;
};

RunArtifacts run_small(RunConfig c) {
  HashEncoder enc(c.encoder.dim, 0);
  Runner runner(c, enc, make_gateway_factory(c, profile_for(c)));
  QHeadParams params = fresh_params(c);
  const auto cases = cases_for_run(c, 5);
  RunOutput train = runner.train(cases, params);
  RunOutput eval = runner.evaluate(cases, params, c.eval_episodes);
  auto records = collect_records(train.episodes);
  for (const TurnRecord& r : collect_records(eval.episodes)) records.push_back(r);
  return {records, train.losses, eval.metrics, params};
}

TEST(Runner, SeededRunsRepeat) {
  const RunArtifacts a = run_small(small_config(TaskId::CB));
  const RunArtifacts b = run_small(small_config(TaskId::CB));
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.losses, b.losses);
  EXPECT_EQ(a.metrics, b.metrics);
  EXPECT_EQ(a.params, b.params);
  EXPECT_FALSE(a.losses.empty());
}

TEST(Runner, WorkerCountDoesNotChangeResults) {
  RunConfig one = small_config(TaskId::ESConv);
  one.collect_batch = 4;
  RunConfig four = one;
  four.workers = 4;
  const RunArtifacts a = run_small(one);
  const RunArtifacts b = run_small(four);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.losses, b.losses);
  EXPECT_EQ(a.params, b.params);
}

TEST(Runner, NoRlTakesNoSteps) {
  RunConfig c = small_config(TaskId::P4G);
  c.use_rl = false;
  const QHeadParams before = fresh_params(c);
  const RunArtifacts a = run_small(c);
  EXPECT_TRUE(a.losses.empty());
  EXPECT_EQ(a.params, before);
}

TEST(Runner, MetricsMatchTheTranscript) {
  RunConfig c = small_config(TaskId::CB);
  HashEncoder enc(c.encoder.dim, 0);
  Runner runner(c, enc, make_gateway_factory(c, profile_for(c)));
  const QHeadParams params = fresh_params(c);
  const RunOutput out = runner.evaluate(cases_for_run(c, 5), params, 10);
  const auto records = collect_records(out.episodes);
  const MetricsReport from_log = make_report(summarize_records(records, TaskId::CB), TaskId::CB);
  EXPECT_EQ(from_log, out.metrics);
}

TEST(Chat, PipedSessionIsDeterministic) {
  auto session = [](const std::string& input) {
    const TaskProfile profile = builtin_profile(TaskId::ESConv);
    auto backend = std::make_shared<ScriptedBackend>();
    backend->add(RoleTag::Policy, "", single_response("1,2,3,4"));
    backend->add(RoleTag::System, "", single_response("Response: Tell me more."));
    backend->add(RoleTag::Emotion, "", single_response("tired"));
    backend->add(RoleTag::Critic, "", single_response("No, the patient feels the same."));
    Gateway gw(backend);
    ActionPrior prior(profile, ProjectionTable::builtin(profile), PriorConfig{});
    HashEncoder enc(16, 0);
    Rng init(1);
    const QHeadParams params = QHeadParams::init(16, 8, 8, init);
    DialogueEnvironment env(profile, prior, params, enc, gw);
    std::istringstream in(input);
    std::ostringstream out;
    Rng rng(4);
    CaseInfo c = mock_cases(TaskId::ESConv, 1, 0).front();
    const EpisodeResult r = chat_session(env, c, 0.0, rng, in, out);
    return std::make_pair(r, out.str());
  };
  const auto [r1, text1] = session("I feel stuck\n\nNothing works\n/quit\n");
  const auto [r2, text2] = session("I feel stuck\n\nNothing works\n/quit\n");
  EXPECT_EQ(text1, text2);
  EXPECT_EQ(r1.outcome, Terminal::Failed);
  EXPECT_EQ(r1.turns, 3u);
  EXPECT_EQ(r1.transcript.size(), 5u);
  EXPECT_EQ(r1.transcript[1].text, "I feel stuck");
  EXPECT_EQ(r1.transcript[3].text, "Nothing works");
  EXPECT_NE(text1.find("Therapist: Tell me more."), std::string::npos);
  EXPECT_NE(text1.find("(critic) No, the patient feels the same."), std::string::npos);
  EXPECT_NE(text1.find("Episode Failed after 3 turns."), std::string::npos);

  std::string many;
  for (int i = 0; i < 20; ++i) many += "still here\n";
  const auto [capped, capped_text] = session(many);
  EXPECT_EQ(capped.outcome, Terminal::Failed);
  EXPECT_EQ(capped.turns, 8u);
}

}  // namespace
}  // namespace dialplan
