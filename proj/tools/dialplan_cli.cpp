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

// Command-line front end: train, eval, chat, simulate and inspect-prior.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dialplan/chat.hpp"
#include "dialplan/checkpoint.hpp"
#include "dialplan/config.hpp"
#include "dialplan/errors.hpp"
#include "dialplan/metrics.hpp"
#include "dialplan/runner.hpp"
#include "dialplan/transcript.hpp"

namespace fs = std::filesystem;
using namespace dialplan;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> task;
  std::optional<std::string> backend;
  std::optional<std::string> script;
  std::optional<std::string> cases;
  std::optional<std::string> projection;
  std::optional<std::string> out;
  std::optional<std::string> prior_mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<int> k;
  std::optional<double> epsilon_eval;
  std::optional<std::size_t> max_turns;
  std::optional<int> episodes;
  std::optional<double> learning_rate;
  std::optional<std::size_t> eval_episodes;
  std::optional<std::size_t> encoder_dim;
  std::optional<std::size_t> hidden;
  std::optional<bool> at_count_failures;
  bool no_rl = false;
  bool no_prior = false;
  bool no_emotion = false;
  std::string checkpoint;
  std::string case_id;
  std::string history_path;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config_path, "JSON run configuration");
  cmd->add_option("--task", f.task, "ESConv, CIMA, CB, P4G or ExTES");
  cmd->add_option("--backend", f.backend, "mock, script or http");
  cmd->add_option("--script", f.script, "script file for the script backend");
  cmd->add_option("--cases", f.cases, "JSON case file (default: generated mock cases)");
  cmd->add_option("--projection", f.projection, "projection table file");
  cmd->add_option("-o,--out", f.out, "output directory");
  cmd->add_option("--prior-mode", f.prior_mode, "list or beam");
  cmd->add_option("--seed", f.seed);
  cmd->add_option("--workers", f.workers, "concurrent episodes");
  cmd->add_option("-k,--top-k", f.k, "candidate set size");
  cmd->add_option("--epsilon-eval", f.epsilon_eval, "exploration rate outside training");
  cmd->add_option("--max-turns", f.max_turns);
  cmd->add_option("--episodes", f.episodes, "training episodes");
  cmd->add_option("--lr", f.learning_rate, "learning rate");
  cmd->add_option("--eval-episodes", f.eval_episodes);
  cmd->add_option("--encoder-dim", f.encoder_dim);
  cmd->add_option("--hidden", f.hidden, "hidden width of both layers");
  cmd->add_option("--at-count-failures", f.at_count_failures,
                  "count failed episodes at the turn cap in AT (default true)");
  cmd->add_flag("--no-rl", f.no_rl, "never update the value head");
  cmd->add_flag("--no-prior", f.no_prior, "use the whole catalog as candidates");
  cmd->add_flag("--no-emotion", f.no_emotion, "disable emotion tracking");
}

RunConfig build_config(const CommonFlags& f, RunMode mode) {
  RunConfig c;
  if (!f.config_path.empty()) c = load_run_config(f.config_path);
  else apply_env_overrides(c);
  c.mode = mode;
  if (f.task) c.task = task_from_string(*f.task);
  if (f.backend) c.backend = backend_from_string(*f.backend);
  if (f.script) c.script_path = *f.script;
  if (f.cases) c.cases_path = *f.cases;
  if (f.projection) c.projection_path = *f.projection;
  if (f.out) c.output_dir = *f.out;
  if (f.prior_mode) {
    if (*f.prior_mode == "list") c.prior_mode = PriorMode::ListMode;
    else if (*f.prior_mode == "beam") c.prior_mode = PriorMode::BeamMode;
    else throw InvalidArgument("--prior-mode must be list or beam");
  }
  if (f.seed) c.seed = *f.seed;
  if (f.workers) c.workers = *f.workers;
  if (f.k) c.k = *f.k;
  if (f.epsilon_eval) c.epsilon_eval = *f.epsilon_eval;
  if (f.max_turns) c.max_turns = *f.max_turns;
  if (f.episodes) c.train.episodes = *f.episodes;
  if (f.learning_rate) c.train.learning_rate = *f.learning_rate;
  if (f.eval_episodes) c.eval_episodes = *f.eval_episodes;
  if (f.encoder_dim) c.encoder.dim = *f.encoder_dim;
  if (f.hidden) c.hidden1 = c.hidden2 = *f.hidden;
  if (f.at_count_failures) c.at_count_failures = *f.at_count_failures;
  if (f.no_rl) c.use_rl = false;
  if (f.no_prior) c.use_prior = false;
  if (f.no_emotion) c.use_emotion = false;
  if (!f.checkpoint.empty()) c.checkpoint_in = f.checkpoint;
  c.validate();
  return c;
}

QHeadParams initial_params(const RunConfig& c) {
  if (c.checkpoint_in.empty()) return fresh_params(c);
  QHeadParams p = load_checkpoint(c.checkpoint_in);
  if (p.online.input_dim() != c.encoder.dim) {
    throw DimensionMismatch("checkpoint input size " + std::to_string(p.online.input_dim()) +
                            " differs from encoder dim " + std::to_string(c.encoder.dim));
  }
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

void report(const RunConfig& c, const RunOutput& r, const fs::path& dir, const std::string& stem) {
  save_transcript((dir / (stem + "_transcript.jsonl")).string(), collect_records(r.episodes));
  write_text(dir / (stem + "_metrics.json"), to_json(r.metrics, c.task));
  std::cout << stem << '\n' << render_table(r.metrics, c.task);
}

int run_train(const RunConfig& c, bool also_eval) {
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  auto encoder = make_encoder(c.encoder);
  Runner runner(c, *encoder, make_gateway_factory(c, profile_for(c)));
  const std::vector<CaseInfo> cases = cases_for_run(c);
  QHeadParams params = initial_params(c);

  const RunOutput train = runner.train(cases, params);
  save_checkpoint(params, (dir / "checkpoint.bin").string());
  report(c, train, dir, "train");
  std::cout << "updates " << train.updates;
  if (!train.losses.empty()) std::cout << ", final loss " << train.losses.back();
  std::cout << '\n';

  if (also_eval) {
    const RunOutput eval = runner.evaluate(cases, params, c.eval_episodes);
    report(c, eval, dir, "eval");
  }
  return 0;
}

int run_eval(const RunConfig& c) {
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  auto encoder = make_encoder(c.encoder);
  Runner runner(c, *encoder, make_gateway_factory(c, profile_for(c)));
  const QHeadParams params = initial_params(c);
  const RunOutput eval = runner.evaluate(cases_for_run(c), params, c.eval_episodes);
  report(c, eval, dir, "eval");
  return 0;
}

const CaseInfo& pick_case(const std::vector<CaseInfo>& cases, const std::string& id) {
  if (id.empty()) return cases.front();
  for (const CaseInfo& ci : cases) {
    if (ci.id == id) return ci;
  }
  throw InvalidArgument("no case with id " + id);
}

int run_chat(const RunConfig& c, const std::string& case_id) {
  auto encoder = make_encoder(c.encoder);
  const TaskProfile profile = profile_for(c);
  const std::vector<CaseInfo> cases = cases_for_run(c);
  const CaseInfo& ci = pick_case(cases, case_id);
  auto gateway = make_gateway_factory(c, profile)(ci);
  const ActionPrior prior(profile, table_for(c, profile), prior_config_for(c));
  const QHeadParams params = initial_params(c);
  DialogueEnvironment env(profile, prior, params, *encoder, *gateway, {c.use_emotion});
  Rng rng(c.seed);
  chat_session(env, ci, c.epsilon_eval, rng, std::cin, std::cout);
  return 0;
}

// History file: JSON array of utterance strings, alternating system then user.
DialogueState load_state(const CaseInfo& ci, const std::string& path) {
  DialogueState s = initial_state(ci);
  if (path.empty()) return s;
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  const auto j = nlohmann::json::parse(in);
  for (const auto& item : j) {
    const Speaker who = s.history.size() % 2 == 0 ? Speaker::System : Speaker::User;
    s = append_turn(s, {who, item.get<std::string>(), s.history.size()});
  }
  return s;
}

int run_inspect(const RunConfig& c, const std::string& case_id, const std::string& history) {
  auto encoder = make_encoder(c.encoder);
  const TaskProfile profile = profile_for(c);
  const std::vector<CaseInfo> cases = cases_for_run(c);
  const CaseInfo& ci = pick_case(cases, case_id);
  auto gateway = make_gateway_factory(c, profile)(ci);
  const ActionPrior prior(profile, table_for(c, profile), prior_config_for(c));
  const DialogueState state = load_state(ci, history);

  const PolicyPrompt prompt = build_policy_prompt(state, profile, c.k, {c.use_emotion});
  std::cout << "=== policy prompt ===\n" << prompt.text() << "\n\n";
  const CandidateSet cs = prior.propose(state, *gateway);
  std::cout << "=== candidates (" << to_string(cs.source) << ") ===\n";
  const QHeadParams params = initial_params(c);
  EncodingCache cache(*encoder);
  const std::string state_text =
      serialize_state(state, profile.catalog, SerializeOptions{c.use_emotion});
  const ScoredCandidates scored = score_candidates(params, state_text, cs, profile.catalog, cache);
  for (std::size_t i = 0; i < cs.indices.size(); ++i) {
    const int idx = cs.indices[i];
    std::printf("%3d  %-40s  Q=% .6f  p=%.4f", idx, profile.catalog.at(idx).name.c_str(),
                scored.raw_scores[i], scored.probs[i]);
    if (cs.prior) {
      auto it = cs.prior->weights.find(idx);
      std::printf("  prior=%.4f", it == cs.prior->weights.end() ? 0.0 : it->second);
    }
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dialogue action planning with an LLM prior and a learned value head"};
  app.require_subcommand(1);
  CommonFlags f;

  auto* train = app.add_subcommand("train", "train the value head through self-play");
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  auto* chat = app.add_subcommand("chat", "play the user role from the terminal");
  auto* simulate = app.add_subcommand("simulate", "train and evaluate against the mock world");
  auto* inspect = app.add_subcommand("inspect-prior", "print the candidate set for a state");
  for (CLI::App* cmd : {train, eval, chat, simulate, inspect}) add_common(cmd, f);
  for (CLI::App* cmd : {eval, chat, inspect, train}) {
    cmd->add_option("--checkpoint", f.checkpoint, "value-head checkpoint to start from");
  }
  for (CLI::App* cmd : {chat, inspect}) cmd->add_option("--case-id", f.case_id);
  inspect->add_option("--history", f.history_path, "JSON array of utterances, system first");

  CLI11_PARSE(app, argc, argv);
  try {
    if (train->parsed()) return run_train(build_config(f, RunMode::Train), false);
    if (eval->parsed()) return run_eval(build_config(f, RunMode::Eval));
    if (chat->parsed()) return run_chat(build_config(f, RunMode::Chat), f.case_id);
    if (simulate->parsed()) {
      RunConfig c = build_config(f, RunMode::Simulate);
      c.backend = BackendKind::Mock;
      return run_train(c, true);
    }
    if (inspect->parsed()) return run_inspect(build_config(f, RunMode::Eval), f.case_id, f.history_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
