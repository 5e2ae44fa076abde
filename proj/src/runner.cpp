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

#include "dialplan/runner.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "dialplan/errors.hpp"
#include "dialplan/mock_world.hpp"

namespace dialplan {
namespace {

constexpr std::uint64_t kInitStream = 0x1A17;
constexpr std::uint64_t kLearnerStream = 0x5A3F;
constexpr std::uint64_t kEvalSalt = 0xE7A1E7A1ULL;

}  // namespace

TaskProfile profile_for(const RunConfig& config) {
  TaskProfile p = builtin_profile(config.task);
  p.max_turns = config.max_turns;
  return p;
}

ProjectionTable table_for(const RunConfig& config, const TaskProfile& profile) {
  if (config.projection_path.empty()) return ProjectionTable::builtin(profile);
  ProjectionTable t = ProjectionTable::load(config.projection_path, profile);
  t.validate(profile.catalog);
  return t;
}

PriorConfig prior_config_for(const RunConfig& config) {
  PriorConfig p;
  p.mode = config.prior_mode;
  p.k = config.k;
  p.beam_width = config.beam_width;
  p.use_prior = config.use_prior;
  p.prompt.include_emotions = config.use_emotion;
  return p;
}

std::unique_ptr<Encoder> make_encoder(const EncoderConfig& config) {
  if (config.kind == "http") return std::make_unique<HttpEncoder>(config.endpoint, config.dim);
  return std::make_unique<HashEncoder>(config.dim, config.seed);
}

GatewayFactory make_gateway_factory(const RunConfig& config, const TaskProfile& profile) {
  switch (config.backend) {
    case BackendKind::Mock: {
      const GatewayConfig gc = config.gateway;
      return [profile, gc](const CaseInfo& c) {
        return std::make_shared<Gateway>(make_mock_backend(profile, c), gc);
      };
    }
    case BackendKind::Script: {
      auto gw = std::make_shared<Gateway>(
          std::make_shared<ScriptedBackend>(ScriptedBackend::load(config.script_path)),
          config.gateway);
      return [gw](const CaseInfo&) { return gw; };
    }
    case BackendKind::Http: {
      auto gw = std::make_shared<Gateway>(std::make_shared<HttpChatBackend>(config.http),
                                          config.gateway);
      for (const auto& [role, h] : config.role_http) {
        gw->route(role, std::make_shared<HttpChatBackend>(h));
      }
      return [gw](const CaseInfo&) { return gw; };
    }
  }
  throw InvalidArgument("unknown backend");
}

QHeadParams fresh_params(const RunConfig& config) {
  Rng rng(derive_seed(config.seed, kInitStream));
  return QHeadParams::init(config.encoder.dim, config.hidden1, config.hidden2, rng);
}

std::vector<CaseInfo> cases_for_run(const RunConfig& config, std::size_t mock_count) {
  if (config.cases_path.empty()) return mock_cases(config.task, mock_count, config.seed);
  std::vector<CaseInfo> cases = cases_for_task(load_cases(config.cases_path), config.task);
  if (cases.empty()) {
    throw InvalidArgument("no " + std::string(to_string(config.task)) + " cases in " +
                          config.cases_path);
  }
  return cases;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

Runner::Runner(RunConfig config, Encoder& encoder, GatewayFactory gateways)
    : config_(std::move(config)),
      profile_(profile_for(config_)),
      prior_(profile_, table_for(config_, profile_), prior_config_for(config_)),
      encoder_(encoder),
      gateways_(std::move(gateways)) {
  config_.validate();
  if (encoder_.dim() != config_.encoder.dim) {
    throw DimensionMismatch("encoder dimension differs from the configured one");
  }
}

EpisodeResult Runner::run_one(const CaseInfo& c, const QHeadParams& params, double epsilon,
                              std::uint64_t seed, std::size_t episode, ReplayBuffer* buffer) {
  std::shared_ptr<Gateway> gateway = gateways_(c);
  DialogueEnvironment env(profile_, prior_, params, encoder_, *gateway, environment_options());
  Rng rng(seed);
  EpisodeResult r = env.run_episode(c, epsilon, rng, episode, buffer);
  if (on_episode) on_episode(r);
  return r;
}

RunOutput Runner::train(const std::vector<CaseInfo>& cases, QHeadParams& params) {
  if (cases.empty()) throw EmptyInput("training needs at least one case");
  const TrainConfig& tc = config_.train;
  Learner learner(params, tc, profile_.catalog, encoder_, derive_seed(config_.seed, kLearnerStream));
  RunOutput out;
  const auto total = static_cast<std::size_t>(tc.episodes);
  for (std::size_t start = 0; start < total; start += config_.collect_batch) {
    const std::size_t end = std::min(total, start + config_.collect_batch);
    std::vector<EpisodeResult> wave(end - start);
    parallel_for(wave.size(), config_.workers, [&](std::size_t i) {
      const std::size_t ep = start + i;
      wave[i] = run_one(cases[ep % cases.size()], params, epsilon_at(ep, total, tc),
                        derive_seed(config_.seed, ep), ep, nullptr);
    });
    for (EpisodeResult& r : wave) {
      for (const Transition& t : r.transitions) learner.buffer().push(t);
      out.episodes.push_back(std::move(r));
    }
    if (config_.use_rl) {
      for (std::size_t s = 0; s < wave.size() * tc.updates_per_episode; ++s) learner.step();
    }
  }
  if (config_.use_rl) learner.refine(tc.epochs);
  out.updates = learner.updates();
  out.losses = learner.losses();
  if (!out.episodes.empty()) {
    out.metrics = make_report(summarize(out.episodes), config_.task, at_options());
  }
  return out;
}

RunOutput Runner::evaluate(const std::vector<CaseInfo>& cases, const QHeadParams& params,
                           std::size_t episodes) {
  if (cases.empty()) throw EmptyInput("evaluation needs at least one case");
  RunOutput out;
  out.episodes.resize(episodes);
  parallel_for(episodes, config_.workers, [&](std::size_t ep) {
    out.episodes[ep] = run_one(cases[ep % cases.size()], params, config_.epsilon_eval,
                               derive_seed(config_.seed ^ kEvalSalt, ep), ep, nullptr);
  });
  if (!out.episodes.empty()) {
    out.metrics = make_report(summarize(out.episodes), config_.task, at_options());
  }
  return out;
}

}  // namespace dialplan
