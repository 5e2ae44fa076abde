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

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "dialplan/config.hpp"
#include "dialplan/environment.hpp"
#include "dialplan/metrics.hpp"

namespace dialplan {

// Gives each episode the gateway it should talk to. Live backends return
// one shared gateway; the mock world builds one per case.
using GatewayFactory = std::function<std::shared_ptr<Gateway>(const CaseInfo&)>;

TaskProfile profile_for(const RunConfig& config);
ProjectionTable table_for(const RunConfig& config, const TaskProfile& profile);
PriorConfig prior_config_for(const RunConfig& config);
std::unique_ptr<Encoder> make_encoder(const EncoderConfig& config);
GatewayFactory make_gateway_factory(const RunConfig& config, const TaskProfile& profile);

// Fresh head for the configured sizes, drawn from the run seed.
QHeadParams fresh_params(const RunConfig& config);

// Cases from cases_path, or generated mock cases when it is empty.
std::vector<CaseInfo> cases_for_run(const RunConfig& config, std::size_t mock_count = 20);

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
// thrown by any call is rethrown after all threads finish.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

struct RunOutput {
  std::vector<EpisodeResult> episodes;
  MetricsReport metrics;
  std::size_t updates = 0;
  std::vector<double> losses;
};

/// Drives training and evaluation episodes for one task. Episode i always
/// uses case i mod n, its own seed stream and, in training, the epsilon of
/// its position in the schedule, so results do not depend on the number of
/// worker threads.
class Runner {
 public:
  Runner(RunConfig config, Encoder& encoder, GatewayFactory gateways);

  // Collects config.train.episodes episodes in waves of collect_batch. After
  // each wave the transitions enter the buffer in episode order and
  // updates_per_episode steps per episode are taken; then `epochs`
  // refinement passes run over the final buffer. With use_rl off no update
  // is ever taken.
  RunOutput train(const std::vector<CaseInfo>& cases, QHeadParams& params);

  // `episodes` episodes at epsilon_eval with the head frozen.
  RunOutput evaluate(const std::vector<CaseInfo>& cases, const QHeadParams& params,
                     std::size_t episodes);

  const RunConfig& config() const { return config_; }
  const TaskProfile& profile() const { return profile_; }
  const ActionPrior& prior() const { return prior_; }
  EnvironmentOptions environment_options() const { return {config_.use_emotion}; }

  // Called after every finished episode, from the thread that ran it.
  std::function<void(const EpisodeResult&)> on_episode;

 private:
  EpisodeResult run_one(const CaseInfo& c, const QHeadParams& params, double epsilon,
                        std::uint64_t seed, std::size_t episode, ReplayBuffer* buffer);
  AtOptions at_options() const { return {config_.at_count_failures, config_.max_turns}; }

  RunConfig config_;
  TaskProfile profile_;
  ActionPrior prior_;
  Encoder& encoder_;
  GatewayFactory gateways_;
};

}  // namespace dialplan
