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
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <vector>

#include "dialplan/random.hpp"
#include "dialplan/types.hpp"
#include "dialplan/value_model.hpp"

namespace dialplan {

enum class OptimizerKind { GradientDescent, Adam };

struct TrainConfig {
  double gamma = 0.999;
  std::size_t batch_size = 32;
  double learning_rate = 1e-6;
  int epochs = 3;
  int episodes = 1000;
  double epsilon_start = 1.0;
  double epsilon_end = 0.1;
  std::size_t target_sync_every = 100;  // gradient steps
  std::size_t buffer_capacity = 10000;
  std::size_t updates_per_episode = 1;
  OptimizerKind optimizer = OptimizerKind::GradientDescent;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;  // throws InvalidArgument
};

/// Fixed-capacity FIFO of transitions. push() may be called from several
/// collector threads; sampling takes the same lock.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  // n distinct items, uniform without replacement. Throws InsufficientData
  // when fewer than n are stored.
  std::vector<Transition> sample(std::size_t n, Rng& rng) const;

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  std::vector<Transition> snapshot() const;  // oldest first

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::deque<Transition> items_;
};

// r for terminal transitions, otherwise r + gamma * max over the stored
// next-state candidates of the target head.
double bellman_target(const Transition& t, const QHeadParams& params, const TrainConfig& cfg,
                      const ActionCatalog& catalog, EncodingCache& cache);

struct TdGradient {
  double loss = 0.0;
  MlpHead grad;  // dL/dtheta for the online head
};

// Mean squared TD error over the batch and its gradient with the targets
// held constant.
TdGradient td_gradient(const QHeadParams& params, const std::vector<Transition>& batch,
                       const TrainConfig& cfg, const ActionCatalog& catalog,
                       EncodingCache& cache);

struct AdamState {
  MlpHead m;
  MlpHead v;
  std::uint64_t t = 0;
};

// One optimizer step on the online head. Returns the loss before the step
// and advances params.step. Throws NonFiniteLoss if the loss is not finite;
// params are left untouched in that case.
double td_update(QHeadParams& params, const std::vector<Transition>& batch,
                 const TrainConfig& cfg, const ActionCatalog& catalog, Encoder& encoder,
                 AdamState* adam = nullptr);

void sync_target(QHeadParams& params);

// Linear from epsilon_start at step 0 to epsilon_end at total_steps, then
// held at epsilon_end.
double epsilon_at(std::size_t step, std::size_t total_steps, const TrainConfig& cfg);

/// Owns the buffer-side of training: sampling, the update schedule and
/// target syncs. Single writer: only the thread driving the Learner may
/// touch the parameters.
class Learner {
 public:
  Learner(QHeadParams& params, TrainConfig cfg, const ActionCatalog& catalog, Encoder& encoder,
          std::uint64_t seed);

  ReplayBuffer& buffer() { return buffer_; }
  const ReplayBuffer& buffer() const { return buffer_; }

  // Samples a batch and takes one step; returns nullopt and changes nothing
  // when the buffer holds fewer than batch_size transitions.
  std::optional<double> step();

  // `passes` sweeps over the current buffer, each of ceil(size/batch) steps.
  void refine(int passes);

  std::size_t updates() const { return updates_; }
  const std::vector<double>& losses() const { return losses_; }
  const TrainConfig& config() const { return cfg_; }

 private:
  QHeadParams& params_;
  TrainConfig cfg_;
  const ActionCatalog& catalog_;
  Encoder& encoder_;
  ReplayBuffer buffer_;
  Rng rng_;
  AdamState adam_;
  std::size_t updates_ = 0;
  std::vector<double> losses_;
};

}  // namespace dialplan
