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

#include "dialplan/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dialplan/errors.hpp"

namespace dialplan {

void TrainConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in [0, 1]");
  if (batch_size == 0) throw InvalidArgument("batch_size must be positive");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
  if (epochs < 0 || episodes < 0) throw InvalidArgument("epochs and episodes must be >= 0");
  if (epsilon_start < 0.0 || epsilon_start > 1.0 || epsilon_end < 0.0 || epsilon_end > 1.0) {
    throw InvalidArgument("epsilon schedule must lie in [0, 1]");
  }
  if (target_sync_every == 0) throw InvalidArgument("target_sync_every must be positive");
  if (buffer_capacity == 0) throw InvalidArgument("buffer_capacity must be positive");
}

// ---------------------------------------------------------------------------
// ReplayBuffer

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw InvalidArgument("replay buffer capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  std::lock_guard lock(mu_);
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(std::move(t));
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  std::lock_guard lock(mu_);
  if (items_.size() < n) {
    throw InsufficientData("buffer holds " + std::to_string(items_.size()) + " < " +
                           std::to_string(n) + " transitions");
  }
  std::vector<std::size_t> order(items_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + uniform_index(rng, order.size() - i);
    std::swap(order[i], order[j]);
    out.push_back(items_[order[i]]);
  }
  return out;
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard lock(mu_);
  return items_.size();
}

std::vector<Transition> ReplayBuffer::snapshot() const {
  std::lock_guard lock(mu_);
  return {items_.begin(), items_.end()};
}

// ---------------------------------------------------------------------------
// TD machinery

double bellman_target(const Transition& t, const QHeadParams& params, const TrainConfig& cfg,
                      const ActionCatalog& catalog, EncodingCache& cache) {
  if (t.terminal) return t.reward;
  if (t.candidate_indices_next.empty()) {
    throw InvalidArgument("non-terminal transition without next-state candidates");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (int idx : t.candidate_indices_next) {
    best = std::max(best, q_forward(params, cache.encode(t.next_state_text, catalog.at(idx).name),
                                    /*use_target=*/true));
  }
  return t.reward + cfg.gamma * best;
}

TdGradient td_gradient(const QHeadParams& params, const std::vector<Transition>& batch,
                       const TrainConfig& cfg, const ActionCatalog& catalog,
                       EncodingCache& cache) {
  if (batch.empty()) throw InvalidArgument("td_update needs a non-empty batch");
  const auto& l = params.online.layers;
  TdGradient out;
  out.grad = MlpHead::zeros(static_cast<std::size_t>(l[0].weight.cols()),
                            static_cast<std::size_t>(l[0].weight.rows()),
                            static_cast<std::size_t>(l[1].weight.rows()));
  const double n = static_cast<double>(batch.size());
  for (const Transition& t : batch) {
    const double y = bellman_target(t, params, cfg, catalog, cache);
    const PairEncoding& enc = cache.encode(t.state_text, catalog.at(t.action_index).name);
    const double q = params.online.forward(enc.vector);
    const double err = q - y;
    out.loss += err * err / n;
    accumulate_gradient(params.online, enc.vector, 2.0 * err / n, out.grad);
  }
  return out;
}

double td_update(QHeadParams& params, const std::vector<Transition>& batch,
                 const TrainConfig& cfg, const ActionCatalog& catalog, Encoder& encoder,
                 AdamState* adam) {
  EncodingCache cache(encoder);
  TdGradient g = td_gradient(params, batch, cfg, catalog, cache);
  if (!std::isfinite(g.loss)) throw NonFiniteLoss("TD loss diverged");

  if (cfg.optimizer == OptimizerKind::Adam) {
    if (adam == nullptr) throw InvalidArgument("Adam optimizer needs state");
    if (adam->t == 0) {
      adam->m = g.grad;
      adam->v = g.grad;
      adam->m.for_each_parameter([](double& x) { x = 0.0; });
      adam->v.for_each_parameter([](double& x) { x = 0.0; });
    }
    ++adam->t;
    const double b1 = cfg.adam_beta1;
    const double b2 = cfg.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(adam->t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(adam->t));
    for (std::size_t k = 0; k < 3; ++k) {
      auto step = [&](auto& p, const auto& grad, auto& m, auto& v) {
        m = b1 * m + (1.0 - b1) * grad;
        v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
        p.array() -= cfg.learning_rate * (m.array() / c1) /
                     ((v.array() / c2).sqrt() + cfg.adam_eps);
      };
      step(params.online.layers[k].weight, g.grad.layers[k].weight, adam->m.layers[k].weight,
           adam->v.layers[k].weight);
      step(params.online.layers[k].bias, g.grad.layers[k].bias, adam->m.layers[k].bias,
           adam->v.layers[k].bias);
    }
  } else {
    for (std::size_t k = 0; k < 3; ++k) {
      params.online.layers[k].weight -= cfg.learning_rate * g.grad.layers[k].weight;
      params.online.layers[k].bias -= cfg.learning_rate * g.grad.layers[k].bias;
    }
  }
  ++params.step;
  return g.loss;
}

void sync_target(QHeadParams& params) { params.target = params.online; }

double epsilon_at(std::size_t step, std::size_t total_steps, const TrainConfig& cfg) {
  if (total_steps == 0 || step >= total_steps) return cfg.epsilon_end;
  const double frac = static_cast<double>(step) / static_cast<double>(total_steps);
  return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac;
}

// ---------------------------------------------------------------------------
// Learner

Learner::Learner(QHeadParams& params, TrainConfig cfg, const ActionCatalog& catalog,
                 Encoder& encoder, std::uint64_t seed)
    : params_(params),
      cfg_(cfg),
      catalog_(catalog),
      encoder_(encoder),
      buffer_(cfg.buffer_capacity),
      rng_(seed) {
  cfg_.validate();
}

std::optional<double> Learner::step() {
  if (buffer_.size() < cfg_.batch_size) return std::nullopt;
  const std::vector<Transition> batch = buffer_.sample(cfg_.batch_size, rng_);
  const double loss = td_update(params_, batch, cfg_, catalog_, encoder_, &adam_);
  ++updates_;
  losses_.push_back(loss);
  if (updates_ % cfg_.target_sync_every == 0) sync_target(params_);
  return loss;
}

void Learner::refine(int passes) {
  for (int p = 0; p < passes; ++p) {
    const std::size_t steps = (buffer_.size() + cfg_.batch_size - 1) / cfg_.batch_size;
    for (std::size_t s = 0; s < steps; ++s) {
      if (!step()) return;
    }
  }
}

}  // namespace dialplan
