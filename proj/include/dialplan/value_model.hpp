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

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "dialplan/action_prior.hpp"
#include "dialplan/random.hpp"
#include "dialplan/types.hpp"

namespace dialplan {

inline constexpr std::size_t kDefaultEncoderDim = 768;
inline constexpr std::size_t kDefaultHiddenDim = 256;

struct PairEncoding {
  Eigen::VectorXd vector;
  std::string state_action_key;
};

/// A frozen text-pair encoder returning one pooled vector per pair.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual std::vector<double> encode(std::string_view input, std::string_view pair) = 0;
  virtual std::size_t dim() const = 0;
};

/// Deterministic stand-in for a real encoder: each pair maps to a vector of
/// uniform draws in [-1, 1] seeded by a hash of its bytes. Distinct pairs
/// get unrelated vectors.
class HashEncoder : public Encoder {
 public:
  explicit HashEncoder(std::size_t dim = kDefaultEncoderDim, std::uint64_t seed = 0)
      : dim_(dim), seed_(seed) {}
  std::vector<double> encode(std::string_view input, std::string_view pair) override;
  std::size_t dim() const override { return dim_; }

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

/// Client for an embedding service: POST {"input": ..., "pair": ...} and
/// expect {"vector": [...]}. ENCODER_ENDPOINT overrides `endpoint` when set.
/// The declared dimension is not checked here; encode_pair does that.
class HttpEncoder : public Encoder {
 public:
  HttpEncoder(std::string endpoint, std::size_t dim);
  std::vector<double> encode(std::string_view input, std::string_view pair) override;
  std::size_t dim() const override { return dim_; }

 private:
  std::string scheme_host_port_;
  std::string path_;
  std::size_t dim_;
};

// The two halves of the value-head input for (state, action).
std::string pair_input(std::string_view state_text);
std::string pair_action(std::string_view action_name);
std::string state_action_key(std::string_view state_text, std::string_view action_name);

// One service call. Throws DimensionMismatch when the service returns a
// vector of the wrong size, or one with non-finite entries.
PairEncoding encode_pair(std::string_view state_text, std::string_view action_name,
                         Encoder& encoder);

/// Memoizes encode_pair for the lifetime of one episode. Not shared across
/// episodes.
class EncodingCache {
 public:
  explicit EncodingCache(Encoder& encoder) : encoder_(&encoder) {}

  const PairEncoding& encode(std::string_view state_text, std::string_view action_name);
  std::size_t service_calls() const { return calls_; }
  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }
  Encoder& encoder() const { return *encoder_; }

 private:
  Encoder* encoder_;
  std::unordered_map<std::string, PairEncoding> entries_;
  std::size_t calls_ = 0;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;

  bool operator==(const DenseLayer& o) const {
    return weight.rows() == o.weight.rows() && weight.cols() == o.weight.cols() &&
           weight == o.weight && bias == o.bias;
  }
};

/// d -> h1 -> h2 -> 1 with rectifiers between layers.
struct MlpHead {
  std::array<DenseLayer, 3> layers;

  static MlpHead zeros(std::size_t d, std::size_t h1, std::size_t h2);
  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static MlpHead glorot(std::size_t d, std::size_t h1, std::size_t h2, Rng& rng);

  std::size_t input_dim() const { return static_cast<std::size_t>(layers[0].weight.cols()); }
  std::size_t parameter_count() const;
  double forward(const Eigen::VectorXd& x) const;

  // Visits every parameter in a fixed order (layer by layer, weights in
  // row-major order then biases).
  template <typename F>
  void for_each_parameter(F&& f) {
    for (DenseLayer& l : layers) {
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c) f(l.weight(r, c));
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) f(l.bias(i));
    }
  }

  bool operator==(const MlpHead&) const = default;
};

// Adds upstream * dQ/dtheta to `grad` (same shape as `head`) and returns Q(x).
double accumulate_gradient(const MlpHead& head, const Eigen::VectorXd& x, double upstream,
                           MlpHead& grad);

/// Online value head plus its frozen target copy and the count of gradient
/// steps taken so far.
struct QHeadParams {
  MlpHead online;
  MlpHead target;
  std::uint64_t step = 0;

  // Online head drawn with glorot(), target synced to it.
  static QHeadParams init(std::size_t d, std::size_t h1, std::size_t h2, Rng& rng);

  bool operator==(const QHeadParams&) const = default;
};

double q_forward(const QHeadParams& params, const PairEncoding& enc, bool use_target);

struct ScoredCandidates {
  std::vector<int> indices;
  std::vector<double> raw_scores;
  std::vector<double> probs;
};

// Shift-stable softmax.
std::vector<double> softmax(std::span<const double> scores);

ScoredCandidates score_candidates(const QHeadParams& params, std::string_view state_text,
                                  const CandidateSet& candidates, const ActionCatalog& catalog,
                                  EncodingCache& cache);

// Argmax with probability 1 - epsilon (ties to the earliest candidate),
// otherwise a uniform draw over the candidates.
int select_action(const ScoredCandidates& scored, double epsilon, Rng& rng);

}  // namespace dialplan
