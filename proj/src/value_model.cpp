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

#include "dialplan/value_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "dialplan/errors.hpp"

namespace dialplan {

std::vector<double> HashEncoder::encode(std::string_view input, std::string_view pair) {
  std::uint64_t state = fnv1a64(pair, fnv1a64(input) ^ 0x5bd1e995ULL) ^ seed_;
  std::vector<double> v(dim_);
  for (double& x : v) {
    const std::uint64_t bits = splitmix64(state);
    x = 2.0 * (static_cast<double>(bits >> 11) * 0x1.0p-53) - 1.0;
  }
  return v;
}

HttpEncoder::HttpEncoder(std::string endpoint, std::size_t dim) : dim_(dim) {
  if (const char* env = std::getenv("ENCODER_ENDPOINT")) endpoint = env;
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidArgument("encoder endpoint must start with http:// or https://");
  }
  const auto path_start = endpoint.find('/', scheme_end + 3);
  scheme_host_port_ = endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? std::string("/") : endpoint.substr(path_start);
}

std::vector<double> HttpEncoder::encode(std::string_view input, std::string_view pair) {
  httplib::Client client(scheme_host_port_);
  const nlohmann::json body = {{"input", input}, {"pair", pair}};
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) throw TransportError("encoder request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw TransportError("encoder returned HTTP " + std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body).at("vector").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed encoder response: ") + e.what());
  }
}

std::string pair_input(std::string_view state_text) {
  return "State: " + std::string(state_text);
}

std::string pair_action(std::string_view action_name) {
  return "Action: " + std::string(action_name);
}

std::string state_action_key(std::string_view state_text, std::string_view action_name) {
  return pair_input(state_text) + " [SEP] " + pair_action(action_name);
}

PairEncoding encode_pair(std::string_view state_text, std::string_view action_name,
                         Encoder& encoder) {
  if (state_text.empty() || action_name.empty()) {
    throw InvalidArgument("encode_pair needs non-empty state and action text");
  }
  const std::vector<double> raw = encoder.encode(pair_input(state_text), pair_action(action_name));
  if (raw.size() != encoder.dim()) {
    throw DimensionMismatch("encoder returned " + std::to_string(raw.size()) +
                            " values, expected " + std::to_string(encoder.dim()));
  }
  PairEncoding enc;
  enc.vector = Eigen::Map<const Eigen::VectorXd>(raw.data(), static_cast<Eigen::Index>(raw.size()));
  if (!enc.vector.allFinite()) throw DimensionMismatch("encoder returned non-finite values");
  enc.state_action_key = state_action_key(state_text, action_name);
  return enc;
}

const PairEncoding& EncodingCache::encode(std::string_view state_text,
                                          std::string_view action_name) {
  std::string key = state_action_key(state_text, action_name);
  auto it = entries_.find(key);
  if (it != entries_.end()) return it->second;
  ++calls_;
  PairEncoding enc = encode_pair(state_text, action_name, *encoder_);
  return entries_.emplace(std::move(key), std::move(enc)).first->second;
}

// ---------------------------------------------------------------------------
// MLP head

MlpHead MlpHead::zeros(std::size_t d, std::size_t h1, std::size_t h2) {
  auto n = [](std::size_t v) { return static_cast<Eigen::Index>(v); };
  MlpHead head;
  head.layers[0] = {Eigen::MatrixXd::Zero(n(h1), n(d)), Eigen::VectorXd::Zero(n(h1))};
  head.layers[1] = {Eigen::MatrixXd::Zero(n(h2), n(h1)), Eigen::VectorXd::Zero(n(h2))};
  head.layers[2] = {Eigen::MatrixXd::Zero(1, n(h2)), Eigen::VectorXd::Zero(1)};
  return head;
}

MlpHead MlpHead::glorot(std::size_t d, std::size_t h1, std::size_t h2, Rng& rng) {
  MlpHead head = zeros(d, h1, h2);
  for (DenseLayer& l : head.layers) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(l.weight.rows() + l.weight.cols()));
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
        l.weight(r, c) = (2.0 * uniform01(rng) - 1.0) * limit;
      }
    }
  }
  return head;
}

std::size_t MlpHead::parameter_count() const {
  std::size_t n = 0;
  for (const DenseLayer& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

double MlpHead::forward(const Eigen::VectorXd& x) const {
  if (x.size() != layers[0].weight.cols()) {
    throw DimensionMismatch("head expects " + std::to_string(layers[0].weight.cols()) +
                            " inputs, got " + std::to_string(x.size()));
  }
  const Eigen::VectorXd a1 = (layers[0].weight * x + layers[0].bias).cwiseMax(0.0);
  const Eigen::VectorXd a2 = (layers[1].weight * a1 + layers[1].bias).cwiseMax(0.0);
  return (layers[2].weight * a2 + layers[2].bias)(0);
}

double accumulate_gradient(const MlpHead& head, const Eigen::VectorXd& x, double upstream,
                           MlpHead& grad) {
  const auto& L = head.layers;
  if (x.size() != L[0].weight.cols()) throw DimensionMismatch("input size does not match head");
  const Eigen::VectorXd z1 = L[0].weight * x + L[0].bias;
  const Eigen::VectorXd a1 = z1.cwiseMax(0.0);
  const Eigen::VectorXd z2 = L[1].weight * a1 + L[1].bias;
  const Eigen::VectorXd a2 = z2.cwiseMax(0.0);
  const double q = (L[2].weight * a2 + L[2].bias)(0);

  // dQ/dz3 = upstream.
  grad.layers[2].weight.noalias() += upstream * a2.transpose();
  grad.layers[2].bias(0) += upstream;
  const Eigen::VectorXd d2 =
      (upstream * L[2].weight.transpose()).cwiseProduct((z2.array() > 0.0).cast<double>().matrix());
  grad.layers[1].weight.noalias() += d2 * a1.transpose();
  grad.layers[1].bias += d2;
  const Eigen::VectorXd d1 =
      (L[1].weight.transpose() * d2).cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
  grad.layers[0].weight.noalias() += d1 * x.transpose();
  grad.layers[0].bias += d1;
  return q;
}

QHeadParams QHeadParams::init(std::size_t d, std::size_t h1, std::size_t h2, Rng& rng) {
  QHeadParams p;
  p.online = MlpHead::glorot(d, h1, h2, rng);
  p.target = p.online;
  return p;
}

double q_forward(const QHeadParams& params, const PairEncoding& enc, bool use_target) {
  return (use_target ? params.target : params.online).forward(enc.vector);
}

// ---------------------------------------------------------------------------
// Scoring and selection

std::vector<double> softmax(std::span<const double> scores) {
  if (scores.empty()) return {};
  const double m = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - m);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

ScoredCandidates score_candidates(const QHeadParams& params, std::string_view state_text,
                                  const CandidateSet& candidates, const ActionCatalog& catalog,
                                  EncodingCache& cache) {
  if (candidates.indices.empty()) throw InvalidArgument("no candidates to score");
  ScoredCandidates out;
  out.indices = candidates.indices;
  for (int idx : candidates.indices) {
    out.raw_scores.push_back(q_forward(params, cache.encode(state_text, catalog.at(idx).name), false));
  }
  out.probs = softmax(out.raw_scores);
  return out;
}

int select_action(const ScoredCandidates& scored, double epsilon, Rng& rng) {
  if (scored.indices.empty()) throw InvalidArgument("no candidates to select from");
  if (epsilon < 0.0 || epsilon > 1.0) throw InvalidArgument("epsilon must lie in [0, 1]");
  if (uniform01(rng) < epsilon) {
    return scored.indices[uniform_index(rng, scored.indices.size())];
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < scored.raw_scores.size(); ++i) {
    if (scored.raw_scores[i] > scored.raw_scores[best]) best = i;
  }
  return scored.indices[best];
}

}  // namespace dialplan
