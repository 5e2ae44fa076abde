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
#include <map>

#include <gtest/gtest.h>

#include "dialplan/errors.hpp"
#include "dialplan/value_model.hpp"

namespace dialplan {
namespace {

class CountingEncoder : public Encoder {
 public:
  explicit CountingEncoder(std::size_t reported, std::size_t returned)
      : reported_(reported), returned_(returned) {}
  std::vector<double> encode(std::string_view, std::string_view) override {
    ++calls;
    return std::vector<double>(returned_, 0.5);
  }
  std::size_t dim() const override { return reported_; }
  int calls = 0;

 private:
  std::size_t reported_;
  std::size_t returned_;
};

MlpHead identity_1d() {
  MlpHead h = MlpHead::zeros(1, 1, 1);
  for (DenseLayer& l : h.layers) l.weight(0, 0) = 1.0;
  return h;
}

// Plain loops, no Eigen.
double reference_forward(const MlpHead& h, const std::vector<double>& x) {
  std::vector<double> a = x;
  for (std::size_t k = 0; k < 3; ++k) {
    const DenseLayer& l = h.layers[k];
    std::vector<double> z(static_cast<std::size_t>(l.weight.rows()));
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      double s = l.bias(r);
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) s += l.weight(r, c) * a[c];
      z[static_cast<std::size_t>(r)] = k < 2 ? std::max(0.0, s) : s;
    }
    a = z;
  }
  return a[0];
}

TEST(QForward, ZeroHeadIsZero) {
  const MlpHead h = MlpHead::zeros(5, 4, 3);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(5, -2.0, 2.0);
  EXPECT_EQ(h.forward(x), 0.0);
}

TEST(QForward, OneDimensionalChain) {
  const MlpHead h = identity_1d();
  EXPECT_DOUBLE_EQ(h.forward(Eigen::VectorXd::Constant(1, 2.0)), 2.0);
  EXPECT_DOUBLE_EQ(h.forward(Eigen::VectorXd::Constant(1, -3.0)), 0.0);
}

TEST(QForward, MatchesLoopReference) {
  Rng rng(3);
  const MlpHead h = MlpHead::glorot(6, 5, 4, rng);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> xs(6);
    for (double& v : xs) v = 2.0 * uniform01(rng) - 1.0;
    const Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(xs.data(), 6);
    EXPECT_NEAR(h.forward(x), reference_forward(h, xs), 1e-12);
  }
}

TEST(QForward, TargetHeadIsSelectable) {
  Rng rng(1);
  QHeadParams p = QHeadParams::init(4, 3, 3, rng);
  p.target = MlpHead::zeros(4, 3, 3);
  p.target.layers[2].bias(0) = 7.0;
  PairEncoding enc{Eigen::VectorXd::Ones(4), "k"};
  EXPECT_EQ(q_forward(p, enc, true), 7.0);
  EXPECT_EQ(q_forward(p, enc, false), p.online.forward(enc.vector));
}

TEST(QForward, WrongInputSizeThrows) {
  EXPECT_THROW(MlpHead::zeros(3, 2, 2).forward(Eigen::VectorXd::Zero(4)), DimensionMismatch);
}

TEST(Glorot, WithinLimitsAndZeroBias) {
  Rng rng(11);
  const MlpHead h = MlpHead::glorot(10, 6, 4, rng);
  for (const DenseLayer& l : h.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.weight.rows() + l.weight.cols()));
    EXPECT_LE(l.weight.cwiseAbs().maxCoeff(), limit);
    EXPECT_TRUE(l.bias.isZero(0.0));
  }
  EXPECT_EQ(h.parameter_count(), 10u * 6 + 6 + 6 * 4 + 4 + 4 + 1);
}

TEST(Softmax, HandComputed) {
  const std::vector<double> p = softmax(std::vector<double>{std::log(2.0), 0.0, 0.0});
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.25, 1e-15);
  EXPECT_NEAR(p[2], 0.25, 1e-15);
  const std::vector<double> eq = softmax(std::vector<double>{1.5, 1.5, 1.5, 1.5});
  for (double v : eq) EXPECT_NEAR(v, 0.25, 1e-15);
  EXPECT_EQ(softmax(std::vector<double>{-4.0}), std::vector<double>{1.0});
}

TEST(Softmax, ShiftInvariance) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> s(6);
    for (double& v : s) v = 10.0 * uniform01(rng) - 5.0;
    std::vector<double> shifted = s;
    const double c = 100.0 * uniform01(rng) - 50.0;
    for (double& v : shifted) v += c;
    const auto a = softmax(s);
    const auto b = softmax(shifted);
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_NEAR(a[i], b[i], 1e-12);
      total += a[i];
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
    ScoredCandidates sa{{1, 2, 3, 4, 5, 6}, s, a};
    ScoredCandidates sb{{1, 2, 3, 4, 5, 6}, shifted, b};
    Rng r1(0), r2(0);
    EXPECT_EQ(select_action(sa, 0.0, r1), select_action(sb, 0.0, r2));
  }
}

TEST(Softmax, LargeScoresStayFinite) {
  const auto p = softmax(std::vector<double>{1000.0, 999.0});
  EXPECT_NEAR(p[0], 1.0 / (1.0 + std::exp(-1.0)), 1e-12);
}

TEST(SelectAction, GreedyAndTies) {
  ScoredCandidates s{{6, 8, 3, 1}, {0.1, 0.9, 0.9, -1.0}, {}};
  Rng rng(1);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(select_action(s, 0.0, rng), 8);
  ScoredCandidates tie{{6, 8}, {0.5, 0.5}, {}};
  EXPECT_EQ(select_action(tie, 0.0, rng), 6);
  EXPECT_THROW(select_action(s, 1.5, rng), InvalidArgument);
}

TEST(SelectAction, UniformExplorationFrequencies) {
  ScoredCandidates s{{6, 8, 3, 1}, {5.0, 0.0, 0.0, 0.0}, {}};
  Rng rng(20240);
  std::map<int, int> counts;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) ++counts[select_action(s, 1.0, rng)];
  EXPECT_EQ(counts.size(), 4u);
  for (const auto& [idx, n] : counts) {
    EXPECT_NEAR(static_cast<double>(n) / kDraws, 0.25, 0.01) << idx;
  }
}

TEST(SelectAction, NeverLeavesTheCandidateSet) {
  ScoredCandidates s{{2, 7}, {0.0, 1.0}, {}};
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const int a = select_action(s, 0.5, rng);
    EXPECT_TRUE(a == 2 || a == 7);
  }
}

TEST(EncodePair, KeyAndDeterminism) {
  HashEncoder enc(16, 3);
  const PairEncoding a = encode_pair("s", "Question", enc);
  const PairEncoding b = encode_pair("s", "Question", enc);
  EXPECT_EQ(a.vector, b.vector);
  EXPECT_EQ(a.state_action_key, "State: s [SEP] Action: Question");
  EXPECT_NE(encode_pair("s", "Others", enc).vector, a.vector);
  EXPECT_NE(encode_pair("s", "Question", *std::make_unique<HashEncoder>(16, 4)).vector, a.vector);
  EXPECT_LE(a.vector.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_THROW(encode_pair("", "Question", enc), InvalidArgument);
}

TEST(EncodePair, DimensionMismatch) {
  CountingEncoder enc(768, 512);
  EXPECT_THROW(encode_pair("s", "a", enc), DimensionMismatch);
}

TEST(EncodingCache, OneServiceCallPerPair) {
  CountingEncoder enc(4, 4);
  EncodingCache cache(enc);
  const Eigen::VectorXd first = cache.encode("s", "a").vector;
  const Eigen::VectorXd second = cache.encode("s", "a").vector;
  EXPECT_EQ(first, second);
  EXPECT_EQ(enc.calls, 1);
  cache.encode("s", "b");
  EXPECT_EQ(cache.service_calls(), 2u);
  cache.clear();
  cache.encode("s", "a");
  EXPECT_EQ(enc.calls, 3);
}

TEST(ScoreCandidates, UsesOnlineHeadAndSoftmax) {
  const ActionCatalog cat(TaskId::CIMA, {{1, "a", "p"}, {2, "b", "p"}, {3, "c", "p"}});
  HashEncoder enc(8, 0);
  EncodingCache cache(enc);
  Rng rng(2);
  QHeadParams p = QHeadParams::init(8, 8, 8, rng);
  p.target = MlpHead::zeros(8, 8, 8);
  CandidateSet cs;
  cs.indices = {3, 1};
  const ScoredCandidates s = score_candidates(p, "state", cs, cat, cache);
  ASSERT_EQ(s.raw_scores.size(), 2u);
  EXPECT_EQ(s.indices, cs.indices);
  EXPECT_EQ(s.raw_scores[0], p.online.forward(encode_pair("state", "c", enc).vector));
  EXPECT_EQ(s.raw_scores[1], p.online.forward(encode_pair("state", "a", enc).vector));
  EXPECT_NEAR(s.probs[0] + s.probs[1], 1.0, 1e-12);
  EXPECT_NEAR(s.probs[0] / s.probs[1], std::exp(s.raw_scores[0] - s.raw_scores[1]), 1e-9);
}

// Central differences of Q with respect to every parameter.
TEST(AccumulateGradient, MatchesFiniteDifferences) {
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    MlpHead h = MlpHead::glorot(8, 8, 8, rng);
    h.for_each_parameter([&](double& w) { w += 0.1 * (2.0 * uniform01(rng) - 1.0); });
    Eigen::VectorXd x(8);
    for (Eigen::Index i = 0; i < 8; ++i) x(i) = 2.0 * uniform01(rng) - 1.0;
    MlpHead grad = MlpHead::zeros(8, 8, 8);
    accumulate_gradient(h, x, 1.0, grad);
    std::vector<double> analytic;
    grad.for_each_parameter([&](double& g) { analytic.push_back(g); });
    std::size_t i = 0;
    const double step = 1e-4;
    h.for_each_parameter([&](double& w) {
      const double saved = w;
      w = saved + step;
      const double up = h.forward(x);
      w = saved - step;
      const double down = h.forward(x);
      w = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
      EXPECT_LE(std::abs(numeric - analytic[i]) / denom, 1e-4) << "param " << i;
      ++i;
    });
  }
}

}  // namespace
}  // namespace dialplan
