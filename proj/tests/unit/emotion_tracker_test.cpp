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

#include <gtest/gtest.h>

#include "dialplan/emotion_tracker.hpp"
#include "dialplan/errors.hpp"

namespace dialplan {
namespace {

Gateway scripted_gateway(const std::string& reply) {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->set_default(single_response(reply));
  return Gateway(backend);
}

TEST(ParseEmotionLabel, Normalizes) {
  EXPECT_EQ(parse_emotion_label("Anxious."), "anxious");
  EXPECT_EQ(parse_emotion_label("  hopeful and tired"), "hopeful");
  EXPECT_EQ(parse_emotion_label("\"Angry\""), "angry");
}

TEST(ParseEmotionLabel, StripsEmotionPrefix) {
  EXPECT_EQ(parse_emotion_label("Emotion: fear"), "fear");
  EXPECT_EQ(parse_emotion_label("emotion:Relief"), "relief");
  // Only a leading prefix is removed.
  EXPECT_EQ(parse_emotion_label("calm. Emotion: fear"), "calm");
}

TEST(ParseEmotionLabel, NoWordThrows) {
  EXPECT_THROW(parse_emotion_label("!!!"), EmptyLabel);
  EXPECT_THROW(parse_emotion_label(""), EmptyLabel);
  EXPECT_THROW(parse_emotion_label("Emotion: 42"), EmptyLabel);
}

TEST(InferEmotion, OneSmallCall) {
  Gateway gw = scripted_gateway("Anxious.");
  EXPECT_EQ(infer_emotion("I have an exam tomorrow", gw), "anxious");
  EXPECT_EQ(gw.calls(RoleTag::Emotion), 1u);
  EXPECT_EQ(gw.total_calls(), 1u);
  EXPECT_LE(emotion_request("x").max_tokens, 10);
  EXPECT_THROW(infer_emotion("   ", gw), InvalidArgument);
}

TEST(EmotionTracker, UnusableReplyRecordsNeutral) {
  Gateway gw = scripted_gateway("!!!");
  const EmotionTrace t = EmotionTracker().observe({}, "hello", gw);
  EXPECT_EQ(t.labels, (std::vector<std::string>{"neutral"}));
}

TEST(EmotionTracker, DisabledMakesNoCalls) {
  Gateway gw = scripted_gateway("sad");
  const EmotionTrace before{{"calm"}};
  EXPECT_EQ(EmotionTracker(false).observe(before, "hello", gw), before);
  EXPECT_EQ(gw.total_calls(), 0u);
}

TEST(EmotionTracker, LengthTracksUserTurns) {
  Gateway gw = scripted_gateway("sad");
  EmotionTracker tracker;
  EmotionTrace t;
  for (int i = 0; i < 5; ++i) t = tracker.observe(t, "turn " + std::to_string(i), gw);
  EXPECT_EQ(t.labels.size(), 5u);
}

TEST(Accumulate, Appends) {
  EXPECT_EQ(accumulate({}, "disgust").labels, (std::vector<std::string>{"disgust"}));
  const EmotionTrace t = accumulate({{"disgust", "betrayed"}}, "disoriented");
  EXPECT_EQ(t.render(), "disgust -> betrayed -> disoriented");
  EXPECT_EQ(accumulate(accumulate(t, "x"), "x").labels.size(), 5u);
}

}  // namespace
}  // namespace dialplan
