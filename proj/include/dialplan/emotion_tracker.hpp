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

#include <string>
#include <string_view>

#include "dialplan/llm_gateway.hpp"
#include "dialplan/types.hpp"

namespace dialplan {

inline constexpr std::string_view kNeutralEmotion = "neutral";

// Request asking the emotion role for a one-word label of `utterance`.
ChatRequest emotion_request(std::string_view utterance);

// Strips a leading "Emotion:" prefix, then returns the first alphabetic
// token lowercased. Throws EmptyLabel when there is none.
std::string parse_emotion_label(std::string_view reply);

// One gateway call. Throws InvalidArgument for an empty utterance and
// EmptyLabel when the reply holds no usable token.
std::string infer_emotion(std::string_view utterance, Gateway& gateway);

EmotionTrace accumulate(const EmotionTrace& trace, std::string label);

/// Per-turn tracker: infers the label for a user utterance and appends it,
/// recording "neutral" when the reply is unusable. When disabled it makes
/// no calls and leaves the trace untouched.
class EmotionTracker {
 public:
  explicit EmotionTracker(bool enabled = true) : enabled_(enabled) {}

  bool enabled() const { return enabled_; }
  EmotionTrace observe(const EmotionTrace& trace, std::string_view user_utterance,
                       Gateway& gateway) const;

 private:
  bool enabled_;
};

}  // namespace dialplan
