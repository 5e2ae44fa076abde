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

#include "dialplan/emotion_tracker.hpp"

#include <cctype>

#include "dialplan/errors.hpp"

namespace dialplan {

ChatRequest emotion_request(std::string_view utterance) {
  ChatRequest req;
  req.role_tag = RoleTag::Emotion;
  req.system_prompt =
      "You are an expert in recognizing emotions in conversation. Identify the emotion the "
      "speaker expresses in the utterance below. Reply with exactly one lowercase word and "
      "nothing else.";
  req.messages.push_back({MessageRole::User, "Utterance: " + std::string(utterance)});
  req.max_tokens = kEmotionMaxTokens;
  return req;
}

std::string parse_emotion_label(std::string_view reply) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < reply.size() && std::isspace(static_cast<unsigned char>(reply[pos]))) ++pos;
  };
  skip_space();
  constexpr std::string_view kPrefix = "emotion:";
  if (reply.size() - pos >= kPrefix.size()) {
    bool match = true;
    for (std::size_t i = 0; i < kPrefix.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(reply[pos + i])) != kPrefix[i]) {
        match = false;
        break;
      }
    }
    if (match) pos += kPrefix.size();
  }
  while (pos < reply.size() && !std::isalpha(static_cast<unsigned char>(reply[pos]))) ++pos;
  std::string label;
  while (pos < reply.size() && std::isalpha(static_cast<unsigned char>(reply[pos]))) {
    label += static_cast<char>(std::tolower(static_cast<unsigned char>(reply[pos])));
    ++pos;
  }
  if (label.empty()) throw EmptyLabel("no emotion word in reply: " + std::string(reply));
  return label;
}

std::string infer_emotion(std::string_view utterance, Gateway& gateway) {
  if (utterance.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw InvalidArgument("cannot infer emotion from an empty utterance");
  }
  return parse_emotion_label(gateway.complete(emotion_request(utterance)).text());
}

EmotionTrace accumulate(const EmotionTrace& trace, std::string label) {
  EmotionTrace next = trace;
  next.labels.push_back(std::move(label));
  return next;
}

EmotionTrace EmotionTracker::observe(const EmotionTrace& trace, std::string_view user_utterance,
                                     Gateway& gateway) const {
  if (!enabled_) return trace;
  std::string label;
  try {
    label = infer_emotion(user_utterance, gateway);
  } catch (const EmptyLabel&) {
    label = std::string(kNeutralEmotion);
  } catch (const InvalidArgument&) {
    label = std::string(kNeutralEmotion);
  }
  return accumulate(trace, std::move(label));
}

}  // namespace dialplan
