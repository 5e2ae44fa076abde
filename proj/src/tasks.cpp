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

#include "dialplan/tasks.hpp"

#include <charconv>

#include "dialplan/errors.hpp"

namespace dialplan {

std::string_view to_string(Terminal t) {
  switch (t) {
    case Terminal::Ongoing: return "Ongoing";
    case Terminal::Completed: return "Completed";
    case Terminal::Failed: return "Failed";
  }
  return "?";
}

Terminal terminal_from_string(std::string_view name) {
  if (name == "Ongoing") return Terminal::Ongoing;
  if (name == "Completed") return Terminal::Completed;
  if (name == "Failed") return Terminal::Failed;
  throw InvalidArgument("unknown terminal status: " + std::string(name));
}

namespace {

ActionCatalog make_catalog(TaskId task,
                           std::vector<std::pair<std::string, std::string>> rows) {
  std::vector<Action> actions;
  int i = 1;
  for (auto& [name, prompt] : rows) actions.push_back({i++, std::move(name), std::move(prompt)});
  return ActionCatalog(task, std::move(actions));
}

ActionCatalog esconv_catalog() {
  return make_catalog(TaskId::ESConv, {
      {"Question", "Please ask the Patient to elaborate on the situation they just described."},
      {"Self-disclosure", "Please provide a statement relating to the Patient about the situation they just described."},
      {"Affirmation and Reassurance", "Please provide affirmation and reassurance to the Patient on the situation they just described."},
      {"Providing Suggestions", "Please provide suggestion to the Patient on the situation they just described."},
      {"Others", "Please chat with the Patient."},
      {"Reflection of feelings", "Please acknowledge the Patient's feelings about the situation they described."},
      {"Information", "Please provide factual information to help the Patient with their situation."},
      {"Restatement or Paraphrasing", "Please acknowledge the Patient's feelings by paraphrasing their situation."},
  });
}

ActionCatalog cima_catalog() {
  return make_catalog(TaskId::CIMA, {
      {"Hint", "Please provide knowledge to the Student via a hint."},
      {"Question", "Please ask a question to the Student to determine the Student's understanding or continue the conversation."},
      {"Correction", "Please correct the mistake or address the misconception the Student has."},
      {"Confirmation", "Please confirm the Student's answer or understanding is correct."},
      {"Others", "Please chat with the Student without any pedagogical strategy."},
  });
}

ActionCatalog cb_catalog() {
  return make_catalog(TaskId::CB, {
      {"greet", "Please say hello or chat randomly."},
      {"inquire", "Please ask any question about product, year, price, usage, etc."},
      {"inform", "Please provide information about the product, year, usage, etc."},
      {"propose", "Please initiate a price or a price range for the product."},
      {"counter", "Please propose a new price or a new price range."},
      {"counter-noprice", "Please propose a vague price by using comparatives with existing price."},
      {"confirm", "Please ask a question about the information to be confirmed."},
      {"affirm", "Please give an affirmative response to a confirm."},
      {"deny", "Please give a negative response to a confirm."},
      {"agree", "Please agree with the proposed price."},
      {"disagree", "Please disagree with the proposed price."},
  });
}

ActionCatalog extes_catalog() {
  return make_catalog(TaskId::ExTES, {
      {"Reflective Statements", "Please reflect back what the user has expressed to show you understand their thoughts or feelings."},
      {"Clarification", "Please ask a question to clarify what the user meant or provide more detail about what they said."},
      {"Emotional Validation", "Please acknowledge and validate the user's emotional experience in a caring way."},
      {"Empathetic Statements", "Please express empathy toward the user's situation to show that you genuinely care."},
      {"Affirmation", "Please affirm the user's efforts, strengths, or positive qualities."},
      {"Offer Hope", "Please offer a message of hope or optimism about the user's situation."},
      {"Avoid Judgment and Criticism", "Please respond in a supportive and neutral way without making any judgments."},
      {"Suggest Options", "Please suggest possible options or actions the user could consider."},
      {"Collaborative Planning", "Please invite the user to collaboratively make a plan or decision together."},
      {"Provide Different Perspectives", "Please help the user consider a different point of view or alternative way of thinking."},
      {"Reframe Negative Thoughts", "Please help the user reframe their negative thoughts into something more constructive."},
      {"Share Information", "Please provide factual or helpful information that is relevant to the user's situation."},
      {"Normalize Experiences", "Please reassure the user that their feelings or experiences are common and understandable."},
      {"Promote Self-Care Practices", "Please encourage the user to engage in healthy self-care activities."},
      {"Stress Management", "Please offer strategies or tips to help the user reduce or manage stress."},
      {"Others", "Please continue the conversation in a natural and supportive manner."},
  });
}

ActionCatalog p4g_catalog() {
  return make_catalog(TaskId::P4G, {
      {"Proposition of donation", "Please suggest that the persuadee make a donation to 'Save the Children'."},
      {"Proposition of amount to be donated", "Please propose a small donation amount (e.g., $1 or $2) that the persuadee could consider."},
      {"Proposition of confirmation of donation", "Please ask the persuadee to confirm if they are ready to make the donation."},
      {"Proposition of more donation", "Please suggest that the persuadee could consider donating a bit more if they are willing."},
      {"Experience affirmation", "Please affirm the persuadee's views or experiences to build rapport and trust."},
      {"Greeting", "Please start or continue the conversation with a polite and friendly greeting."},
      {"Ask for donation rejection purpose", "Please ask the persuadee why they might be hesitant or unwilling to donate."},
      {"Thank", "Please thank the persuadee for their time, attention, or for considering a donation."},
      {"Logical appeal", "Please use logical reasoning to explain why donating to 'Save the Children' is impactful and effective."},
      {"Emotion appeal", "Please appeal to the persuadee's emotions by highlighting the struggles of children in need."},
      {"Credibility appeal", "Please mention the credibility or reputation of 'Save the Children' to strengthen your argument."},
      {"Foot in the door", "Please start by asking for a very small commitment to increase the chance of later agreement."},
      {"Self-modeling", "Please share a statement like 'I also donated' to encourage the persuadee to do the same."},
      {"Donation information", "Please share factual information about how donations are used or how they help children."},
      {"Personal story", "Please share a short, emotional personal story about a child helped by the charity."},
      {"Source-related inquiry", "Please ask the persuadee where they usually get information about charities or donations."},
      {"Task-related inquiry", "Please ask the persuadee about their experiences or preferences related to charitable giving."},
      {"Personal-related inquiry", "Please ask a personal question that helps understand the persuadee's values or priorities."},
      {"Neutral inquiry", "Please ask a general question to keep the conversation going and learn more about the persuadee."},
  });
}

constexpr const char* kPolicyDirective =
    "Conversation so far: {conversation}\n"
    "\n"
    "Emotion History: {emotions}\n"
    "\n"
    "Options:\n"
    "{options}\n"
    "\n"
    "Choose the TOP {k} most suitable actions from the given options list. "
    "Reply ONLY in the given format: 1,2,4,5";

constexpr const char* kSupportPolicyInstruction =
    "You are a specialist in policy-planning for emotional support conversations. The following "
    "is a conversation between a therapist and a patient. The patient's emotion states throughout "
    "the conversation are also provided. Your task is to decide the most therapeutically helpful "
    "next action the therapist should do based on the patient's emotion history and the "
    "conversation flow. The therapist's goal is to help the patient feel emotionally understood, "
    "supported, and to make progress toward emotional resolution.";

constexpr const char* kTherapistInstruction =
    "You are role playing as a therapist in a counseling conversation with a patient. Your goal "
    "is to help the patient resolve their emotional issues and assist them in understanding and "
    "working through their challenges.";

constexpr const char* kTherapistDirective =
    "Conversation so far: {conversation}\n"
    "\n"
    "The patient just said: {last_utterance}.\n"
    "\n"
    "Please infer the patient's emotional state in one word (Example: Emotion: ...) followed by "
    "your response, which should be only one short and succint sentence (Response: ...).\n"
    "\n"
    "{action}";

constexpr const char* kPatientDirective =
    "Conversation so far: {conversation}\n"
    "\n"
    "The therapist just said: {last_utterance}.\n"
    "\n"
    "Express how you feel in a natural, emotional way. Please reply with only one short and "
    "succinct sentence.";

constexpr const char* kSupportCriticOptions =
    "Based on the conversation and emotional trajectory, please respond with ONE AND ONLY ONE of "
    "the following:\n"
    "\n"
    "- No, the patient feels worse.\n"
    "- No, the patient feels the same.\n"
    "- No, but the patient feels somewhat better.\n"
    "- Yes, the patient's emotional issues have been resolved.";

constexpr const char* kWorse = "No, the patient feels worse.";
constexpr const char* kSame = "No, the patient feels the same.";
constexpr const char* kBetter = "No, but the patient feels somewhat better.";
constexpr const char* kSolved = "Yes, the patient's emotional issues have been resolved.";

RolePrompts esconv_prompts() {
  RolePrompts p;
  p.policy_instruction = kSupportPolicyInstruction;
  p.policy_directive = kPolicyDirective;
  p.system_instruction = kTherapistInstruction;
  p.system_directive = kTherapistDirective;
  p.user_instruction =
      "You are role playing as a patient in a counseling conversation with a therapist. You are "
      "seeking help from the therapist, because you are dealing with emotional issues related to "
      "{emotion_type} regarding {problem_type}";
  p.user_directive = kPatientDirective;
  p.critic_instruction =
      "You are an expert in assessing counseling sessions between a patient and a therapist.\n"
      "Your task is to evaluate whether the conversation helped improve the patient's emotional "
      "state.\n"
      "The session concerns the emotion type {emotion_type} and the problem type {problem_type}.";
  p.critic_directive = std::string(
      "Conversation so far: {conversation}\n"
      "\n"
      "Emotion History: {emotions}.\n") + kSupportCriticOptions;
  return p;
}

RolePrompts extes_prompts() {
  RolePrompts p;
  p.policy_instruction = kSupportPolicyInstruction;
  p.policy_directive = kPolicyDirective;
  p.system_instruction = kTherapistInstruction;
  p.system_directive = kTherapistDirective;
  p.user_instruction =
      "You are role playing as a patient in a counseling conversation with a therapist. You are "
      "seeking help from the therapist, because you are dealing with emotional issues related to "
      "{problem_type}.";
  p.user_directive = kPatientDirective;
  p.critic_instruction =
      "You are an expert in assessing counseling sessions between a patient and a therapist. Your "
      "task is to evaluate whether the conversation helped improve the patient's emotional state. "
      "The session concerns the the problem of: {problem_type}.";
  p.critic_directive = std::string(
      "Conversation so far: {conversation}\n"
      "\n"
      "Emotion History: {emotions}.\n"
      "\n") + kSupportCriticOptions;
  return p;
}

RolePrompts cima_prompts() {
  RolePrompts p;
  p.policy_instruction =
      "You are a specialist in policy-planning for tutoring interactions between a teacher and a "
      "student. The following is a conversation between a teacher and a student. The student's "
      "emotional states throughout the conversation are also provided. Your task is to decide "
      "what the teacher should do next based on the student's progress, emotion history and flow "
      "of the conversation. The goal is to effectively guide the student towards correctly "
      "translating the target English sentence into Italian in a timely and effective manner.";
  p.policy_directive = kPolicyDirective;
  p.system_instruction =
      "You are role-playing as a teacher in a tutoring conversation.\n"
      "\n"
      "Your task is to guide the student to translate the English sentence {english_sentence} "
      "into Italian.\n"
      "\n"
      "Please do not tell the student the answer or ask the student about other exercises.\n"
      "\n"
      "{action}";
  p.system_directive =
      "Conversation so far: {conversation}\n"
      "\n"
      "The student just said: {last_utterance}.\n"
      "\n"
      "Based on the student's message, infer their emotional state in (e.g: Emotion: ...).\n"
      "Then give your reply as the teacher in one short and helpful sentence (e.g: Response: ...).\n"
      "\n"
      "{action}";
  p.user_instruction =
      "You are role-playing as a student who is learning Italian in a tutoring session. You do "
      "not know how to translate {english_sentence} into Italian.\n"
      "\n"
      "Your goal is to learn through interaction with the teacher. Respond naturally as a student "
      "would.";
  p.user_directive =
      "Conversation so far: {conversation}\n"
      "\n"
      "The teacher just said: {last_utterance}.\n"
      "\n"
      "Please reply as a student with only one short and natural sentence.\n"
      "\n"
      "If you're confused, it's okay to ask for clarification.";
  p.critic_instruction =
      "You are role-playing as an expert in evaluating tutoring conversations between a teacher "
      "and a student.\n"
      "\n"
      "The goal is to evaluate whether the student correctly translated the English sentence "
      "{english_sentence} into Italian.\n"
      "\n"
      "The emotion states of the student during the conversation were: {emotions}";
  p.critic_directive =
      "Conversation so far: {conversation}\n"
      "\n"
      "Please answer the following question strictly by choosing ONE AND ONLY ONE of the exact "
      "responses listed below.\n"
      "\n"
      "Did the student correctly translate the entire sentence {english_sentence} into Italian?\n"
      "Respond with one of the following options:\n"
      "- No, the Student made an incorrect translation.\n"
      "- No, the Student did not try to translate.\n"
      "- No, the Student only correctly translated a part of {english_sentence}.\n"
      "- Yes, the Student correctly translated the whole sentence of {english_sentence}.";
  return p;
}

RolePrompts cb_prompts() {
  RolePrompts p;
  p.policy_instruction =
      "You are a specialist in policy planning for negotiation between a buyer and a seller. The "
      "following is a conversation between a buyer and a seller. The seller's emotion states "
      "throughout the conversation are also provided. Your task is to decide what action the "
      "buyer should take next based on the seller's emotion history, the negotiation flow, and "
      "the conversation flow. The goal is to maximize the buyer's benefit.";
  p.policy_directive = kPolicyDirective;
  p.system_instruction =
      "You are role playing as a skilled buyer in a price bargaining game.\n"
      "You are trying to buy the {product} at your target price of {buyer_target_price}.\n"
      "Product description: {background}.\n"
      "\n"
      "Your goal is to negotiate effectively and get the lowest price without losing the deal.";
  p.system_directive =
      "Conversation so far: {conversation}\n"
      "\n"
      "The seller just said: {last_utterance}.\n"
      "First, infer the seller's emotional state in one word (Example: Emotion: ...).\n"
      "Then, respond as the buyer using ONE short and persuasive sentence (Response: ...).\n"
      "\n"
      "{action}";
  p.user_instruction =
      "You are role playing as a persuasive seller in a price bargaining game.\n"
      "\n"
      "You are trying to sell the {product} at your desired price of {seller_desired_price}.\n"
      "Product Description: {background}";
  p.user_directive =
      "Conversation so far: {conversation}\n"
      "\n"
      "The buyer just said: {last_utterance}.\n"
      "Respond as the seller in ONE short, persuasive sentence.";
  p.critic_instruction =
      "You are an expert in evaluating negotiations between a buyer and a seller.\n"
      "Your job is to determine if they have successfully reached a deal at the end of the "
      "conversation.\n"
      "The seller's emotional states throughout the conversation were: {emotions}";
  p.critic_directive =
      "Conversation so far: {conversation}\n"
      "\n"
      "Please determine whether the buyer and the seller have successfully reached a deal at the "
      "end of the conversation.\n"
      "\n"
      "If they have reached a deal, extract the final agreed price (as a number only) and reply "
      "with this exact format: They have reached a deal at [price].\n"
      "\n"
      "Otherwise, reply with: They have not reached a deal.";
  return p;
}

RolePrompts p4g_prompts() {
  RolePrompts p;
  p.policy_instruction =
      "You are a specialist in policy-planning for persuasive conversations. Your job is to "
      "select the best next steps the persuader should take to guide the persuadee toward making "
      "a donation to 'Save the Children'. Use the persuadee's emotional history and the "
      "conversation context to make your decision. Focus on choosing actions that are persuasive, "
      "emotionally appropriate, and therapeutic.";
  p.policy_directive = kPolicyDirective;
  p.system_instruction =
      "You are role playing as a persuader. Your goal is to persuade the persuadee to donate to a "
      "charity called 'Save the Children'. 'Save the Children' is head-quartered in London, and "
      "they work to fight poverty around the world, especially in developing countries and war "
      "zones. Small donations like $1 or $2 go a long way to help.";
  p.system_directive =
      "Conversation so far: {conversation}\n"
      "\n"
      "The persuadee just said: {last_utterance}.\n"
      "\n"
      "First, infer the persuadee's emotional state in one word (Example: Emotion: ...).\n"
      "\n"
      "Then, based on that emotional state, respond as the persuader using ONE short and "
      "persuasive sentence (Response: ...).\n"
      "\n"
      "{action}";
  p.user_instruction =
      "You are role playing as a persuadee in a persuasive conversation.\n"
      "A persuader is trying to convince you to donate to a charity called 'Save the Children'";
  p.user_directive =
      "Conversation so far: {conversation}\n"
      "\n"
      "The persuader just said: {last_utterance}.\n"
      "Respond as the persuadee in ONE short sentence.";
  p.critic_instruction =
      "You are an expert in evaluating persuasive conversations between a persuader and a "
      "persuadee.\n"
      "Your job is to determine if the persuader has successfully convinced the persuadee to "
      "donate to a charity called 'Save the Children'.\n"
      "The persuadee's emotional states throughout the conversation were: {emotions}";
  p.critic_directive =
      "Conversation so far: {conversation}\n"
      "\n"
      "Please evaluate the following conversation and strictly choose ONE of the exact responses "
      "listed below.\n"
      "\n"
      "Question: Has the persuadee has been successfully convinced to make a donation at the end "
      "of the conversation?\n"
      "\n"
      "Respond with one of the following options:\n"
      "- The persuadee has explicitly refused.\n"
      "- The persuadee remains neutral about donating.\n"
      "- The persuadee has a positive attitude towards donating but hasn't decided yet.\n"
      "- The persuadee has decided to donate.";
  return p;
}

}  // namespace

const ActionCatalog& builtin_catalog(TaskId task) {
  static const ActionCatalog esconv = esconv_catalog();
  static const ActionCatalog cima = cima_catalog();
  static const ActionCatalog cb = cb_catalog();
  static const ActionCatalog p4g = p4g_catalog();
  static const ActionCatalog extes = extes_catalog();
  switch (task) {
    case TaskId::ESConv: return esconv;
    case TaskId::CIMA: return cima;
    case TaskId::CB: return cb;
    case TaskId::P4G: return p4g;
    case TaskId::ExTES: return extes;
  }
  throw InvalidArgument("unknown task");
}

TaskProfile builtin_profile(TaskId task) {
  TaskProfile p;
  p.task = task;
  p.catalog = builtin_catalog(task);
  using T = Terminal;
  switch (task) {
    case TaskId::ESConv:
      p.noop_index = 5;  // Others
      p.verdict_map = {{kWorse, -1.0, T::Ongoing},
                       {kSame, -0.5, T::Ongoing},
                       {kBetter, 0.5, T::Ongoing},
                       {kSolved, 1.0, T::Completed}};
      p.prompts = esconv_prompts();
      break;
    case TaskId::ExTES:
      p.noop_index = 16;  // Others
      // No "better" option for this task; "same" is positive as published.
      p.verdict_map = {{kWorse, -1.0, T::Ongoing},
                       {kSame, 0.5, T::Ongoing},
                       {kSolved, 1.0, T::Completed}};
      p.prompts = extes_prompts();
      break;
    case TaskId::CIMA:
      p.noop_index = 5;  // Others
      p.verdict_map = {
          {"No, the Student made an incorrect translation.", -1.0, T::Ongoing},
          {"No, the Student did not try to translate.", -0.5, T::Ongoing},
          {"No, the Student only correctly translated a part of {english_sentence}.", 0.5,
           T::Ongoing},
          {"Yes, the Student correctly translated the whole sentence of {english_sentence}.", 1.0,
           T::Completed}};
      p.prompts = cima_prompts();
      break;
    case TaskId::CB:
      p.noop_index = 1;  // greet
      p.verdict_map = {{"They have not reached a deal.", 0.0, T::Ongoing},
                       {"They have reached a deal at [price]", 0.0, T::Completed, true}};
      p.prompts = cb_prompts();
      break;
    case TaskId::P4G:
      p.noop_index = 19;  // Neutral inquiry
      p.verdict_map = {
          {"The persuadee has explicitly refused.", -1.0, T::Ongoing},
          {"The persuadee remains neutral about donating.", -0.5, T::Ongoing},
          {"The persuadee has a positive attitude towards donating but hasn't decided yet.", 0.1,
           T::Ongoing},
          {"The persuadee has decided to donate.", 1.0, T::Completed}};
      p.prompts = p4g_prompts();
      break;
  }
  return p;
}

}  // namespace dialplan

namespace dialplan {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

TemplateVars case_vars(const DialogueState& state, Speaker last_from) {
  const CaseInfo& c = state.case_info;
  TemplateVars vars;
  vars["conversation"] = state.history.empty() ? std::string("(the conversation has not started yet)")
                                               : "\n" + render_history(state);
  vars["emotions"] = state.emotions.labels.empty() ? std::string("(none yet)")
                                                   : state.emotions.render();
  vars["background"] = c.background;
  vars["english_sentence"] = c.background;
  vars["emotion_type"] = c.text("emotion_type");
  vars["problem_type"] = c.text("problem_type");
  vars["product"] = c.text("product");
  for (const char* slot : {kListedPrice, kBuyerTargetPrice, kSellerDesiredPrice}) {
    auto it = c.numeric_slots.find(slot);
    vars[slot] = it == c.numeric_slots.end() ? std::string() : format_number(it->second);
  }
  std::string last = "(nothing yet)";
  for (auto it = state.history.rbegin(); it != state.history.rend(); ++it) {
    if (it->speaker == last_from) {
      last = it->text;
      break;
    }
  }
  vars["last_utterance"] = last;
  return vars;
}

}  // namespace dialplan
