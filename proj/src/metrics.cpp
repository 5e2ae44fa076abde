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

#include "dialplan/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include <nlohmann/json.hpp>

#include "dialplan/errors.hpp"

namespace dialplan {

EpisodeSummary summarize(const EpisodeResult& r) {
  return {r.episode, r.case_id, r.outcome, r.turns, r.deal_price, r.sl};
}

std::vector<EpisodeSummary> summarize(const std::vector<EpisodeResult>& results) {
  std::vector<EpisodeSummary> out;
  out.reserve(results.size());
  for (const EpisodeResult& r : results) out.push_back(summarize(r));
  return out;
}

std::vector<EpisodeSummary> summarize_records(const std::vector<TurnRecord>& records,
                                              TaskId task) {
  std::vector<EpisodeSummary> out;
  std::map<std::size_t, std::size_t> slot;
  for (const TurnRecord& r : records) {
    auto [it, fresh] = slot.emplace(r.episode, out.size());
    if (fresh) {
      out.emplace_back();
      out.back().episode = r.episode;
      out.back().case_id = r.case_id;
    }
    EpisodeSummary& s = out[it->second];
    s.turns = std::max(s.turns, r.turn);
    s.outcome = r.status == Terminal::Completed ? Terminal::Completed : Terminal::Failed;
    s.deal_price = r.deal_price;
  }
  for (EpisodeSummary& s : out) {
    if (s.outcome != Terminal::Completed) s.deal_price.reset();
  }
  if (task == TaskId::CB) {
    // The terminal record's reward is the episode's ratio.
    std::map<std::size_t, double> last_reward;
    for (const TurnRecord& r : records) last_reward[r.episode] = r.reward;
    for (EpisodeSummary& s : out) {
      s.sl = s.outcome == Terminal::Completed ? last_reward[s.episode] : 0.0;
    }
  }
  return out;
}

double compute_at(const std::vector<EpisodeSummary>& results, AtOptions options) {
  if (results.empty()) throw EmptyInput("compute_at needs at least one episode");
  double sum = 0.0;
  std::size_t n = 0;
  for (const EpisodeSummary& r : results) {
    if (r.outcome == Terminal::Completed) {
      sum += static_cast<double>(r.turns);
      ++n;
    } else if (options.count_failures) {
      sum += static_cast<double>(options.max_turns);
      ++n;
    }
  }
  if (n == 0) return static_cast<double>(options.max_turns);
  return sum / static_cast<double>(n);
}

double compute_sr(const std::vector<EpisodeSummary>& results) {
  if (results.empty()) throw EmptyInput("compute_sr needs at least one episode");
  std::size_t done = 0;
  for (const EpisodeSummary& r : results) done += r.outcome == Terminal::Completed ? 1 : 0;
  return static_cast<double>(done) / static_cast<double>(results.size());
}

double compute_sl(const std::vector<EpisodeSummary>& results, TaskId task) {
  if (task != TaskId::CB) throw WrongTask("SL is defined for the bargaining task only");
  if (results.empty()) throw EmptyInput("compute_sl needs at least one episode");
  double sum = 0.0;
  for (const EpisodeSummary& r : results) {
    if (r.outcome == Terminal::Completed) sum += r.sl.value_or(0.0);
  }
  return sum / static_cast<double>(results.size());
}

MetricsReport make_report(const std::vector<EpisodeSummary>& results, TaskId task,
                          AtOptions options) {
  MetricsReport m;
  m.at = compute_at(results, options);
  m.sr = compute_sr(results);
  if (task == TaskId::CB) m.sl_avg = compute_sl(results, task);
  m.n_episodes = results.size();
  return m;
}

std::string to_json(const MetricsReport& m, TaskId task) {
  nlohmann::ordered_json j;
  j["task"] = std::string(to_string(task));
  j["n_episodes"] = m.n_episodes;
  j["at"] = m.at;
  j["sr"] = m.sr;
  j["sl_avg"] = m.sl_avg ? nlohmann::ordered_json(*m.sl_avg) : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    MetricsReport m;
    m.n_episodes = j.at("n_episodes").get<std::size_t>();
    m.at = j.at("at").get<double>();
    m.sr = j.at("sr").get<double>();
    if (!j.at("sl_avg").is_null()) m.sl_avg = j.at("sl_avg").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad metrics file: ") + e.what());
  }
}

std::string render_table(const MetricsReport& m, TaskId task) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-8s %10s %8s %8s\n", "task", "episodes", "AT", "SR");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-8s %10zu %8.4f %8.4f\n", std::string(to_string(task)).c_str(),
                m.n_episodes, m.at, m.sr);
  out += buf;
  if (m.sl_avg) {
    std::snprintf(buf, sizeof buf, "SL (avg) %.4f\n", *m.sl_avg);
    out += buf;
  }
  return out;
}

}  // namespace dialplan
