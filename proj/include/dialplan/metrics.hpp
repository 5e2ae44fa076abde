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
#include <optional>
#include <string>
#include <vector>

#include "dialplan/environment.hpp"

namespace dialplan {

/// What the metrics need from one episode.
struct EpisodeSummary {
  std::size_t episode = 0;
  std::string case_id;
  Terminal outcome = Terminal::Failed;
  std::size_t turns = 0;
  std::optional<double> deal_price;
  std::optional<double> sl;  // CB only

  bool operator==(const EpisodeSummary&) const = default;
};

EpisodeSummary summarize(const EpisodeResult& result);
std::vector<EpisodeSummary> summarize(const std::vector<EpisodeResult>& results);

// Rebuilds summaries from a transcript log, grouped by episode id in order
// of first appearance. An episode succeeded when its last record is
// Completed; the CB ratio is that record's reward.
std::vector<EpisodeSummary> summarize_records(const std::vector<TurnRecord>& records, TaskId task);

struct AtOptions {
  // true: failed episodes count at max_turns. false: the mean runs over
  // completed episodes only, and is max_turns when none completed.
  bool count_failures = true;
  std::size_t max_turns = 8;
};

double compute_at(const std::vector<EpisodeSummary>& results, AtOptions options = {});
double compute_sr(const std::vector<EpisodeSummary>& results);
// Mean sale-to-list ratio with failed negotiations at 0. Throws WrongTask
// for tasks other than CB.
double compute_sl(const std::vector<EpisodeSummary>& results, TaskId task);

struct MetricsReport {
  double at = 0.0;
  double sr = 0.0;
  std::optional<double> sl_avg;
  std::size_t n_episodes = 0;

  bool operator==(const MetricsReport&) const = default;
};

MetricsReport make_report(const std::vector<EpisodeSummary>& results, TaskId task,
                          AtOptions options = {});

std::string to_json(const MetricsReport& report, TaskId task);
MetricsReport report_from_json(const std::string& text);
std::string render_table(const MetricsReport& report, TaskId task);

}  // namespace dialplan
