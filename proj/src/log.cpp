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

#include "dialplan/log.hpp"

#include <iostream>
#include <mutex>

namespace dialplan {
namespace {

std::mutex& log_mutex() {
  static std::mutex mu;
  return mu;
}

LogSink& log_sink() {
  static LogSink sink;
  return sink;
}

}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard lock(log_mutex());
  log_sink() = std::move(sink);
}

void log_warning(std::string_view message) {
  std::lock_guard lock(log_mutex());
  if (log_sink()) {
    log_sink()(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace dialplan
