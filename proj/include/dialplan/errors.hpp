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

#include <stdexcept>
#include <string>

namespace dialplan {

// Base for every error raised by the library. Callers that only need to
// report failures can catch this; callers with a recovery path catch the
// specific subclass.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DIALPLAN_DEFINE_ERROR(Name)        \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

DIALPLAN_DEFINE_ERROR(InvalidArgument);
DIALPLAN_DEFINE_ERROR(IndexMismatch);
DIALPLAN_DEFINE_ERROR(TurnLimitReached);
DIALPLAN_DEFINE_ERROR(InvalidCase);

// Gateway and encoder services.
DIALPLAN_DEFINE_ERROR(TransportError);
DIALPLAN_DEFINE_ERROR(ProtocolError);
DIALPLAN_DEFINE_ERROR(BudgetExceeded);
DIALPLAN_DEFINE_ERROR(UnsupportedCapability);
DIALPLAN_DEFINE_ERROR(DimensionMismatch);

// Output parsing.
DIALPLAN_DEFINE_ERROR(UnparseableOutput);
DIALPLAN_DEFINE_ERROR(EmptyLabel);
DIALPLAN_DEFINE_ERROR(MalformedPrice);

// Learning.
DIALPLAN_DEFINE_ERROR(InsufficientData);
DIALPLAN_DEFINE_ERROR(NonFiniteLoss);

// Metrics and persistence.
DIALPLAN_DEFINE_ERROR(EmptyInput);
DIALPLAN_DEFINE_ERROR(WrongTask);
DIALPLAN_DEFINE_ERROR(IoError);
DIALPLAN_DEFINE_ERROR(FormatVersionMismatch);

#undef DIALPLAN_DEFINE_ERROR

}  // namespace dialplan
