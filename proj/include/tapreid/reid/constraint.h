// Copyright 2026 The tapreid Authors
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

// Analyst constraints on a card's history, and their JSON grammar.
//
//   {"kind":"touchOnBetween","date":"2018-05-04","lo":"05:00:00","hi":"07:00:00"}
//   {"kind":"touchOnAt","time":"2016-05-03T06:53:22","toleranceSeconds":60}
//   {"kind":"visitedStop","stopId":19936,"from":"2016-05-01","to":"2016-05-31"}
//   {"kind":"cardTypeIs","type":51}
//   {"kind":"cardTypeIsNot","type":2}
//   {"kind":"firstSeenBefore","date":"2018-05-01"}   also firstSeenAfter,
//   {"kind":"lastSeenAfter","date":"2016-06-01"}     lastSeenBefore
//   {"kind":"minEventCount","k":3}
//
// A constraint list is either a JSON array of these objects or an object
// {"constraints":[...]}. Empty text means no constraints.

#ifndef TAPREID_REID_CONSTRAINT_H_
#define TAPREID_REID_CONSTRAINT_H_

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tapreid/core/time.h"
#include "tapreid/core/types.h"
#include "tapreid/ingest/event_store.h"

namespace tapreid {

// Some touch-on on `date` with time of day in [lo, hi].
struct TouchOnBetween {
  Date date;
  std::chrono::seconds lo{0};
  std::chrono::seconds hi{0};
  friend bool operator==(const TouchOnBetween&, const TouchOnBetween&) = default;
};

// Some touch-on within `tolerance` seconds of `time`.
struct TouchOnAt {
  Timestamp time;
  int tolerance_seconds = 0;
  friend bool operator==(const TouchOnAt&, const TouchOnAt&) = default;
};

// Some touch-on or touch-off at `stop_id`, dated inside `range` if given.
struct VisitedStop {
  StopId stop_id = 0;
  std::optional<DateRange> range;
  friend bool operator==(const VisitedStop&, const VisitedStop&) = default;
};

// Some event recorded with this type.
struct CardTypeIs {
  CardType type = 0;
  friend bool operator==(const CardTypeIs&, const CardTypeIs&) = default;
};

// No event recorded with this type.
struct CardTypeIsNot {
  CardType type = 0;
  friend bool operator==(const CardTypeIsNot&, const CardTypeIsNot&) = default;
};

// Compare the date of the card's first touch-on (firstSeen) or of its latest
// touch-on/touch-off (lastSeen) with `date`, strictly.
struct FirstSeenBefore {
  Date date;
  friend bool operator==(const FirstSeenBefore&, const FirstSeenBefore&) = default;
};
struct FirstSeenAfter {
  Date date;
  friend bool operator==(const FirstSeenAfter&, const FirstSeenAfter&) = default;
};
struct LastSeenBefore {
  Date date;
  friend bool operator==(const LastSeenBefore&, const LastSeenBefore&) = default;
};
struct LastSeenAfter {
  Date date;
  friend bool operator==(const LastSeenAfter&, const LastSeenAfter&) = default;
};

// At least k events.
struct MinEventCount {
  int k = 0;
  friend bool operator==(const MinEventCount&, const MinEventCount&) = default;
};

using Constraint =
    std::variant<TouchOnBetween, TouchOnAt, VisitedStop, CardTypeIs,
                 CardTypeIsNot, FirstSeenBefore, FirstSeenAfter,
                 LastSeenBefore, LastSeenAfter, MinEventCount>;

// INVALID_ARGUMENT for unordered time bounds, a time of day past 24:00, a
// negative tolerance, an empty stop date range or a negative k.
absl::Status ValidateConstraint(const Constraint& c);

// First touch-on, and latest touch-on or touch-off, of a non-empty card.
Timestamp FirstSeen(const CardEvents& card);
Timestamp LastSeen(const CardEvents& card);

// Whether `card` satisfies `c`. The per-card definition every index-backed
// evaluation must agree with.
bool Satisfies(const CardEvents& card, const Constraint& c);

// The "kind" string of the JSON form.
std::string_view ConstraintKind(const Constraint& c);

std::string ConstraintToJson(const Constraint& c);
std::string ConstraintsToJson(const std::vector<Constraint>& cs);
absl::StatusOr<Constraint> ParseConstraint(std::string_view json_text);
absl::StatusOr<std::vector<Constraint>> ParseConstraints(std::string_view json_text);

}  // namespace tapreid

#endif  // TAPREID_REID_CONSTRAINT_H_
