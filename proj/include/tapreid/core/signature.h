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

#ifndef TAPREID_CORE_SIGNATURE_H_
#define TAPREID_CORE_SIGNATURE_H_

#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "tapreid/core/time.h"
#include "tapreid/core/types.h"

namespace tapreid {

// Binning key for an event: its time at some granularity plus, when the
// analysis includes location, the "<mode>:<stopId>" location.
struct EventSignature {
  Timestamp truncated_time;
  std::optional<LocationKey> location;

  // "2016-05-03T06:53:00@2:19936", or just the timestamp without location.
  std::string ToString() const;

  friend bool operator==(const EventSignature&, const EventSignature&) = default;
  friend auto operator<=>(const EventSignature&, const EventSignature&) = default;
  template <typename H>
  friend H AbslHashValue(H h, const EventSignature& s) {
    h = H::combine(std::move(h), s.truncated_time.time_since_epoch().count(),
                   s.location.has_value());
    if (s.location) h = H::combine(std::move(h), *s.location);
    return h;
  }
};

EventSignature SignatureOf(const Tap& tap, TimeGranularity g,
                           bool include_location);

// Signature of one side of `event`. Fails with FAILED_PRECONDITION
// (MissingOffEvent) when asked for the touch-off of an event without one.
absl::StatusOr<EventSignature> MakeSignature(const TapEvent& event, Side side,
                                             TimeGranularity g,
                                             bool include_location);

}  // namespace tapreid

#endif  // TAPREID_CORE_SIGNATURE_H_
