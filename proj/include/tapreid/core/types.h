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

#ifndef TAPREID_CORE_TYPES_H_
#define TAPREID_CORE_TYPES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tapreid/core/time.h"

namespace tapreid {

// Pseudonymous card identifier as released; not the physical card number.
using CardId = std::uint64_t;
using CardType = int;
using StopId = std::int32_t;
using RouteId = std::int32_t;
using ModeCode = std::int32_t;

inline constexpr CardType kMaxCardType = 127;

enum class Side { kTouchOn, kTouchOff };

// Which sub-events of a TapEvent participate in an analysis.
enum class EventKind { kTouchOn, kTouchOff, kBoth };

std::string_view SideName(Side s);
std::string_view EventKindName(EventKind k);
// Accepts "on", "off", "both" (and the long forms touchOn/touchOff).
absl::StatusOr<EventKind> ParseEventKind(std::string_view name);

// The location half of an event signature. Rendered as "<mode>:<stopId>";
// the mode disambiguates stop ids that collide across transport modes.
struct LocationKey {
  ModeCode mode = 0;
  StopId stop_id = 0;

  std::string ToString() const;
  static absl::StatusOr<LocationKey> Parse(std::string_view text);

  friend bool operator==(const LocationKey&, const LocationKey&) = default;
  friend auto operator<=>(const LocationKey&, const LocationKey&) = default;
  template <typename H>
  friend H AbslHashValue(H h, const LocationKey& k) {
    return H::combine(std::move(h), k.mode, k.stop_id);
  }
};

// The touch-off half of a trip. Its fields are present or absent together.
struct OffSide {
  Timestamp time;
  ModeCode mode = 0;
  RouteId route_id = 0;
  StopId stop_id = 0;

  friend bool operator==(const OffSide&, const OffSide&) = default;
  friend auto operator<=>(const OffSide&, const OffSide&) = default;
};

// One released record: a touch-on and, when the passenger tapped off, the
// matching touch-off.
struct TapEvent {
  CardId card_id = 0;
  CardType card_type = 0;
  Timestamp on_time;
  ModeCode on_mode = 0;
  RouteId on_route_id = 0;
  StopId on_stop_id = 0;
  std::optional<OffSide> off;

  LocationKey on_location() const { return {on_mode, on_stop_id}; }

  friend bool operator==(const TapEvent&, const TapEvent&) = default;
  friend auto operator<=>(const TapEvent&, const TapEvent&) = default;
};

// Checks the record-level invariants: positive card id, card type in 0..127
// and off time not before on time.
absl::Status ValidateEvent(const TapEvent& event);

// A single touch (one side of a TapEvent) flattened for analysis.
struct Tap {
  Side side = Side::kTouchOn;
  Timestamp time;
  LocationKey location;

  friend bool operator==(const Tap&, const Tap&) = default;
};

// Enumerates the taps of `events` selected by `kind`, in event order and with
// the on-side before the off-side of the same event. Taps whose own date is
// outside `period` are dropped; events without a touch-off contribute nothing
// for kTouchOff and only their touch-on for kBoth.
std::vector<Tap> SelectTaps(std::span<const TapEvent> events, EventKind kind,
                            const DateRange& period = DateRange::All());

}  // namespace tapreid

#endif  // TAPREID_CORE_TYPES_H_
