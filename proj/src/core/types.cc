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

#include "tapreid/core/types.h"

#include <charconv>

#include "absl/strings/str_cat.h"

namespace tapreid {

std::string_view SideName(Side s) {
  return s == Side::kTouchOn ? "on" : "off";
}

std::string_view EventKindName(EventKind k) {
  switch (k) {
    case EventKind::kTouchOn:
      return "on";
    case EventKind::kTouchOff:
      return "off";
    case EventKind::kBoth:
      return "both";
  }
  return "unknown";
}

absl::StatusOr<EventKind> ParseEventKind(std::string_view name) {
  if (name == "on" || name == "touchOn") return EventKind::kTouchOn;
  if (name == "off" || name == "touchOff") return EventKind::kTouchOff;
  if (name == "both") return EventKind::kBoth;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown event kind '", std::string(name), "'"));
}

std::string LocationKey::ToString() const {
  return absl::StrCat(mode, ":", stop_id);
}

absl::StatusOr<LocationKey> LocationKey::Parse(std::string_view text) {
  size_t colon = text.find(':');
  LocationKey key;
  if (colon == std::string_view::npos) {
    return absl::InvalidArgumentError(
        absl::StrCat("location key '", std::string(text), "' is not <mode>:<stopId>"));
  }
  auto mode = std::from_chars(text.data(), text.data() + colon, key.mode);
  auto stop = std::from_chars(text.data() + colon + 1, text.data() + text.size(),
                              key.stop_id);
  if (mode.ec != std::errc() || mode.ptr != text.data() + colon ||
      stop.ec != std::errc() || stop.ptr != text.data() + text.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("location key '", std::string(text), "' is not <mode>:<stopId>"));
  }
  return key;
}

absl::Status ValidateEvent(const TapEvent& event) {
  if (event.card_id == 0) {
    return absl::InvalidArgumentError("cardId must be positive");
  }
  if (event.card_type < 0 || event.card_type > kMaxCardType) {
    return absl::InvalidArgumentError(
        absl::StrCat("cardType ", event.card_type, " outside 0..127"));
  }
  if (event.off.has_value() && event.off->time < event.on_time) {
    return absl::InvalidArgumentError("offDate precedes onDate");
  }
  return absl::OkStatus();
}

std::vector<Tap> SelectTaps(std::span<const TapEvent> events, EventKind kind,
                            const DateRange& period) {
  std::vector<Tap> taps;
  taps.reserve(kind == EventKind::kBoth ? events.size() * 2 : events.size());
  for (const TapEvent& e : events) {
    if (kind != EventKind::kTouchOff && period.Contains(e.on_time)) {
      taps.push_back({Side::kTouchOn, e.on_time, e.on_location()});
    }
    if (kind != EventKind::kTouchOn && e.off.has_value() &&
        period.Contains(e.off->time)) {
      taps.push_back(
          {Side::kTouchOff, e.off->time, {e.off->mode, e.off->stop_id}});
    }
  }
  return taps;
}

}  // namespace tapreid
