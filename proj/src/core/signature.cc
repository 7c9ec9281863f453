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

#include "tapreid/core/signature.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace tapreid {

std::string EventSignature::ToString() const {
  if (!location.has_value()) return FormatTimestamp(truncated_time);
  return absl::StrCat(FormatTimestamp(truncated_time), "@",
                      location->ToString());
}

EventSignature SignatureOf(const Tap& tap, TimeGranularity g,
                           bool include_location) {
  EventSignature sig{TruncateTime(tap.time, g), std::nullopt};
  if (include_location) sig.location = tap.location;
  return sig;
}

absl::StatusOr<EventSignature> MakeSignature(const TapEvent& event, Side side,
                                             TimeGranularity g,
                                             bool include_location) {
  if (side == Side::kTouchOn) {
    return SignatureOf({Side::kTouchOn, event.on_time, event.on_location()}, g,
                       include_location);
  }
  if (!event.off.has_value()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "MissingOffEvent: card ", event.card_id, " event at ",
        FormatTimestamp(event.on_time), " has no touch-off"));
  }
  const OffSide& off = *event.off;
  return SignatureOf({Side::kTouchOff, off.time, {off.mode, off.stop_id}}, g,
                     include_location);
}

}  // namespace tapreid
