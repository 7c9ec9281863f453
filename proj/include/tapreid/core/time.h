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

#ifndef TAPREID_CORE_TIME_H_
#define TAPREID_CORE_TIME_H_

#include <array>
#include <chrono>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace tapreid {

// Timestamps are naive local wall-clock time as recorded by the ticketing
// system. No timezone arithmetic is ever applied; the sys_clock epoch is only
// used as a convenient civil-calendar origin.
using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

// Inclusive range of calendar days.
struct DateRange {
  Date first;
  Date last;

  static DateRange All();
  static DateRange SingleDay(Date d) { return {d, d}; }

  bool empty() const { return last < first; }
  bool Contains(Date d) const { return first <= d && d <= last; }
  bool Contains(Timestamp t) const;
  int DayCount() const;

  friend bool operator==(const DateRange&, const DateRange&) = default;
};

// Ordered from finest to coarsest.
enum class TimeGranularity {
  kExact = 0,
  kZeroSeconds = 1,
  kNearestFiveMinutes = 2,
  kZeroMinutes = 3,
  kZeroHour = 4,
};

inline constexpr std::array<TimeGranularity, 5> kAllGranularities = {
    TimeGranularity::kExact, TimeGranularity::kZeroSeconds,
    TimeGranularity::kNearestFiveMinutes, TimeGranularity::kZeroMinutes,
    TimeGranularity::kZeroHour};

// Larger is coarser.
inline int Coarseness(TimeGranularity g) { return static_cast<int>(g); }

// True when TruncateTime(t, coarse) is a function of TruncateTime(t, fine),
// so equal fine values always give equal coarse values. Holds along
// Exact < ZeroSeconds < ZeroMinutes < ZeroHour and from Exact to
// NearestFiveMinutes; rounding to the nearest five minutes crosses minute and
// hour boundaries, so it neither refines nor is refined by the other three.
inline bool Refines(TimeGranularity fine, TimeGranularity coarse) {
  if (fine == coarse || fine == TimeGranularity::kExact) return true;
  if (fine == TimeGranularity::kNearestFiveMinutes ||
      coarse == TimeGranularity::kNearestFiveMinutes) {
    return false;
  }
  return Coarseness(fine) < Coarseness(coarse);
}

// Maps `t` onto the lattice of granularity `g`. NearestFiveMinutes rounds to
// the closest multiple of five minutes past the hour; an offset of exactly
// 2m30s rounds up. Total and idempotent.
Timestamp TruncateTime(Timestamp t, TimeGranularity g);

// Names are the ones used on the command line and in report files:
// exact, zeroSeconds, nearestFiveMinutes, zeroMinutes, zeroHour.
std::string_view GranularityName(TimeGranularity g);
absl::StatusOr<TimeGranularity> ParseGranularity(std::string_view name);

Date DateOf(Timestamp t);
std::chrono::seconds TimeOfDay(Timestamp t);

// YYYY-MM-DDTHH:MM:SS. A single space is accepted in place of the 'T'.
absl::StatusOr<Timestamp> ParseTimestamp(std::string_view text);
// YYYY-MM-DD
absl::StatusOr<Date> ParseDate(std::string_view text);
// HH:MM:SS (or HH:MM), 00:00:00 through 23:59:59.
absl::StatusOr<std::chrono::seconds> ParseTimeOfDay(std::string_view text);

std::string FormatTimestamp(Timestamp t);
std::string FormatDate(Date d);
std::string FormatTimeOfDay(std::chrono::seconds tod);

}  // namespace tapreid

#endif  // TAPREID_CORE_TIME_H_
