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

#include "tapreid/core/time.h"

#include <charconv>
#include <cstdint>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace tapreid {
namespace {

using std::chrono::days;
using std::chrono::floor;
using std::chrono::hours;
using std::chrono::minutes;
using std::chrono::seconds;

using FiveMinutes = std::chrono::duration<int64_t, std::ratio<300>>;
constexpr seconds kHalfFiveMinutes{150};

// Parses exactly `width` decimal digits.
bool ParseFixed(std::string_view text, size_t pos, size_t width, int& out) {
  if (pos + width > text.size()) return false;
  for (size_t i = pos; i < pos + width; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  auto [ptr, ec] =
      std::from_chars(text.data() + pos, text.data() + pos + width, out);
  return ec == std::errc() && ptr == text.data() + pos + width;
}

absl::Status BadTimestamp(std::string_view text) {
  return absl::InvalidArgumentError(
      absl::StrCat("unparseable timestamp '", std::string(text), "'"));
}

}  // namespace

DateRange DateRange::All() {
  using namespace std::chrono;
  return {sys_days{year{1} / January / 1}, sys_days{year{9999} / December / 31}};
}

bool DateRange::Contains(Timestamp t) const { return Contains(DateOf(t)); }

int DateRange::DayCount() const {
  if (empty()) return 0;
  return static_cast<int>((last - first).count()) + 1;
}

Timestamp TruncateTime(Timestamp t, TimeGranularity g) {
  switch (g) {
    case TimeGranularity::kExact:
      return t;
    case TimeGranularity::kZeroSeconds:
      return floor<minutes>(t);
    case TimeGranularity::kNearestFiveMinutes:
      // The epoch is hour-aligned and 300 divides 3600, so the epoch lattice
      // coincides with the per-hour lattice.
      return floor<FiveMinutes>(t + kHalfFiveMinutes);
    case TimeGranularity::kZeroMinutes:
      return floor<hours>(t);
    case TimeGranularity::kZeroHour:
      return floor<days>(t);
  }
  return t;
}

std::string_view GranularityName(TimeGranularity g) {
  switch (g) {
    case TimeGranularity::kExact:
      return "exact";
    case TimeGranularity::kZeroSeconds:
      return "zeroSeconds";
    case TimeGranularity::kNearestFiveMinutes:
      return "nearestFiveMinutes";
    case TimeGranularity::kZeroMinutes:
      return "zeroMinutes";
    case TimeGranularity::kZeroHour:
      return "zeroHour";
  }
  return "unknown";
}

absl::StatusOr<TimeGranularity> ParseGranularity(std::string_view name) {
  for (TimeGranularity g : kAllGranularities) {
    if (name == GranularityName(g)) return g;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown granularity '", std::string(name), "'"));
}

Date DateOf(Timestamp t) { return floor<days>(t); }

seconds TimeOfDay(Timestamp t) { return t - floor<days>(t); }

absl::StatusOr<Date> ParseDate(std::string_view text) {
  using namespace std::chrono;
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      !ParseFixed(text, 0, 4, y) || !ParseFixed(text, 5, 2, m) ||
      !ParseFixed(text, 8, 2, d)) {
    return absl::InvalidArgumentError(
        absl::StrCat("unparseable date '", std::string(text), "'"));
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    return absl::InvalidArgumentError(absl::StrCat("invalid date '", std::string(text), "'"));
  }
  return sys_days{ymd};
}

absl::StatusOr<seconds> ParseTimeOfDay(std::string_view text) {
  int h = 0, m = 0, s = 0;
  bool ok = text.size() >= 5 && text[2] == ':' && ParseFixed(text, 0, 2, h) &&
            ParseFixed(text, 3, 2, m);
  if (ok && text.size() == 8) {
    ok = text[5] == ':' && ParseFixed(text, 6, 2, s);
  } else if (text.size() != 5) {
    ok = false;
  }
  if (!ok || h > 23 || m > 59 || s > 59) {
    return absl::InvalidArgumentError(
        absl::StrCat("unparseable time of day '", std::string(text), "'"));
  }
  return hours{h} + minutes{m} + seconds{s};
}

absl::StatusOr<Timestamp> ParseTimestamp(std::string_view text) {
  if (text.size() != 19 || (text[10] != 'T' && text[10] != ' ')) {
    return BadTimestamp(text);
  }
  auto date = ParseDate(text.substr(0, 10));
  auto tod = ParseTimeOfDay(text.substr(11));
  if (!date.ok() || !tod.ok() || text.substr(11).size() != 8) {
    return BadTimestamp(text);
  }
  return Timestamp{*date} + *tod;
}

std::string FormatDate(Date d) {
  std::chrono::year_month_day ymd{d};
  return absl::StrFormat("%04d-%02u-%02u", static_cast<int>(ymd.year()),
                         static_cast<unsigned>(ymd.month()),
                         static_cast<unsigned>(ymd.day()));
}

std::string FormatTimeOfDay(seconds tod) {
  int64_t s = tod.count();
  return absl::StrFormat("%02d:%02d:%02d", s / 3600, (s / 60) % 60, s % 60);
}

std::string FormatTimestamp(Timestamp t) {
  return absl::StrCat(FormatDate(DateOf(t)), "T", FormatTimeOfDay(TimeOfDay(t)));
}

}  // namespace tapreid
