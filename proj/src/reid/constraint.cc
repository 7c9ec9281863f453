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

#include "tapreid/reid/constraint.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace tapreid {
namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::chrono::seconds kDay{86400};

json ToJson(const Constraint& c) {
  json j;
  j["kind"] = std::string(ConstraintKind(c));
  std::visit(
      Overloaded{
          [&](const TouchOnBetween& x) {
            j["date"] = FormatDate(x.date);
            j["lo"] = FormatTimeOfDay(x.lo);
            j["hi"] = FormatTimeOfDay(x.hi);
          },
          [&](const TouchOnAt& x) {
            j["time"] = FormatTimestamp(x.time);
            j["toleranceSeconds"] = x.tolerance_seconds;
          },
          [&](const VisitedStop& x) {
            j["stopId"] = x.stop_id;
            if (x.range) {
              j["from"] = FormatDate(x.range->first);
              j["to"] = FormatDate(x.range->last);
            }
          },
          [&](const CardTypeIs& x) { j["type"] = x.type; },
          [&](const CardTypeIsNot& x) { j["type"] = x.type; },
          [&](const FirstSeenBefore& x) { j["date"] = FormatDate(x.date); },
          [&](const FirstSeenAfter& x) { j["date"] = FormatDate(x.date); },
          [&](const LastSeenBefore& x) { j["date"] = FormatDate(x.date); },
          [&](const LastSeenAfter& x) { j["date"] = FormatDate(x.date); },
          [&](const MinEventCount& x) { j["k"] = x.k; },
      },
      c);
  return j;
}

// Throws json exceptions for missing or mistyped fields; the caller converts
// them to INVALID_ARGUMENT.
absl::StatusOr<Constraint> FromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("constraint must be an object");
  const std::string kind = j.at("kind").get<std::string>();
  auto date = [&](const char* key) -> absl::StatusOr<Date> {
    return ParseDate(j.at(key).get<std::string>());
  };
  Constraint c;
  if (kind == "touchOnBetween") {
    auto d = date("date");
    auto lo = ParseTimeOfDay(j.at("lo").get<std::string>());
    auto hi = ParseTimeOfDay(j.at("hi").get<std::string>());
    if (!d.ok()) return d.status();
    if (!lo.ok()) return lo.status();
    if (!hi.ok()) return hi.status();
    c = TouchOnBetween{*d, *lo, *hi};
  } else if (kind == "touchOnAt") {
    auto t = ParseTimestamp(j.at("time").get<std::string>());
    if (!t.ok()) return t.status();
    c = TouchOnAt{*t, j.value("toleranceSeconds", 0)};
  } else if (kind == "visitedStop") {
    VisitedStop v{j.at("stopId").get<StopId>(), std::nullopt};
    if (j.contains("from") || j.contains("to")) {
      DateRange range = DateRange::All();
      if (j.contains("from")) {
        auto d = date("from");
        if (!d.ok()) return d.status();
        range.first = *d;
      }
      if (j.contains("to")) {
        auto d = date("to");
        if (!d.ok()) return d.status();
        range.last = *d;
      }
      v.range = range;
    }
    c = v;
  } else if (kind == "cardTypeIs") {
    c = CardTypeIs{j.at("type").get<CardType>()};
  } else if (kind == "cardTypeIsNot") {
    c = CardTypeIsNot{j.at("type").get<CardType>()};
  } else if (kind == "firstSeenBefore" || kind == "firstSeenAfter" ||
             kind == "lastSeenBefore" || kind == "lastSeenAfter") {
    auto d = date("date");
    if (!d.ok()) return d.status();
    if (kind == "firstSeenBefore") c = FirstSeenBefore{*d};
    if (kind == "firstSeenAfter") c = FirstSeenAfter{*d};
    if (kind == "lastSeenBefore") c = LastSeenBefore{*d};
    if (kind == "lastSeenAfter") c = LastSeenAfter{*d};
  } else if (kind == "minEventCount") {
    c = MinEventCount{j.at("k").get<int>()};
  } else {
    return absl::InvalidArgumentError(absl::StrCat("unknown constraint kind '", kind, "'"));
  }
  if (absl::Status s = ValidateConstraint(c); !s.ok()) return s;
  return c;
}

}  // namespace

absl::Status ValidateConstraint(const Constraint& c) {
  return std::visit(
      Overloaded{
          [](const TouchOnBetween& x) {
            if (x.lo < std::chrono::seconds{0} || x.hi >= kDay || x.lo > x.hi) {
              return absl::InvalidArgumentError(
                  "touchOnBetween needs 00:00:00 <= lo <= hi <= 23:59:59");
            }
            return absl::OkStatus();
          },
          [](const TouchOnAt& x) {
            if (x.tolerance_seconds < 0) {
              return absl::InvalidArgumentError("tolerance must be >= 0");
            }
            return absl::OkStatus();
          },
          [](const VisitedStop& x) {
            if (x.range && x.range->empty()) {
              return absl::InvalidArgumentError("visitedStop range is empty");
            }
            return absl::OkStatus();
          },
          [](const CardTypeIs& x) {
            if (x.type < 0 || x.type > kMaxCardType) {
              return absl::InvalidArgumentError("card type outside 0..127");
            }
            return absl::OkStatus();
          },
          [](const CardTypeIsNot& x) {
            if (x.type < 0 || x.type > kMaxCardType) {
              return absl::InvalidArgumentError("card type outside 0..127");
            }
            return absl::OkStatus();
          },
          [](const MinEventCount& x) {
            if (x.k < 0) return absl::InvalidArgumentError("k must be >= 0");
            return absl::OkStatus();
          },
          [](const auto&) { return absl::OkStatus(); },
      },
      c);
}

Timestamp FirstSeen(const CardEvents& card) {
  return card.events.front().on_time;
}

Timestamp LastSeen(const CardEvents& card) {
  Timestamp last = card.events.front().on_time;
  for (const TapEvent& e : card.events) {
    last = std::max(last, e.on_time);
    if (e.off) last = std::max(last, e.off->time);
  }
  return last;
}

bool Satisfies(const CardEvents& card, const Constraint& c) {
  if (card.events.empty()) return false;
  const auto& events = card.events;
  auto any = [&](auto pred) { return std::any_of(events.begin(), events.end(), pred); };
  return std::visit(
      Overloaded{
          [&](const TouchOnBetween& x) {
            return any([&](const TapEvent& e) {
              auto tod = TimeOfDay(e.on_time);
              return DateOf(e.on_time) == x.date && x.lo <= tod && tod <= x.hi;
            });
          },
          [&](const TouchOnAt& x) {
            std::chrono::seconds tol{x.tolerance_seconds};
            return any([&](const TapEvent& e) {
              return e.on_time >= x.time - tol && e.on_time <= x.time + tol;
            });
          },
          [&](const VisitedStop& x) {
            DateRange range = x.range.value_or(DateRange::All());
            return any([&](const TapEvent& e) {
              return (e.on_stop_id == x.stop_id && range.Contains(e.on_time)) ||
                     (e.off && e.off->stop_id == x.stop_id &&
                      range.Contains(e.off->time));
            });
          },
          [&](const CardTypeIs& x) {
            return any([&](const TapEvent& e) { return e.card_type == x.type; });
          },
          [&](const CardTypeIsNot& x) {
            return !any([&](const TapEvent& e) { return e.card_type == x.type; });
          },
          [&](const FirstSeenBefore& x) { return DateOf(FirstSeen(card)) < x.date; },
          [&](const FirstSeenAfter& x) { return DateOf(FirstSeen(card)) > x.date; },
          [&](const LastSeenBefore& x) { return DateOf(LastSeen(card)) < x.date; },
          [&](const LastSeenAfter& x) { return DateOf(LastSeen(card)) > x.date; },
          [&](const MinEventCount& x) {
            return events.size() >= static_cast<size_t>(x.k);
          },
      },
      c);
}

std::string_view ConstraintKind(const Constraint& c) {
  return std::visit(
      Overloaded{
          [](const TouchOnBetween&) { return std::string_view("touchOnBetween"); },
          [](const TouchOnAt&) { return std::string_view("touchOnAt"); },
          [](const VisitedStop&) { return std::string_view("visitedStop"); },
          [](const CardTypeIs&) { return std::string_view("cardTypeIs"); },
          [](const CardTypeIsNot&) { return std::string_view("cardTypeIsNot"); },
          [](const FirstSeenBefore&) { return std::string_view("firstSeenBefore"); },
          [](const FirstSeenAfter&) { return std::string_view("firstSeenAfter"); },
          [](const LastSeenBefore&) { return std::string_view("lastSeenBefore"); },
          [](const LastSeenAfter&) { return std::string_view("lastSeenAfter"); },
          [](const MinEventCount&) { return std::string_view("minEventCount"); },
      },
      c);
}

std::string ConstraintToJson(const Constraint& c) { return ToJson(c).dump(); }

std::string ConstraintsToJson(const std::vector<Constraint>& cs) {
  json arr = json::array();
  for (const Constraint& c : cs) arr.push_back(ToJson(c));
  return arr.dump();
}

absl::StatusOr<Constraint> ParseConstraint(std::string_view json_text) {
  try {
    return FromJson(json::parse(json_text));
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad constraint: ", e.what()));
  }
}

absl::StatusOr<std::vector<Constraint>> ParseConstraints(std::string_view json_text) {
  if (json_text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    return std::vector<Constraint>{};
  }
  try {
    json j = json::parse(json_text);
    if (j.is_object()) j = j.at("constraints");
    if (!j.is_array()) {
      return absl::InvalidArgumentError("constraints must be a JSON array");
    }
    std::vector<Constraint> out;
    for (size_t i = 0; i < j.size(); ++i) {
      auto c = FromJson(j[i]);
      if (!c.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat("constraint ", i, ": ", c.status().message()));
      }
      out.push_back(*std::move(c));
    }
    return out;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad constraints: ", e.what()));
  }
}

}  // namespace tapreid
