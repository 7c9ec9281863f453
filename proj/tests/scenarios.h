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

// Hand-built stores shared by unit and acceptance tests.

#ifndef TAPREID_TESTS_SCENARIOS_H_
#define TAPREID_TESTS_SCENARIOS_H_

#include <chrono>
#include <string>
#include <vector>

#include "absl/strings/str_format.h"
#include "tapreid/ingest/event_store.h"
#include "tapreid/reid/constraint.h"
#include "test_util.h"

namespace tapreid::testing {

// Seminar day: the subject and four others board together once at stop
// 19936. Two of the four are child concession cards, one is a season pass
// with a handful of events, one is an ordinary commuter. Around them are
// near misses (6-30 s away, or the right second at another stop) and the
// subject's routine travel on other days.
struct SeminarScenario {
  static constexpr CardId kSubject = 500;
  static constexpr CardId kCommuter = 501;
  static constexpr CardId kChildA = 502;
  static constexpr CardId kChildB = 503;
  static constexpr CardId kSeasonPass = 504;
  static constexpr StopId kStop = 19936;

  EventStore store;
  Date seminar_date = Day("2016-06-15");
  Date quiet_date = Day("2016-06-18");  // subject did not travel
  Date alone_date = Day("2016-06-14");  // subject travelled, nobody near
};

inline SeminarScenario MakeSeminarScenario() {
  SeminarScenario s;
  std::vector<TapEvent> events;
  auto at = [](std::string_view date, int hh, int mm, int ss) {
    return absl::StrFormat("%sT%02d:%02d:%02d", std::string(date), hh, mm, ss);
  };
  // Routine travel for the subject and the commuter on other weekdays, at
  // different stops and well apart in time.
  for (int d = 6; d <= 14; ++d) {
    std::string date = absl::StrFormat("2016-06-%02d", d);
    events.push_back(Trip(SeminarScenario::kSubject, at(date, 7, 40 + d % 3, 5), 1001,
                          at(date, 8, 10, 0), 1002, 0));
    events.push_back(Trip(SeminarScenario::kCommuter, at(date, 8, 20, 0), 2001,
                          at(date, 8, 50, 0), 2002, 65));
    events.push_back(OnEvent(SeminarScenario::kChildA, at(date, 8, 0, 30), 3001, 2));
    events.push_back(OnEvent(SeminarScenario::kChildB, at(date, 15, 30, 30), 3002, 2));
  }
  events.push_back(OnEvent(SeminarScenario::kSeasonPass, "2016-05-02T09:00:00", 4001, 1, 3));
  events.push_back(OnEvent(SeminarScenario::kSeasonPass, "2016-07-01T09:00:00", 4001, 1, 3));

  // The seminar boarding.
  const std::string day = "2016-06-15";
  events.push_back(OnEvent(SeminarScenario::kSubject, at(day, 17, 5, 0), SeminarScenario::kStop));
  events.push_back(OnEvent(SeminarScenario::kCommuter, at(day, 17, 5, 5), SeminarScenario::kStop, 65));
  events.push_back(OnEvent(SeminarScenario::kChildA, at(day, 17, 4, 56), SeminarScenario::kStop, 2));
  events.push_back(OnEvent(SeminarScenario::kChildB, at(day, 17, 5, 2), SeminarScenario::kStop, 2));
  events.push_back(OnEvent(SeminarScenario::kSeasonPass, at(day, 17, 4, 55), SeminarScenario::kStop, 1));
  // Near misses.
  for (int k = 0; k < 12; ++k) {
    int offset = (k % 2 ? 1 : -1) * (6 + 2 * k);
    Timestamp t = Ts(at(day, 17, 5, 0)) + std::chrono::seconds{offset};
    TapEvent e = OnEvent(600 + k, at(day, 17, 5, 0), SeminarScenario::kStop);
    e.on_time = t;
    events.push_back(e);
    events.push_back(OnEvent(700 + k, at(day, 17, 5, 0), 19937 + k));
  }
  // Alone on another day.
  events.push_back(OnEvent(SeminarScenario::kSubject, at("2016-06-14", 22, 31, 7), 5005));
  s.store = BuildStore(std::move(events));
  return s;
}

// Morning peak on 2018-05-04: 48 cards touch on between 07:00 and 08:00,
// the subject among them. Only the subject also touches on between 17:00
// and 18:00 that day; a dozen others travel home between 18:00 and 19:00.
struct NarrowingScenario {
  static constexpr CardId kSubject = 9000;
  EventStore store;
  Constraint busy_window = TouchOnBetween{Day("2018-05-04"), std::chrono::hours{7},
                                          std::chrono::hours{8}};
  Constraint second_trip = TouchOnBetween{Day("2018-05-04"), std::chrono::hours{17},
                                          std::chrono::hours{18}};
};

inline NarrowingScenario MakeNarrowingScenario() {
  NarrowingScenario s;
  std::vector<TapEvent> events;
  const Timestamp morning = Ts("2018-05-04T07:00:00");
  for (int k = 0; k < 48; ++k) {
    CardId id = k == 17 ? NarrowingScenario::kSubject : 9100 + k;
    TapEvent e = OnEvent(id, "2018-05-04T07:00:00", 10 + k % 6);
    e.on_time = morning + std::chrono::seconds{k * 71};
    events.push_back(e);
    if (id == NarrowingScenario::kSubject) {
      events.push_back(OnEvent(id, "2018-05-04T17:31:12", 12));
    } else if (k % 4 == 0) {
      TapEvent home = OnEvent(id, "2018-05-04T18:00:01", 10 + k % 6);
      home.on_time += std::chrono::seconds{k * 40};
      events.push_back(home);
    }
    // Some history on other days.
    events.push_back(OnEvent(id, "2018-05-03T08:30:00", 10 + k % 6));
  }
  // Cards travelling outside the window.
  for (int k = 0; k < 30; ++k) {
    TapEvent e = OnEvent(9500 + k, "2018-05-04T09:00:00", 10 + k % 6);
    e.on_time += std::chrono::minutes{k * 13};
    events.push_back(e);
  }
  s.store = BuildStore(std::move(events));
  return s;
}

// Two type-51 cards have visited stop 19936; three others have not, and
// plenty of ordinary cards have.
struct RosannaScenario {
  static constexpr StopId kRosanna = 19936;
  EventStore store;
};

inline RosannaScenario MakeRosannaScenario() {
  RosannaScenario s;
  std::vector<TapEvent> events;
  events.push_back(Trip(51001, "2016-05-03T06:53:22", RosannaScenario::kRosanna,
                        "2016-05-03T07:12:21", 19985, 51));
  events.push_back(Trip(51002, "2016-04-11T18:02:00", 19985,
                        "2016-04-11T18:20:40", RosannaScenario::kRosanna, 51));
  for (CardId id : {51003, 51004, 51005}) {
    events.push_back(Trip(id, "2016-05-03T08:00:00", 20001, "2016-05-03T08:30:00",
                          20002, 51));
  }
  for (CardId id = 1; id <= 40; ++id) {
    events.push_back(OnEvent(id, "2016-05-03T07:00:00", RosannaScenario::kRosanna));
  }
  s.store = BuildStore(std::move(events));
  return s;
}

// Constraints over the RandomStore date/stop/type universe.
inline Constraint RandomConstraint(Rng& rng) {
  using std::chrono::seconds;
  Date day = Day("2017-10-02") + std::chrono::days{UniformBelow(rng, 3)};
  switch (UniformBelow(rng, 10)) {
    case 0: {
      auto lo = seconds{7 * 3600 + 60 * UniformBelow(rng, 240)};
      return TouchOnBetween{day, lo, lo + seconds{60 * UniformBelow(rng, 120)}};
    }
    case 1:
      return TouchOnAt{Ts("2017-10-02T07:00:00") + std::chrono::days{UniformBelow(rng, 3)} +
                           seconds{UniformBelow(rng, 4 * 3600)},
                       static_cast<int>(UniformBelow(rng, 1800))};
    case 2: {
      VisitedStop v{1 + static_cast<StopId>(UniformBelow(rng, 3)), std::nullopt};
      if (Bernoulli(rng, 0.5)) v.range = DateRange{day, day + std::chrono::days{UniformBelow(rng, 2)}};
      return v;
    }
    case 3:
      return CardTypeIs{static_cast<CardType>(UniformBelow(rng, 3))};
    case 4:
      return CardTypeIsNot{static_cast<CardType>(UniformBelow(rng, 3))};
    case 5:
      return FirstSeenBefore{day};
    case 6:
      return FirstSeenAfter{day};
    case 7:
      return LastSeenBefore{day};
    case 8:
      return LastSeenAfter{day};
    default:
      return MinEventCount{static_cast<int>(UniformBelow(rng, 6))};
  }
}

}  // namespace tapreid::testing

#endif  // TAPREID_TESTS_SCENARIOS_H_
