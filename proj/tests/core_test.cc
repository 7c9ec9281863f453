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

#include <chrono>
#include <cstdlib>

#include <gtest/gtest.h>
#include "tapreid/core/random.h"
#include "tapreid/core/signature.h"
#include "tapreid/core/time.h"
#include "tapreid/core/types.h"
#include "test_util.h"

namespace tapreid {
namespace {

using std::chrono::seconds;
using testing::Ts;

TEST(TruncateTimeTest, TableExamples) {
  Timestamp t = Ts("2016-05-03T08:51:36");
  EXPECT_EQ(TruncateTime(t, TimeGranularity::kExact), t);
  EXPECT_EQ(TruncateTime(t, TimeGranularity::kZeroSeconds),
            Ts("2016-05-03T08:51:00"));
  EXPECT_EQ(TruncateTime(t, TimeGranularity::kNearestFiveMinutes),
            Ts("2016-05-03T08:50:00"));
  EXPECT_EQ(TruncateTime(t, TimeGranularity::kZeroMinutes),
            Ts("2016-05-03T08:00:00"));
  EXPECT_EQ(TruncateTime(t, TimeGranularity::kZeroHour),
            Ts("2016-05-03T00:00:00"));
}

// Brute-force nearest lattice point: enumerate every five-minute mark from
// the start of the hour through the start of the next hour and take the
// closest one, preferring the later mark on a tie.
Timestamp NearestFiveByEnumeration(Timestamp t) {
  Timestamp hour = std::chrono::floor<std::chrono::hours>(t);
  Timestamp best = hour;
  for (int k = 0; k <= 12; ++k) {
    Timestamp mark = hour + seconds{300 * k};
    if (std::abs((mark - t).count()) <= std::abs((best - t).count())) {
      best = mark;
    }
  }
  return best;
}

TEST(TruncateTimeTest, NearestFiveMinutesMatchesEnumerationOverHour) {
  Timestamp start = Ts("2016-12-31T23:00:00");
  for (int s = 0; s < 3600; ++s) {
    Timestamp t = start + seconds{s};
    ASSERT_EQ(TruncateTime(t, TimeGranularity::kNearestFiveMinutes),
              NearestFiveByEnumeration(t))
        << FormatTimestamp(t);
  }
}

TEST(TruncateTimeTest, TieRoundsUpAcrossMidnight) {
  EXPECT_EQ(TruncateTime(Ts("2016-12-31T23:57:30"),
                         TimeGranularity::kNearestFiveMinutes),
            Ts("2017-01-01T00:00:00"));
  EXPECT_EQ(TruncateTime(Ts("2016-12-31T23:57:29"),
                         TimeGranularity::kNearestFiveMinutes),
            Ts("2016-12-31T23:55:00"));
}

TEST(TruncateTimeTest, IdempotentAndRefining) {
  Rng rng(17);
  const Timestamp base = Ts("2015-07-01T00:00:00");
  for (int i = 0; i < 20000; ++i) {
    Timestamp t1 = base + seconds{UniformBelow(rng, 3L * 365 * 86400)};
    // Half the pairs are close together so the implications get exercised.
    Timestamp t2 = Bernoulli(rng, 0.5)
                       ? t1 + seconds{UniformBelow(rng, 600)}
                       : base + seconds{UniformBelow(rng, 3L * 365 * 86400)};
    for (TimeGranularity g : kAllGranularities) {
      ASSERT_EQ(TruncateTime(TruncateTime(t1, g), g), TruncateTime(t1, g));
    }
    auto same = [&](TimeGranularity g) {
      return TruncateTime(t1, g) == TruncateTime(t2, g);
    };
    if (same(TimeGranularity::kZeroSeconds)) {
      EXPECT_TRUE(same(TimeGranularity::kZeroMinutes));
      // Rounding to the nearest five minutes splits minute :x2 at :x2:30, so
      // equal minutes only imply equal five-minute marks away from that tie.
      auto second_of_cycle = [](Timestamp t) {
        return TimeOfDay(t).count() % 300;
      };
      bool straddles_tie = (second_of_cycle(t1) < 150) !=
                           (second_of_cycle(t2) < 150);
      if (!straddles_tie) {
        EXPECT_TRUE(same(TimeGranularity::kNearestFiveMinutes));
      }
    }
    if (same(TimeGranularity::kZeroMinutes)) {
      EXPECT_TRUE(same(TimeGranularity::kZeroHour));
    }
    if (same(TimeGranularity::kExact)) {
      for (TimeGranularity g : kAllGranularities) EXPECT_TRUE(same(g));
    }
  }
}

TEST(TimeParsingTest, RoundTripsAndRejects) {
  EXPECT_EQ(FormatTimestamp(Ts("2016-05-03T06:53:22")), "2016-05-03T06:53:22");
  EXPECT_TRUE(ParseTimestamp("2016-05-03 06:53:22").ok());
  EXPECT_FALSE(ParseTimestamp("notadate").ok());
  EXPECT_FALSE(ParseTimestamp("2016-02-30T00:00:00").ok());
  EXPECT_FALSE(ParseTimestamp("2016-05-03T24:00:00").ok());
  EXPECT_FALSE(ParseDate("2016-5-3").ok());
  EXPECT_EQ(*ParseTimeOfDay("07:00"), seconds{7 * 3600});
}

TEST(GranularityTest, NamesRoundTrip) {
  for (TimeGranularity g : kAllGranularities) {
    EXPECT_EQ(*ParseGranularity(GranularityName(g)), g);
  }
  EXPECT_FALSE(ParseGranularity("weekly").ok());
}

TEST(SignatureTest, RosannaTouchOn) {
  TapEvent e = testing::Trip(11891903, "2016-05-03T06:53:22", 19936,
                             "2016-05-03T07:12:21", 19985, 51, 2);
  auto with = MakeSignature(e, Side::kTouchOn, TimeGranularity::kZeroSeconds,
                            true);
  ASSERT_TRUE(with.ok());
  EXPECT_EQ(with->truncated_time, Ts("2016-05-03T06:53:00"));
  ASSERT_TRUE(with->location.has_value());
  EXPECT_EQ(with->location->ToString(), "2:19936");

  auto without = MakeSignature(e, Side::kTouchOn,
                               TimeGranularity::kZeroSeconds, false);
  ASSERT_TRUE(without.ok());
  EXPECT_EQ(without->truncated_time, Ts("2016-05-03T06:53:00"));
  EXPECT_FALSE(without->location.has_value());

  auto off = MakeSignature(e, Side::kTouchOff, TimeGranularity::kExact, true);
  ASSERT_TRUE(off.ok());
  EXPECT_EQ(off->location->stop_id, 19985);
}

TEST(SignatureTest, MissingOffEvent) {
  TapEvent e = testing::OnEvent(7, "2017-01-01T10:00:00", 100);
  for (bool loc : {false, true}) {
    auto sig = MakeSignature(e, Side::kTouchOff, TimeGranularity::kExact, loc);
    EXPECT_EQ(sig.status().code(), absl::StatusCode::kFailedPrecondition);
    EXPECT_NE(sig.status().message().find("MissingOffEvent"), std::string::npos);
  }
}

TEST(SignatureTest, LocationEqualityImpliesTimeEquality) {
  Rng rng(5);
  for (int i = 0; i < 5000; ++i) {
    Tap a{Side::kTouchOn, Ts("2017-03-01T08:00:00") + seconds{UniformBelow(rng, 7200)},
          {2, static_cast<StopId>(UniformBelow(rng, 3))}};
    Tap b{Side::kTouchOn, Ts("2017-03-01T08:00:00") + seconds{UniformBelow(rng, 7200)},
          {2, static_cast<StopId>(UniformBelow(rng, 3))}};
    for (TimeGranularity g : kAllGranularities) {
      if (SignatureOf(a, g, true) == SignatureOf(b, g, true)) {
        EXPECT_EQ(SignatureOf(a, g, false), SignatureOf(b, g, false));
      }
    }
  }
}

TEST(LocationKeyTest, ParseAndFormat) {
  auto key = LocationKey::Parse("3:1024");
  ASSERT_TRUE(key.ok());
  EXPECT_EQ(key->mode, 3);
  EXPECT_EQ(key->stop_id, 1024);
  EXPECT_EQ(key->ToString(), "3:1024");
  EXPECT_FALSE(LocationKey::Parse("31024").ok());
}

TEST(SelectTapsTest, KindsAndPeriod) {
  std::vector<TapEvent> events = {
      testing::Trip(1, "2017-01-01T08:00:00", 1, "2017-01-01T08:20:00", 2),
      testing::OnEvent(1, "2017-01-02T08:00:00", 3)};
  EXPECT_EQ(SelectTaps(events, EventKind::kTouchOn).size(), 2u);
  EXPECT_EQ(SelectTaps(events, EventKind::kTouchOff).size(), 1u);
  auto both = SelectTaps(events, EventKind::kBoth);
  ASSERT_EQ(both.size(), 3u);
  EXPECT_EQ(both[1].side, Side::kTouchOff);
  DateRange first_day = DateRange::SingleDay(testing::Day("2017-01-01"));
  EXPECT_EQ(SelectTaps(events, EventKind::kBoth, first_day).size(), 2u);
}

TEST(RandomTest, MixSeedIsStableAndShuffleDeterministic) {
  EXPECT_EQ(MixSeed(7, 1), MixSeed(7, 1));
  EXPECT_NE(MixSeed(7, 1), MixSeed(7, 2));
  std::vector<int> a = {1, 2, 3, 4, 5, 6}, b = a;
  Rng r1(99), r2(99);
  Shuffle(std::span<int>(a), r1);
  Shuffle(std::span<int>(b), r2);
  EXPECT_EQ(a, b);
}

}  // namespace
}  // namespace tapreid
