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

// Synthetic travel populations with the same schema as a real ticketing
// release, so every analysis can run without the original data.
//
// Archetypes:
//   commuter          weekday home->work and work->home on train/bus stops
//   touristOneWeek    2-4 random trips a day for one week
//   seasonPassHolder  tram pass activated with one touch-on per month
//   childConcession   school-day trips, any mode
//   parliamentarian   commuter pattern on ~60% of weekdays
//   policePass        shift-based commuting, any day of the week
//
// Stop s has mode 2 (train) when s % 3 == 1, 1 (bus) when s % 3 == 2 and
// 3 (tram) when s % 3 == 0. Tram trips omit the touch-off with probability
// `tram_no_touch_off_probability`.
//
// Each card k (0-based, in archetype order) draws from its own generator
// seeded with MixSeed(seed, k), so the result does not depend on the number
// of threads.

#ifndef TAPREID_INGEST_SYNTHETIC_H_
#define TAPREID_INGEST_SYNTHETIC_H_

#include <cstdint>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tapreid/core/time.h"
#include "tapreid/core/types.h"
#include "tapreid/ingest/event_store.h"

namespace tapreid {

inline constexpr ModeCode kBusMode = 1;
inline constexpr ModeCode kTrainMode = 2;
inline constexpr ModeCode kTramMode = 3;

inline constexpr CardType kFullFareType = 0;
inline constexpr CardType kSeasonPassType = 1;
inline constexpr CardType kChildConcessionType = 2;
inline constexpr CardType kFederalPoliceType = 46;
inline constexpr CardType kTransitPoliceType = 48;
inline constexpr CardType kFederalParliamentarianType = 50;
inline constexpr CardType kStateParliamentarianType = 51;
inline constexpr CardType kCommuterClubType = 65;

ModeCode ModeOfStop(StopId stop);
RouteId RouteOfStop(StopId stop);

struct ArchetypeCounts {
  int commuter = 0;
  int tourist_one_week = 0;
  int season_pass_holder = 0;
  int child_concession = 0;
  int parliamentarian = 0;
  // Alternates between type 46 and type 48, starting with 46.
  int police_pass = 0;

  int total() const {
    return commuter + tourist_one_week + season_pass_holder +
           child_concession + parliamentarian + police_pass;
  }
};

// Standard deviation, in seconds, of each archetype's departure time around
// its per-card base time.
struct JitterSeconds {
  double commuter = 240;
  double tourist = 0;  // tourists draw uniform times; kept for symmetry
  double season_pass = 1800;
  double child = 180;
  double parliamentarian = 600;
  double police = 300;
};

struct SyntheticPopulationConfig {
  std::uint64_t seed = 1;
  ArchetypeCounts counts;
  int stop_universe = 500;
  DateRange period{};
  JitterSeconds jitter;
  double tram_no_touch_off_probability = 0.8;
  CardId first_card_id = 1;

  // InvalidConfig: negative counts, fewer than 2 stops, empty period or a
  // probability outside [0, 1].
  absl::Status Validate() const;
};

absl::StatusOr<EventStore> GeneratePopulation(
    const SyntheticPopulationConfig& config, int threads = 1);

// JSON form used by `synth --config`:
//   {"seed": 42, "commuter": 10, "touristOneWeek": 0, "seasonPassHolder": 0,
//    "childConcession": 0, "parliamentarian": 0, "policePass": 0,
//    "stopUniverse": 500, "startDate": "2017-01-02", "endDate": "2017-02-10",
//    "tramNoTouchOffProbability": 0.8, "firstCardId": 1,
//    "jitter": {"commuter": 240, "seasonPass": 1800, ...}}
absl::StatusOr<SyntheticPopulationConfig> ParsePopulationConfig(
    std::string_view json_text);

}  // namespace tapreid

#endif  // TAPREID_INGEST_SYNTHETIC_H_
