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

// Co-travellers: cards touching on at the same stop as the subject within a
// time window (inclusive, default 5 seconds).
//
// Taps of the subject and one other card are paired one-to-one, closest in
// time first. Candidate pairs are ranked by (|dt|, stop, time of the lower
// card id's tap, time of the higher card id's tap), which does not depend on
// which card is the subject, so occurrence counts are symmetric.

#ifndef TAPREID_COTRAVEL_COTRAVEL_H_
#define TAPREID_COTRAVEL_COTRAVEL_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "tapreid/core/time.h"
#include "tapreid/core/types.h"
#include "tapreid/ingest/event_store.h"

namespace tapreid {

inline constexpr int kDefaultCoTravelWindowSeconds = 5;

struct CoTravelPair {
  Timestamp own_time;
  Timestamp other_time;
  StopId stop_id = 0;

  friend bool operator==(const CoTravelPair&, const CoTravelPair&) = default;
};

struct CoTravelMatch {
  CardId other_card_id = 0;
  CardType other_card_type = 0;  // modal type of the other card
  int occurrences = 0;
  std::vector<CoTravelPair> event_pairs;  // ascending by own_time

  friend bool operator==(const CoTravelMatch&, const CoTravelMatch&) = default;
};

// Touch-ons of a whole store sorted by (stop, time), for repeated queries.
class CoTravelIndex {
 public:
  // `store` must outlive the index.
  explicit CoTravelIndex(const EventStore& store);

  // Sorted by occurrences descending, then other card id ascending. Both taps
  // of a pair must fall on dates inside `period`.
  // NOT_FOUND (UnknownCard) for an absent card; INVALID_ARGUMENT for a
  // negative window.
  absl::StatusOr<std::vector<CoTravelMatch>> CoTravellers(
      CardId card, int window_seconds = kDefaultCoTravelWindowSeconds,
      const DateRange& period = DateRange::All()) const;

 private:
  struct Entry {
    StopId stop;
    Timestamp time;
    std::uint32_t card_index;
  };

  const EventStore* store_;
  std::vector<Entry> entries_;
};

absl::StatusOr<std::vector<CoTravelMatch>> CoTravellers(
    const EventStore& store, CardId card,
    int window_seconds = kDefaultCoTravelWindowSeconds,
    const DateRange& period = DateRange::All());

absl::StatusOr<std::vector<CoTravelMatch>> CoTravelOnDate(
    const EventStore& store, CardId card, Date date,
    int window_seconds = kDefaultCoTravelWindowSeconds);

// Drops matches whose other card has one of `types`.
std::vector<CoTravelMatch> ExcludeCardTypes(std::vector<CoTravelMatch> matches,
                                            const std::set<CardType>& types);

// otherCardId,otherCardType,occurrences
std::string CoTravelCsv(const std::vector<CoTravelMatch>& matches);

// Greedy one-to-one pairing of the subject's taps with one other card's taps,
// given every candidate pair within the window. Exposed so that alternative
// candidate generators (such as a quadratic scan) share the pairing rule.
struct CandidatePair {
  Timestamp own_time;
  Timestamp other_time;
  StopId stop_id = 0;
  std::uint32_t own_tap = 0;    // distinct per subject tap
  std::uint32_t other_tap = 0;  // distinct per other-card tap
};
std::vector<CoTravelPair> PairClosestFirst(std::vector<CandidatePair> pairs,
                                           CardId own_id, CardId other_id);

}  // namespace tapreid

#endif  // TAPREID_COTRAVEL_COTRAVEL_H_
