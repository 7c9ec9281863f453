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

// Sampled-set uniqueness ("unicity") of cards.
//
// Every card's selected taps are permuted once per run, with a generator
// seeded by MixSeed(seed, cardId). For a set cardinality n the card's sample
// is the first min(n, available) taps of that permutation, so samples are
// nested across n and identical across granularities and location flags.
// A sample is unique when no other card has a tap in every one of the
// sample's bins.

#ifndef TAPREID_UNICITY_UNICITY_H_
#define TAPREID_UNICITY_UNICITY_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tapreid/core/time.h"
#include "tapreid/core/types.h"
#include "tapreid/index/calendar.h"
#include "tapreid/ingest/event_store.h"

namespace tapreid {

struct UnicityParams {
  std::vector<TimeGranularity> granularities;
  std::vector<bool> location_flags;
  std::vector<int> cardinalities;  // ascending, each >= 1
  EventKind kind = EventKind::kTouchOn;
  std::uint64_t seed = 0;
  DateRange period = DateRange::All();
  // Cards with fewer selected taps than this are left out of every row.
  int min_sub_events = 1;
  // When set, a row for cardinality n only considers cards with >= n taps.
  bool exclude_short = false;
  int threads = 1;

  absl::Status Validate() const;
};

struct UnicityRow {
  TimeGranularity granularity = TimeGranularity::kExact;
  bool location = false;
  int n = 1;
  std::int64_t cards_considered = 0;
  std::int64_t cards_unique = 0;

  double percent_unique() const {
    return cards_considered == 0
               ? 0.0
               : 100.0 * static_cast<double>(cards_unique) /
                     static_cast<double>(cards_considered);
  }
  friend bool operator==(const UnicityRow&, const UnicityRow&) = default;
};

struct UnicityReport {
  std::vector<UnicityRow> rows;

  const UnicityRow* Find(TimeGranularity g, bool location, int n) const;
  // granularity,location,n,cardsConsidered,cardsUnique,percentUnique
  std::string ToCsv() const;

  friend bool operator==(const UnicityReport&, const UnicityReport&) = default;
};

// The first min(n, taps.size()) entries of a uniformly random permutation of
// `taps`, deterministic in `card_seed`.
std::vector<Tap> SampleFirstN(std::span<const Tap> taps, int n,
                              std::uint64_t card_seed);

// True iff no card other than `self` is a member of every bin. Duplicate bin
// references count once. FAILED_PRECONDITION (SelfNotInBins) when `bins` is
// empty or `self` is missing from one of them.
absl::StatusOr<bool> IsUnique(std::span<const BinRef> bins, CardId self);

// A card's fixed permutation prefix, as positions into the card's
// SelectTaps(events, kind, period) sequence.
struct CardSample {
  CardId card_id = 0;
  size_t available = 0;
  std::vector<std::uint32_t> order;  // length min(max_n, available)

  friend bool operator==(const CardSample&, const CardSample&) = default;
};

// One entry per card with at least one selected tap, ascending by card id.
std::vector<CardSample> DrawSamples(const EventStore& store, EventKind kind,
                                    std::uint64_t seed, int max_n,
                                    const DateRange& period);

// Uniqueness of the first n positions of each sample against `calendar`,
// which must be built with the samples' kind and period. Result is aligned
// with `samples`.
std::vector<bool> UniqueFlags(const SignatureCalendar& calendar,
                              std::span<const CardSample> samples, int n,
                              int threads = 1);

// Independent check without a calendar: card c is unique iff no other card's
// full signature set (taps in `period`) contains every signature of c's
// sampled taps. Refuses stores above kBruteForceEventLimit (StoreTooLarge).
inline constexpr size_t kBruteForceEventLimit = 10000;
absl::StatusOr<std::map<CardId, bool>> BruteForceUnicity(
    const EventStore& store, const std::map<CardId, std::vector<Tap>>& sampled,
    TimeGranularity g, bool include_location, EventKind kind,
    const DateRange& period = DateRange::All());

// The sampled taps for each card at cardinality n; convenient for feeding
// BruteForceUnicity from the same samples RunUnicity uses.
std::map<CardId, std::vector<Tap>> SampledTaps(
    const EventStore& store, std::span<const CardSample> samples, int n,
    EventKind kind, const DateRange& period);

UnicityReport RunUnicity(const EventStore& store, const UnicityParams& params);

}  // namespace tapreid

#endif  // TAPREID_UNICITY_UNICITY_H_
