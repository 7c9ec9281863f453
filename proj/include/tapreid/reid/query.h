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

// Conjunctive constraint queries over a store, and card timelines.

#ifndef TAPREID_REID_QUERY_H_
#define TAPREID_REID_QUERY_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "tapreid/core/time.h"
#include "tapreid/core/types.h"
#include "tapreid/ingest/event_store.h"
#include "tapreid/reid/constraint.h"

namespace tapreid {

// A value snapshot: the cards matching `constraints` in the store whose
// fingerprint is recorded.
struct CandidateSet {
  std::vector<CardId> cards;  // ascending
  std::vector<Constraint> constraints;
  std::uint64_t store_fingerprint = 0;

  size_t size() const { return cards.size(); }
  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;
};

// Per-date, per-stop and per-type indexes over one store. Constraints that
// can be answered from an index produce candidate lists which are
// intersected smallest first; the rest are checked per remaining card.
class QueryEngine {
 public:
  // `store` must outlive the engine.
  explicit QueryEngine(const EventStore& store);

  const EventStore& store() const { return *store_; }

  // All cards satisfying every constraint; every card for an empty list.
  // INVALID_ARGUMENT if a constraint fails validation.
  absl::StatusOr<CandidateSet> Evaluate(std::vector<Constraint> constraints) const;

  // Evaluate(candidates.constraints + extra), computed by filtering the
  // candidates. FAILED_PRECONDITION (StoreMismatch) when `candidates` came
  // from another store.
  absl::StatusOr<CandidateSet> Refine(const CandidateSet& candidates,
                                      const Constraint& extra) const;

 private:
  // Card indexes matching an index-backed constraint, ascending; nullopt for
  // constraints that need a per-card check.
  std::optional<std::vector<std::uint32_t>> Lookup(const Constraint& c) const;

  struct DatedCard {
    std::int64_t key;  // seconds of day, or days since epoch
    std::uint32_t card_index;
  };

  const EventStore* store_;
  // Touch-ons per date, by time of day.
  absl::flat_hash_map<std::int64_t, std::vector<DatedCard>> on_by_date_;
  // All touch-ons by timestamp (key = seconds since epoch).
  std::vector<DatedCard> on_by_time_;
  // Touch-on and touch-off visits per stop, by date.
  absl::flat_hash_map<StopId, std::vector<DatedCard>> visits_by_stop_;
  // Cards having at least one event of a type.
  absl::flat_hash_map<CardType, std::vector<std::uint32_t>> cards_by_type_;
};

// Linear-scan evaluation using Satisfies() on every card; the reference the
// indexed engine must agree with.
absl::StatusOr<CandidateSet> EvaluateByScan(const EventStore& store,
                                            std::vector<Constraint> constraints);

struct CardTimeline {
  CardId card_id = 0;
  CardType card_type = 0;  // modal
  std::vector<TapEvent> events;  // ascending by onTime
  Timestamp first_seen;
  Timestamp last_seen;
};

// NOT_FOUND (UnknownCard) for an absent card.
absl::StatusOr<CardTimeline> GetCardTimeline(const EventStore& store, CardId card);

}  // namespace tapreid

#endif  // TAPREID_REID_QUERY_H_
