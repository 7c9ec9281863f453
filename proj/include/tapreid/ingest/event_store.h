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

#ifndef TAPREID_INGEST_EVENT_STORE_H_
#define TAPREID_INGEST_EVENT_STORE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tapreid/core/time.h"
#include "tapreid/core/types.h"

namespace tapreid {

struct CardEvents {
  CardId card_id = 0;
  // Ascending by on_time; never empty inside a built store.
  std::vector<TapEvent> events;

  friend bool operator==(const CardEvents&, const CardEvents&) = default;
};

// Strict weak order used for per-card sorting: on_time first, the remaining
// fields only break ties so that equal stores always serialize identically.
bool EventTimeOrder(const TapEvent& a, const TapEvent& b);

// All events grouped by card. Immutable once built; cards are ordered by id.
class EventStore {
 public:
  EventStore() = default;

  // Groups, sorts and counts. Events for the same card id are merged.
  static EventStore FromEvents(std::vector<TapEvent> events);
  static EventStore FromCards(std::vector<CardEvents> cards);

  std::span<const CardEvents> cards() const { return cards_; }
  const CardEvents* Find(CardId id) const;
  // Position of `id` in cards(), if present.
  std::optional<size_t> IndexOf(CardId id) const;

  size_t card_count() const { return cards_.size(); }
  size_t event_count() const { return event_count_; }
  bool empty() const { return cards_.empty(); }

  // Earliest on-date through latest on- or off-date. Empty for an empty store.
  std::optional<DateRange> date_range() const { return date_range_; }

  // Content hash; equal stores have equal fingerprints.
  std::uint64_t fingerprint() const { return fingerprint_; }

  // Copy of the store keeping only events whose touch-on falls in `period`.
  EventStore RestrictTo(const DateRange& period) const;

  friend bool operator==(const EventStore& a, const EventStore& b) {
    return a.cards_ == b.cards_;
  }

 private:
  void Finalize();

  std::vector<CardEvents> cards_;
  size_t event_count_ = 0;
  std::optional<DateRange> date_range_;
  std::uint64_t fingerprint_ = 0;
};

// Builds a store from an event stream (order irrelevant).
EventStore BuildStore(std::vector<TapEvent> events);

// Most frequent card type over `events`, ties going to the lowest code.
// Returns 0 for an empty span.
CardType ModalCardType(std::span<const TapEvent> events);

}  // namespace tapreid

#endif  // TAPREID_INGEST_EVENT_STORE_H_
