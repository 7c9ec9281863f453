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

// The signature calendar: every event signature of a store mapped to the
// bin of cards that produced it, plus each card's list of references into
// those bins.
//
// Layout is flat. Bin members live in one array addressed by per-bin offsets
// (members of a bin are sorted by card id and deduplicated), and per-card bin
// references live in another array addressed by per-card offsets. A card that
// hits the same bin twice appears once in the members but holds two
// references.

#ifndef TAPREID_INDEX_CALENDAR_H_
#define TAPREID_INDEX_CALENDAR_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tapreid/core/signature.h"
#include "tapreid/core/time.h"
#include "tapreid/core/types.h"
#include "tapreid/ingest/event_store.h"

namespace tapreid {

using BinId = std::uint32_t;

class SignatureCalendar;

// Read-only view of one bin. Valid while the calendar lives.
class BinRef {
 public:
  BinRef(const SignatureCalendar* calendar, BinId id)
      : calendar_(calendar), id_(id) {}

  BinId id() const { return id_; }
  const EventSignature& signature() const;
  std::span<const CardId> members() const;
  // Number of signatures that landed here; >= members().size().
  std::uint32_t event_count() const;

  friend bool operator==(const BinRef& a, const BinRef& b) {
    return a.calendar_ == b.calendar_ && a.id_ == b.id_;
  }

 private:
  const SignatureCalendar* calendar_;
  BinId id_;
};

class SignatureCalendar {
 public:
  TimeGranularity granularity() const { return granularity_; }
  bool include_location() const { return include_location_; }
  EventKind kind() const { return kind_; }
  const DateRange& period() const { return period_; }

  size_t bin_count() const { return signatures_.size(); }
  size_t signature_count() const { return card_refs_.size(); }
  size_t card_count() const { return card_ids_.size(); }

  BinRef bin(BinId id) const { return BinRef(this, id); }
  std::optional<BinRef> Find(const EventSignature& signature) const;

  // Cards holding at least one signature, ascending.
  std::span<const CardId> cards() const { return card_ids_; }
  std::optional<size_t> CardIndex(CardId id) const;
  // Bin ids for the card at `card_index`, in per-card tap order.
  std::span<const BinId> CardBinIds(size_t card_index) const;

  absl::Status Save(std::ostream& out) const;
  static absl::StatusOr<SignatureCalendar> Load(std::istream& in);

  friend bool operator==(const SignatureCalendar& a,
                         const SignatureCalendar& b);

 private:
  friend class BinRef;
  friend SignatureCalendar BuildCalendar(const EventStore&, TimeGranularity,
                                         bool, EventKind, const DateRange&);
  void RebuildLookup();

  TimeGranularity granularity_ = TimeGranularity::kExact;
  bool include_location_ = false;
  EventKind kind_ = EventKind::kTouchOn;
  DateRange period_ = DateRange::All();

  std::vector<EventSignature> signatures_;
  std::vector<std::uint32_t> event_counts_;
  std::vector<std::uint64_t> member_offsets_;  // bin_count + 1
  std::vector<CardId> members_;
  std::vector<CardId> card_ids_;
  std::vector<std::uint64_t> card_offsets_;  // card_count + 1
  std::vector<BinId> card_refs_;
  absl::flat_hash_map<EventSignature, BinId> lookup_;
};

// One signature per selected tap (see SelectTaps); taps outside `period` are
// ignored.
SignatureCalendar BuildCalendar(const EventStore& store, TimeGranularity g,
                                bool include_location, EventKind kind,
                                const DateRange& period = DateRange::All());

// Members of the bin for `signature`; empty when there is no such bin. No
// normalization is applied, so a signature built with another granularity or
// location convention simply finds nothing.
std::vector<CardId> BinMembers(const SignatureCalendar& calendar,
                               const EventSignature& signature);

// Fails with NOT_FOUND (UnknownCard) when the card has no signature here.
absl::StatusOr<std::vector<BinRef>> CardBins(const SignatureCalendar& calendar,
                                             CardId card);

}  // namespace tapreid

#endif  // TAPREID_INDEX_CALENDAR_H_
