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

// Dataset audits: runs of unused card ids, and the card-type census.

#ifndef TAPREID_REID_AUDIT_H_
#define TAPREID_REID_AUDIT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "tapreid/core/types.h"
#include "tapreid/ingest/event_store.h"

namespace tapreid {

// A maximal run of unused ids strictly between two used ids.
// missing_count = next_used_id - last_used_id - 1.
struct GapRecord {
  CardId last_used_id = 0;
  CardId next_used_id = 0;
  std::uint64_t missing_count = 0;

  friend bool operator==(const GapRecord&, const GapRecord&) = default;
};

// Gaps of at least `min_gap` missing ids, ascending. `used_ids` must be
// sorted ascending; duplicates are allowed. INVALID_ARGUMENT for min_gap < 1.
absl::StatusOr<std::vector<GapRecord>> IdGapScan(std::span<const CardId> used_ids,
                                                 std::uint64_t min_gap);
absl::StatusOr<std::vector<GapRecord>> IdGapScan(const EventStore& store,
                                                 std::uint64_t min_gap);

// lastUsedId,nextUsedId,missingCount
std::string GapCsv(const std::vector<GapRecord>& gaps);

inline constexpr std::int64_t kDefaultSensitiveThreshold = 1000;

struct CensusRow {
  CardType type = 0;
  // Cards whose modal event type is `type`.
  std::int64_t card_count = 0;
  // Events recorded with `type`, whatever the card's modal type.
  std::int64_t event_count = 0;
  // card_count below the sensitivity threshold.
  bool sensitive = false;

  friend bool operator==(const CensusRow&, const CensusRow&) = default;
};

// One row per type code seen on any event, ascending by code.
std::vector<CensusRow> CardTypeCensus(
    const EventStore& store,
    std::int64_t sensitive_threshold = kDefaultSensitiveThreshold);

// cardType,cardCount,eventCount,sensitive
std::string CensusCsv(const std::vector<CensusRow>& rows);

}  // namespace tapreid

#endif  // TAPREID_REID_AUDIT_H_
