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

#include "tapreid/reid/audit.h"

#include <array>

#include "absl/strings/str_cat.h"

namespace tapreid {

absl::StatusOr<std::vector<GapRecord>> IdGapScan(std::span<const CardId> used_ids,
                                                 std::uint64_t min_gap) {
  if (min_gap < 1) return absl::InvalidArgumentError("minGap must be >= 1");
  std::vector<GapRecord> gaps;
  for (size_t i = 1; i < used_ids.size(); ++i) {
    CardId last = used_ids[i - 1];
    CardId next = used_ids[i];
    if (next < last) return absl::InvalidArgumentError("ids must be sorted");
    if (next - last > min_gap) gaps.push_back({last, next, next - last - 1});
  }
  return gaps;
}

absl::StatusOr<std::vector<GapRecord>> IdGapScan(const EventStore& store,
                                                 std::uint64_t min_gap) {
  std::vector<CardId> ids;
  ids.reserve(store.card_count());
  for (const CardEvents& card : store.cards()) ids.push_back(card.card_id);
  return IdGapScan(ids, min_gap);
}

std::string GapCsv(const std::vector<GapRecord>& gaps) {
  std::string out = "lastUsedId,nextUsedId,missingCount\n";
  for (const GapRecord& g : gaps) {
    absl::StrAppend(&out, g.last_used_id, ",", g.next_used_id, ",",
                    g.missing_count, "\n");
  }
  return out;
}

std::vector<CensusRow> CardTypeCensus(const EventStore& store,
                                      std::int64_t sensitive_threshold) {
  std::array<std::int64_t, kMaxCardType + 1> cards{}, events{};
  std::array<bool, kMaxCardType + 1> seen{};
  for (const CardEvents& card : store.cards()) {
    ++cards[ModalCardType(card.events)];
    for (const TapEvent& e : card.events) {
      ++events[e.card_type];
      seen[e.card_type] = true;
    }
  }
  std::vector<CensusRow> rows;
  for (CardType t = 0; t <= kMaxCardType; ++t) {
    if (!seen[t]) continue;
    rows.push_back({t, cards[t], events[t], cards[t] < sensitive_threshold});
  }
  return rows;
}

std::string CensusCsv(const std::vector<CensusRow>& rows) {
  std::string out = "cardType,cardCount,eventCount,sensitive\n";
  for (const CensusRow& r : rows) {
    absl::StrAppend(&out, r.type, ",", r.card_count, ",", r.event_count, ",",
                    r.sensitive ? "true" : "false", "\n");
  }
  return out;
}

}  // namespace tapreid
