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

#include "tapreid/reid/query.h"

#include <algorithm>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace tapreid {
namespace {

std::int64_t DayKey(Date d) { return d.time_since_epoch().count(); }
std::int64_t TimeKey(Timestamp t) { return t.time_since_epoch().count(); }

bool KeyOrder(const auto& a, const auto& b) {
  return std::tie(a.key, a.card_index) < std::tie(b.key, b.card_index);
}

// Card indexes of entries with lo <= key <= hi, ascending and unique.
template <typename Entry>
std::vector<std::uint32_t> CardsInKeyRange(const std::vector<Entry>& entries,
                                           std::int64_t lo, std::int64_t hi) {
  auto first = std::lower_bound(entries.begin(), entries.end(), lo,
                                [](const Entry& e, std::int64_t k) { return e.key < k; });
  std::vector<std::uint32_t> out;
  for (auto it = first; it != entries.end() && it->key <= hi; ++it) {
    out.push_back(it->card_index);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

absl::Status ValidateAll(const std::vector<Constraint>& constraints) {
  for (size_t i = 0; i < constraints.size(); ++i) {
    if (absl::Status s = ValidateConstraint(constraints[i]); !s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("constraint ", i, ": ", s.message()));
    }
  }
  return absl::OkStatus();
}

}  // namespace

QueryEngine::QueryEngine(const EventStore& store) : store_(&store) {
  auto cards = store.cards();
  on_by_time_.reserve(store.event_count());
  for (std::uint32_t c = 0; c < cards.size(); ++c) {
    CardType last_type = -1;
    for (const TapEvent& e : cards[c].events) {
      on_by_date_[DayKey(DateOf(e.on_time))].push_back(
          {TimeOfDay(e.on_time).count(), c});
      on_by_time_.push_back({TimeKey(e.on_time), c});
      visits_by_stop_[e.on_stop_id].push_back({DayKey(DateOf(e.on_time)), c});
      if (e.off) {
        visits_by_stop_[e.off->stop_id].push_back({DayKey(DateOf(e.off->time)), c});
      }
      if (e.card_type != last_type) {
        std::vector<std::uint32_t>& list = cards_by_type_[e.card_type];
        if (list.empty() || list.back() != c) list.push_back(c);
        last_type = e.card_type;
      }
    }
  }
  // A card alternating between types can be appended out of order above.
  for (auto& [type, list] : cards_by_type_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  for (auto& [day, list] : on_by_date_) std::sort(list.begin(), list.end(), KeyOrder<DatedCard, DatedCard>);
  std::sort(on_by_time_.begin(), on_by_time_.end(), KeyOrder<DatedCard, DatedCard>);
  for (auto& [stop, list] : visits_by_stop_) {
    std::sort(list.begin(), list.end(), KeyOrder<DatedCard, DatedCard>);
  }
}

std::optional<std::vector<std::uint32_t>> QueryEngine::Lookup(
    const Constraint& c) const {
  if (const auto* x = std::get_if<TouchOnBetween>(&c)) {
    auto it = on_by_date_.find(DayKey(x->date));
    if (it == on_by_date_.end()) return std::vector<std::uint32_t>{};
    return CardsInKeyRange(it->second, x->lo.count(), x->hi.count());
  }
  if (const auto* x = std::get_if<TouchOnAt>(&c)) {
    return CardsInKeyRange(on_by_time_, TimeKey(x->time) - x->tolerance_seconds,
                           TimeKey(x->time) + x->tolerance_seconds);
  }
  if (const auto* x = std::get_if<VisitedStop>(&c)) {
    auto it = visits_by_stop_.find(x->stop_id);
    if (it == visits_by_stop_.end()) return std::vector<std::uint32_t>{};
    DateRange range = x->range.value_or(DateRange::All());
    return CardsInKeyRange(it->second, DayKey(range.first), DayKey(range.last));
  }
  if (const auto* x = std::get_if<CardTypeIs>(&c)) {
    auto it = cards_by_type_.find(x->type);
    if (it == cards_by_type_.end()) return std::vector<std::uint32_t>{};
    return it->second;
  }
  return std::nullopt;
}

absl::StatusOr<CandidateSet> QueryEngine::Evaluate(
    std::vector<Constraint> constraints) const {
  if (absl::Status s = ValidateAll(constraints); !s.ok()) return s;
  std::vector<std::vector<std::uint32_t>> lists;
  std::vector<const Constraint*> filters;
  for (const Constraint& c : constraints) {
    if (auto list = Lookup(c)) {
      lists.push_back(*std::move(list));
    } else {
      filters.push_back(&c);
    }
  }
  std::vector<std::uint32_t> current;
  if (lists.empty()) {
    current.resize(store_->card_count());
    std::iota(current.begin(), current.end(), 0u);
  } else {
    std::sort(lists.begin(), lists.end(),
              [](const auto& a, const auto& b) { return a.size() < b.size(); });
    current = std::move(lists[0]);
    std::vector<std::uint32_t> next;
    for (size_t i = 1; i < lists.size() && !current.empty(); ++i) {
      next.clear();
      std::set_intersection(current.begin(), current.end(), lists[i].begin(),
                            lists[i].end(), std::back_inserter(next));
      current.swap(next);
    }
  }
  CandidateSet out;
  out.store_fingerprint = store_->fingerprint();
  auto cards = store_->cards();
  for (std::uint32_t c : current) {
    bool ok = std::all_of(filters.begin(), filters.end(), [&](const Constraint* f) {
      return Satisfies(cards[c], *f);
    });
    if (ok) out.cards.push_back(cards[c].card_id);
  }
  out.constraints = std::move(constraints);
  return out;
}

absl::StatusOr<CandidateSet> QueryEngine::Refine(const CandidateSet& candidates,
                                                 const Constraint& extra) const {
  if (candidates.store_fingerprint != store_->fingerprint()) {
    return absl::FailedPreconditionError(
        "StoreMismatch: candidate set was produced from a different store");
  }
  if (absl::Status s = ValidateConstraint(extra); !s.ok()) return s;
  CandidateSet out;
  out.store_fingerprint = candidates.store_fingerprint;
  out.constraints = candidates.constraints;
  out.constraints.push_back(extra);
  for (CardId id : candidates.cards) {
    const CardEvents* card = store_->Find(id);
    if (card != nullptr && Satisfies(*card, extra)) out.cards.push_back(id);
  }
  return out;
}

absl::StatusOr<CandidateSet> EvaluateByScan(const EventStore& store,
                                            std::vector<Constraint> constraints) {
  if (absl::Status s = ValidateAll(constraints); !s.ok()) return s;
  CandidateSet out;
  out.store_fingerprint = store.fingerprint();
  for (const CardEvents& card : store.cards()) {
    bool ok = std::all_of(constraints.begin(), constraints.end(),
                          [&](const Constraint& c) { return Satisfies(card, c); });
    if (ok) out.cards.push_back(card.card_id);
  }
  out.constraints = std::move(constraints);
  return out;
}

absl::StatusOr<CardTimeline> GetCardTimeline(const EventStore& store, CardId card) {
  const CardEvents* found = store.Find(card);
  if (found == nullptr) {
    return absl::NotFoundError(absl::StrCat("UnknownCard: ", card));
  }
  return CardTimeline{card, ModalCardType(found->events), found->events,
                      FirstSeen(*found), LastSeen(*found)};
}

}  // namespace tapreid
