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

#include "tapreid/ingest/event_store.h"

#include <algorithm>
#include <array>
#include <tuple>
#include <utility>

#include "tapreid/core/random.h"

namespace tapreid {
namespace {

auto SortKey(const TapEvent& e) {
  return std::tie(e.on_time, e.card_type, e.on_mode, e.on_route_id,
                  e.on_stop_id, e.off);
}

std::uint64_t Fold(std::uint64_t h, std::uint64_t v) {
  return Avalanche64(h ^ v);
}

}  // namespace

bool EventTimeOrder(const TapEvent& a, const TapEvent& b) {
  return SortKey(a) < SortKey(b);
}

EventStore EventStore::FromEvents(std::vector<TapEvent> events) {
  std::sort(events.begin(), events.end(),
            [](const TapEvent& a, const TapEvent& b) {
              if (a.card_id != b.card_id) return a.card_id < b.card_id;
              return EventTimeOrder(a, b);
            });
  EventStore store;
  for (size_t i = 0; i < events.size();) {
    size_t j = i;
    while (j < events.size() && events[j].card_id == events[i].card_id) ++j;
    CardEvents card{events[i].card_id, {}};
    card.events.assign(std::make_move_iterator(events.begin() + i),
                       std::make_move_iterator(events.begin() + j));
    store.cards_.push_back(std::move(card));
    i = j;
  }
  store.Finalize();
  return store;
}

EventStore EventStore::FromCards(std::vector<CardEvents> cards) {
  std::stable_sort(cards.begin(), cards.end(),
                   [](const CardEvents& a, const CardEvents& b) {
                     return a.card_id < b.card_id;
                   });
  EventStore store;
  for (CardEvents& card : cards) {
    if (card.events.empty()) continue;
    for (TapEvent& e : card.events) e.card_id = card.card_id;
    if (!store.cards_.empty() && store.cards_.back().card_id == card.card_id) {
      auto& dst = store.cards_.back().events;
      dst.insert(dst.end(), std::make_move_iterator(card.events.begin()),
                 std::make_move_iterator(card.events.end()));
    } else {
      store.cards_.push_back(std::move(card));
    }
  }
  for (CardEvents& card : store.cards_) {
    if (!std::is_sorted(card.events.begin(), card.events.end(),
                        EventTimeOrder)) {
      std::sort(card.events.begin(), card.events.end(), EventTimeOrder);
    }
  }
  store.Finalize();
  return store;
}

void EventStore::Finalize() {
  event_count_ = 0;
  date_range_.reset();
  std::uint64_t h = 0x7461707265696400ULL;
  for (const CardEvents& card : cards_) {
    event_count_ += card.events.size();
    h = Fold(h, card.card_id);
    for (const TapEvent& e : card.events) {
      Date first = DateOf(e.on_time);
      Date last = e.off ? DateOf(e.off->time) : first;
      if (!date_range_) {
        date_range_ = DateRange{first, last};
      } else {
        date_range_->first = std::min(date_range_->first, first);
        date_range_->last = std::max(date_range_->last, last);
      }
      h = Fold(h, static_cast<std::uint64_t>(e.on_time.time_since_epoch().count()));
      h = Fold(h, (static_cast<std::uint64_t>(e.card_type) << 40) ^
                      (static_cast<std::uint64_t>(e.on_mode) << 32) ^
                      static_cast<std::uint32_t>(e.on_stop_id));
      h = Fold(h, static_cast<std::uint32_t>(e.on_route_id));
      if (e.off) {
        h = Fold(h, static_cast<std::uint64_t>(
                        e.off->time.time_since_epoch().count()));
        h = Fold(h, (static_cast<std::uint64_t>(e.off->mode) << 32) ^
                        static_cast<std::uint32_t>(e.off->stop_id));
        h = Fold(h, static_cast<std::uint32_t>(e.off->route_id));
      }
    }
  }
  fingerprint_ = h;
}

const CardEvents* EventStore::Find(CardId id) const {
  auto index = IndexOf(id);
  return index ? &cards_[*index] : nullptr;
}

std::optional<size_t> EventStore::IndexOf(CardId id) const {
  auto it = std::lower_bound(
      cards_.begin(), cards_.end(), id,
      [](const CardEvents& c, CardId v) { return c.card_id < v; });
  if (it == cards_.end() || it->card_id != id) return std::nullopt;
  return static_cast<size_t>(it - cards_.begin());
}

EventStore EventStore::RestrictTo(const DateRange& period) const {
  EventStore out;
  for (const CardEvents& card : cards_) {
    CardEvents kept{card.card_id, {}};
    for (const TapEvent& e : card.events) {
      if (period.Contains(e.on_time)) kept.events.push_back(e);
    }
    if (!kept.events.empty()) out.cards_.push_back(std::move(kept));
  }
  out.Finalize();
  return out;
}

EventStore BuildStore(std::vector<TapEvent> events) {
  return EventStore::FromEvents(std::move(events));
}

CardType ModalCardType(std::span<const TapEvent> events) {
  std::array<int, kMaxCardType + 1> counts{};
  for (const TapEvent& e : events) {
    if (e.card_type >= 0 && e.card_type <= kMaxCardType) ++counts[e.card_type];
  }
  return static_cast<CardType>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace tapreid
