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

#include "tapreid/cotravel/cotravel.h"

#include <algorithm>
#include <map>
#include <tuple>

#include "absl/strings/str_cat.h"

namespace tapreid {

std::vector<CoTravelPair> PairClosestFirst(std::vector<CandidatePair> pairs,
                                           CardId own_id, CardId other_id) {
  const bool own_low = own_id < other_id;
  auto key = [own_low](const CandidatePair& p) {
    auto gap = p.own_time > p.other_time ? p.own_time - p.other_time
                                         : p.other_time - p.own_time;
    Timestamp low = own_low ? p.own_time : p.other_time;
    Timestamp high = own_low ? p.other_time : p.own_time;
    return std::make_tuple(gap, p.stop_id, low, high);
  };
  std::sort(pairs.begin(), pairs.end(),
            [&](const CandidatePair& a, const CandidatePair& b) {
              auto ka = key(a), kb = key(b);
              if (ka != kb) return ka < kb;
              return std::tie(a.own_tap, a.other_tap) <
                     std::tie(b.own_tap, b.other_tap);
            });
  std::vector<std::uint32_t> used_own, used_other;
  std::vector<CoTravelPair> out;
  auto used = [](const std::vector<std::uint32_t>& v, std::uint32_t x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };
  for (const CandidatePair& p : pairs) {
    if (used(used_own, p.own_tap) || used(used_other, p.other_tap)) continue;
    used_own.push_back(p.own_tap);
    used_other.push_back(p.other_tap);
    out.push_back({p.own_time, p.other_time, p.stop_id});
  }
  std::sort(out.begin(), out.end(), [](const CoTravelPair& a, const CoTravelPair& b) {
    return std::tie(a.own_time, a.other_time, a.stop_id) <
           std::tie(b.own_time, b.other_time, b.stop_id);
  });
  return out;
}

CoTravelIndex::CoTravelIndex(const EventStore& store) : store_(&store) {
  entries_.reserve(store.event_count());
  auto cards = store.cards();
  for (size_t c = 0; c < cards.size(); ++c) {
    for (const TapEvent& e : cards[c].events) {
      entries_.push_back({e.on_stop_id, e.on_time, static_cast<std::uint32_t>(c)});
    }
  }
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.stop, a.time, a.card_index) <
           std::tie(b.stop, b.time, b.card_index);
  });
}

absl::StatusOr<std::vector<CoTravelMatch>> CoTravelIndex::CoTravellers(
    CardId card, int window_seconds, const DateRange& period) const {
  if (window_seconds < 0) {
    return absl::InvalidArgumentError("window must be >= 0 seconds");
  }
  auto subject_index = store_->IndexOf(card);
  if (!subject_index) {
    return absl::NotFoundError(absl::StrCat("UnknownCard: ", card));
  }
  const std::chrono::seconds window{window_seconds};
  const CardEvents& subject = store_->cards()[*subject_index];
  std::map<std::uint32_t, std::vector<CandidatePair>> by_card;
  for (size_t i = 0; i < subject.events.size(); ++i) {
    const TapEvent& e = subject.events[i];
    if (!period.Contains(e.on_time)) continue;
    auto lo = std::lower_bound(
        entries_.begin(), entries_.end(), std::make_pair(e.on_stop_id, e.on_time - window),
        [](const Entry& x, const std::pair<StopId, Timestamp>& k) {
          return std::tie(x.stop, x.time) < std::tie(k.first, k.second);
        });
    for (auto it = lo; it != entries_.end() && it->stop == e.on_stop_id &&
                       it->time <= e.on_time + window;
         ++it) {
      if (it->card_index == *subject_index || !period.Contains(it->time)) continue;
      by_card[it->card_index].push_back(
          {e.on_time, it->time, e.on_stop_id, static_cast<std::uint32_t>(i),
           static_cast<std::uint32_t>(it - entries_.begin())});
    }
  }
  std::vector<CoTravelMatch> out;
  for (auto& [other_index, candidates] : by_card) {
    const CardEvents& other = store_->cards()[other_index];
    CoTravelMatch m;
    m.other_card_id = other.card_id;
    m.other_card_type = ModalCardType(other.events);
    m.event_pairs = PairClosestFirst(std::move(candidates), card, other.card_id);
    m.occurrences = static_cast<int>(m.event_pairs.size());
    out.push_back(std::move(m));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CoTravelMatch& a, const CoTravelMatch& b) {
                     if (a.occurrences != b.occurrences) {
                       return a.occurrences > b.occurrences;
                     }
                     return a.other_card_id < b.other_card_id;
                   });
  return out;
}

absl::StatusOr<std::vector<CoTravelMatch>> CoTravellers(const EventStore& store,
                                                        CardId card,
                                                        int window_seconds,
                                                        const DateRange& period) {
  return CoTravelIndex(store).CoTravellers(card, window_seconds, period);
}

absl::StatusOr<std::vector<CoTravelMatch>> CoTravelOnDate(const EventStore& store,
                                                          CardId card, Date date,
                                                          int window_seconds) {
  return CoTravellers(store, card, window_seconds, DateRange::SingleDay(date));
}

std::vector<CoTravelMatch> ExcludeCardTypes(std::vector<CoTravelMatch> matches,
                                            const std::set<CardType>& types) {
  std::erase_if(matches, [&](const CoTravelMatch& m) {
    return types.contains(m.other_card_type);
  });
  return matches;
}

std::string CoTravelCsv(const std::vector<CoTravelMatch>& matches) {
  std::string out = "otherCardId,otherCardType,occurrences\n";
  for (const CoTravelMatch& m : matches) {
    absl::StrAppend(&out, m.other_card_id, ",", m.other_card_type, ",",
                    m.occurrences, "\n");
  }
  return out;
}

}  // namespace tapreid
