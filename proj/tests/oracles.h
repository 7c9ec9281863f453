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

// Independent reference implementations used as test oracles.

#ifndef TAPREID_TESTS_ORACLES_H_
#define TAPREID_TESTS_ORACLES_H_

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "tapreid/cotravel/cotravel.h"
#include "tapreid/ingest/event_store.h"
#include "tapreid/reid/constraint.h"

namespace tapreid::testing {

// Quadratic scan over every (subject tap, other tap) pair.
inline std::vector<CoTravelMatch> BruteCoTravellers(const EventStore& store,
                                                    CardId card, int window,
                                                    const DateRange& period) {
  const CardEvents* subject = store.Find(card);
  std::vector<CoTravelMatch> out;
  for (const CardEvents& other : store.cards()) {
    if (other.card_id == card) continue;
    std::vector<CandidatePair> candidates;
    for (size_t i = 0; i < subject->events.size(); ++i) {
      for (size_t j = 0; j < other.events.size(); ++j) {
        const TapEvent& a = subject->events[i];
        const TapEvent& b = other.events[j];
        auto gap = std::chrono::abs(a.on_time - b.on_time);
        if (a.on_stop_id == b.on_stop_id && gap.count() <= window &&
            period.Contains(a.on_time) && period.Contains(b.on_time)) {
          candidates.push_back({a.on_time, b.on_time, a.on_stop_id,
                                static_cast<std::uint32_t>(i),
                                static_cast<std::uint32_t>(j)});
        }
      }
    }
    if (candidates.empty()) continue;
    CoTravelMatch m{other.card_id, ModalCardType(other.events), 0,
                    PairClosestFirst(candidates, card, other.card_id)};
    m.occurrences = static_cast<int>(m.event_pairs.size());
    out.push_back(m);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.occurrences > b.occurrences;
  });
  return out;
}

inline std::map<CardId, int> Counts(const std::vector<CoTravelMatch>& matches) {
  std::map<CardId, int> out;
  for (const CoTravelMatch& m : matches) out[m.other_card_id] = m.occurrences;
  return out;
}

// Written independently of Satisfies(): explicit loops per variant.
inline bool OracleSatisfies(const CardEvents& card, const Constraint& c) {
  Timestamp first = card.events[0].on_time, last = first;
  for (const TapEvent& e : card.events) {
    first = std::min(first, e.on_time);
    last = std::max({last, e.on_time, e.off ? e.off->time : e.on_time});
  }
  if (auto* x = std::get_if<TouchOnBetween>(&c)) {
    for (const TapEvent& e : card.events) {
      Timestamp lo = Timestamp{x->date} + x->lo, hi = Timestamp{x->date} + x->hi;
      if (lo <= e.on_time && e.on_time <= hi) return true;
    }
    return false;
  }
  if (auto* x = std::get_if<TouchOnAt>(&c)) {
    for (const TapEvent& e : card.events) {
      if (std::chrono::abs(e.on_time - x->time).count() <= x->tolerance_seconds) {
        return true;
      }
    }
    return false;
  }
  if (auto* x = std::get_if<VisitedStop>(&c)) {
    for (const TapEvent& e : card.events) {
      std::vector<std::pair<StopId, Timestamp>> visits = {{e.on_stop_id, e.on_time}};
      if (e.off) visits.push_back({e.off->stop_id, e.off->time});
      for (auto [stop, t] : visits) {
        Date d = std::chrono::floor<std::chrono::days>(t);
        if (stop == x->stop_id &&
            (!x->range || (x->range->first <= d && d <= x->range->last))) {
          return true;
        }
      }
    }
    return false;
  }
  std::set<CardType> types;
  for (const TapEvent& e : card.events) types.insert(e.card_type);
  if (auto* x = std::get_if<CardTypeIs>(&c)) return types.count(x->type) > 0;
  if (auto* x = std::get_if<CardTypeIsNot>(&c)) return types.count(x->type) == 0;
  auto day = [](Timestamp t) { return std::chrono::floor<std::chrono::days>(t); };
  if (auto* x = std::get_if<FirstSeenBefore>(&c)) return day(first) < x->date;
  if (auto* x = std::get_if<FirstSeenAfter>(&c)) return day(first) > x->date;
  if (auto* x = std::get_if<LastSeenBefore>(&c)) return day(last) < x->date;
  if (auto* x = std::get_if<LastSeenAfter>(&c)) return day(last) > x->date;
  return static_cast<int>(card.events.size()) >= std::get<MinEventCount>(c).k;
}

inline std::vector<CardId> OracleEvaluate(const EventStore& store,
                                          const std::vector<Constraint>& cs) {
  std::vector<CardId> out;
  for (const CardEvents& card : store.cards()) {
    if (std::all_of(cs.begin(), cs.end(),
                    [&](const Constraint& c) { return OracleSatisfies(card, c); })) {
      out.push_back(card.card_id);
    }
  }
  return out;
}

}  // namespace tapreid::testing

#endif  // TAPREID_TESTS_ORACLES_H_
