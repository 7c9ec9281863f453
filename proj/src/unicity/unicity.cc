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

#include "tapreid/unicity/unicity.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "tapreid/core/parallel.h"
#include "tapreid/core/random.h"
#include "tapreid/core/signature.h"

namespace tapreid {
namespace {

std::vector<std::uint32_t> PermutationPrefix(size_t m, int n,
                                             std::uint64_t seed) {
  std::vector<std::uint32_t> order(m);
  std::iota(order.begin(), order.end(), 0u);
  Rng rng(seed);
  Shuffle(std::span<std::uint32_t>(order), rng);
  order.resize(std::min<size_t>(m, static_cast<size_t>(std::max(n, 0))));
  return order;
}

// True iff no card other than `self` appears in every span. Searches the
// smallest bin for a witness and stops at the first one found; spans must be
// sorted ascending.
bool NoOtherCardInAll(std::vector<std::span<const CardId>>& bins,
                      CardId self) {
  std::sort(bins.begin(), bins.end(),
            [](auto a, auto b) { return a.size() < b.size(); });
  for (CardId candidate : bins.front()) {
    if (candidate == self) continue;
    bool in_all = true;
    for (size_t i = 1; i < bins.size() && in_all; ++i) {
      in_all = std::binary_search(bins[i].begin(), bins[i].end(), candidate);
    }
    if (in_all) return false;
  }
  return true;
}

}  // namespace

absl::Status UnicityParams::Validate() const {
  if (granularities.empty() || location_flags.empty() || cardinalities.empty()) {
    return absl::InvalidArgumentError(
        "granularities, location flags and cardinalities must be non-empty");
  }
  if (!std::is_sorted(cardinalities.begin(), cardinalities.end())) {
    return absl::InvalidArgumentError("cardinalities must be ascending");
  }
  if (cardinalities.front() < 1) {
    return absl::InvalidArgumentError("cardinalities must be >= 1");
  }
  if (period.empty()) return absl::InvalidArgumentError("empty period");
  if (min_sub_events < 1) {
    return absl::InvalidArgumentError("min_sub_events must be >= 1");
  }
  return absl::OkStatus();
}

const UnicityRow* UnicityReport::Find(TimeGranularity g, bool location,
                                      int n) const {
  for (const UnicityRow& row : rows) {
    if (row.granularity == g && row.location == location && row.n == n) {
      return &row;
    }
  }
  return nullptr;
}

std::string UnicityReport::ToCsv() const {
  std::string out =
      "granularity,location,n,cardsConsidered,cardsUnique,percentUnique\n";
  for (const UnicityRow& r : rows) {
    absl::StrAppend(&out, std::string(GranularityName(r.granularity)), ",",
                    r.location ? "true" : "false", ",", r.n, ",",
                    r.cards_considered, ",", r.cards_unique, ",",
                    absl::StrFormat("%.4f", r.percent_unique()), "\n");
  }
  return out;
}

std::vector<Tap> SampleFirstN(std::span<const Tap> taps, int n,
                              std::uint64_t card_seed) {
  std::vector<Tap> out;
  for (std::uint32_t i : PermutationPrefix(taps.size(), n, card_seed)) {
    out.push_back(taps[i]);
  }
  return out;
}

absl::StatusOr<bool> IsUnique(std::span<const BinRef> bins, CardId self) {
  if (bins.empty()) {
    return absl::FailedPreconditionError("SelfNotInBins: no bins given");
  }
  std::vector<BinId> seen;
  std::vector<std::span<const CardId>> spans;
  for (const BinRef& bin : bins) {
    if (std::find(seen.begin(), seen.end(), bin.id()) != seen.end()) continue;
    seen.push_back(bin.id());
    auto members = bin.members();
    if (!std::binary_search(members.begin(), members.end(), self)) {
      return absl::FailedPreconditionError(absl::StrCat(
          "SelfNotInBins: card ", self, " is not in bin ",
          bin.signature().ToString()));
    }
    spans.push_back(members);
  }
  return NoOtherCardInAll(spans, self);
}

std::vector<CardSample> DrawSamples(const EventStore& store, EventKind kind,
                                    std::uint64_t seed, int max_n,
                                    const DateRange& period) {
  std::vector<CardSample> samples;
  samples.reserve(store.card_count());
  for (const CardEvents& card : store.cards()) {
    size_t available = SelectTaps(card.events, kind, period).size();
    if (available == 0) continue;
    samples.push_back({card.card_id, available,
                       PermutationPrefix(available, max_n,
                                         MixSeed(seed, card.card_id))});
  }
  return samples;
}

std::vector<bool> UniqueFlags(const SignatureCalendar& calendar,
                              std::span<const CardSample> samples, int n,
                              int threads) {
  std::vector<std::uint8_t> flags(samples.size(), 0);
  ParallelForRange(samples.size(), threads, [&](size_t begin, size_t end) {
    std::vector<BinId> bins;
    std::vector<std::span<const CardId>> spans;
    for (size_t i = begin; i < end; ++i) {
      const CardSample& sample = samples[i];
      auto index = calendar.CardIndex(sample.card_id);
      if (!index) continue;  // no taps under this calendar's kind/period
      auto refs = calendar.CardBinIds(*index);
      size_t take = std::min<size_t>(static_cast<size_t>(n), sample.order.size());
      bins.clear();
      for (size_t k = 0; k < take; ++k) bins.push_back(refs[sample.order[k]]);
      std::sort(bins.begin(), bins.end());
      bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
      spans.clear();
      for (BinId b : bins) spans.push_back(calendar.bin(b).members());
      flags[i] = !spans.empty() && NoOtherCardInAll(spans, sample.card_id);
    }
  });
  return {flags.begin(), flags.end()};
}

absl::StatusOr<std::map<CardId, bool>> BruteForceUnicity(
    const EventStore& store, const std::map<CardId, std::vector<Tap>>& sampled,
    TimeGranularity g, bool include_location, EventKind kind,
    const DateRange& period) {
  if (store.event_count() > kBruteForceEventLimit) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "StoreTooLarge: ", store.event_count(), " events exceed the limit of ",
        kBruteForceEventLimit));
  }
  std::map<CardId, std::set<EventSignature>> full;
  for (const CardEvents& card : store.cards()) {
    std::set<EventSignature>& sigs = full[card.card_id];
    for (const Tap& tap : SelectTaps(card.events, kind, period)) {
      sigs.insert(SignatureOf(tap, g, include_location));
    }
  }
  std::map<CardId, bool> result;
  for (const auto& [card, taps] : sampled) {
    std::set<EventSignature> wanted;
    for (const Tap& tap : taps) wanted.insert(SignatureOf(tap, g, include_location));
    bool unique = true;
    for (const auto& [other, sigs] : full) {
      if (other == card) continue;
      if (std::includes(sigs.begin(), sigs.end(), wanted.begin(), wanted.end())) {
        unique = false;
        break;
      }
    }
    result[card] = unique;
  }
  return result;
}

std::map<CardId, std::vector<Tap>> SampledTaps(
    const EventStore& store, std::span<const CardSample> samples, int n,
    EventKind kind, const DateRange& period) {
  std::map<CardId, std::vector<Tap>> out;
  for (const CardSample& sample : samples) {
    const CardEvents* card = store.Find(sample.card_id);
    if (card == nullptr) continue;
    std::vector<Tap> taps = SelectTaps(card->events, kind, period);
    std::vector<Tap>& chosen = out[sample.card_id];
    size_t take = std::min<size_t>(static_cast<size_t>(n), sample.order.size());
    for (size_t k = 0; k < take; ++k) chosen.push_back(taps[sample.order[k]]);
  }
  return out;
}

UnicityReport RunUnicity(const EventStore& store, const UnicityParams& params) {
  UnicityReport report;
  const int max_n = params.cardinalities.back();
  std::vector<CardSample> samples =
      DrawSamples(store, params.kind, params.seed, max_n, params.period);
  for (TimeGranularity g : params.granularities) {
    for (bool location : params.location_flags) {
      SignatureCalendar calendar =
          BuildCalendar(store, g, location, params.kind, params.period);
      for (int n : params.cardinalities) {
        std::vector<bool> flags =
            UniqueFlags(calendar, samples, n, params.threads);
        UnicityRow row{g, location, n, 0, 0};
        for (size_t i = 0; i < samples.size(); ++i) {
          size_t available = samples[i].available;
          if (available < static_cast<size_t>(params.min_sub_events)) continue;
          if (params.exclude_short && available < static_cast<size_t>(n)) {
            continue;
          }
          ++row.cards_considered;
          row.cards_unique += flags[i] ? 1 : 0;
        }
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

}  // namespace tapreid
