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

#include "tapreid/index/calendar.h"

#include <algorithm>
#include <array>
#include <cstring>

#include "absl/strings/str_cat.h"

namespace tapreid {

const EventSignature& BinRef::signature() const {
  return calendar_->signatures_[id_];
}

std::span<const CardId> BinRef::members() const {
  const auto& off = calendar_->member_offsets_;
  return std::span<const CardId>(calendar_->members_)
      .subspan(off[id_], off[id_ + 1] - off[id_]);
}

std::uint32_t BinRef::event_count() const {
  return calendar_->event_counts_[id_];
}

std::optional<BinRef> SignatureCalendar::Find(
    const EventSignature& signature) const {
  auto it = lookup_.find(signature);
  if (it == lookup_.end()) return std::nullopt;
  return BinRef(this, it->second);
}

std::optional<size_t> SignatureCalendar::CardIndex(CardId id) const {
  auto it = std::lower_bound(card_ids_.begin(), card_ids_.end(), id);
  if (it == card_ids_.end() || *it != id) return std::nullopt;
  return static_cast<size_t>(it - card_ids_.begin());
}

std::span<const BinId> SignatureCalendar::CardBinIds(size_t card_index) const {
  return std::span<const BinId>(card_refs_)
      .subspan(card_offsets_[card_index],
               card_offsets_[card_index + 1] - card_offsets_[card_index]);
}

void SignatureCalendar::RebuildLookup() {
  lookup_.clear();
  lookup_.reserve(signatures_.size());
  for (BinId b = 0; b < signatures_.size(); ++b) lookup_.emplace(signatures_[b], b);
}

bool operator==(const SignatureCalendar& a, const SignatureCalendar& b) {
  return a.granularity_ == b.granularity_ &&
         a.include_location_ == b.include_location_ && a.kind_ == b.kind_ &&
         a.period_ == b.period_ && a.signatures_ == b.signatures_ &&
         a.event_counts_ == b.event_counts_ &&
         a.member_offsets_ == b.member_offsets_ && a.members_ == b.members_ &&
         a.card_ids_ == b.card_ids_ && a.card_offsets_ == b.card_offsets_ &&
         a.card_refs_ == b.card_refs_;
}

SignatureCalendar BuildCalendar(const EventStore& store, TimeGranularity g,
                                bool include_location, EventKind kind,
                                const DateRange& period) {
  SignatureCalendar cal;
  cal.granularity_ = g;
  cal.include_location_ = include_location;
  cal.kind_ = kind;
  cal.period_ = period;
  cal.card_offsets_.push_back(0);

  // Pass 1: assign bin ids and record per-card references.
  cal.lookup_.reserve(store.event_count());
  for (const CardEvents& card : store.cards()) {
    std::vector<Tap> taps = SelectTaps(card.events, kind, period);
    if (taps.empty()) continue;
    for (const Tap& tap : taps) {
      EventSignature sig = SignatureOf(tap, g, include_location);
      auto [it, inserted] =
          cal.lookup_.try_emplace(sig, static_cast<BinId>(cal.signatures_.size()));
      if (inserted) {
        cal.signatures_.push_back(sig);
        cal.event_counts_.push_back(0);
      }
      ++cal.event_counts_[it->second];
      cal.card_refs_.push_back(it->second);
    }
    cal.card_ids_.push_back(card.card_id);
    cal.card_offsets_.push_back(cal.card_refs_.size());
  }

  // Pass 2: count distinct members per bin, then fill. Cards are visited in
  // ascending id order, so every member list comes out sorted.
  const size_t bins = cal.signatures_.size();
  std::vector<std::uint64_t> counts(bins + 1, 0);
  std::vector<BinId> scratch;
  auto distinct_bins = [&](size_t c) -> const std::vector<BinId>& {
    auto refs = cal.CardBinIds(c);
    scratch.assign(refs.begin(), refs.end());
    std::sort(scratch.begin(), scratch.end());
    scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    return scratch;
  };
  for (size_t c = 0; c < cal.card_ids_.size(); ++c) {
    for (BinId b : distinct_bins(c)) ++counts[b + 1];
  }
  for (size_t b = 0; b < bins; ++b) counts[b + 1] += counts[b];
  cal.member_offsets_ = counts;
  cal.members_.resize(counts[bins]);
  for (size_t c = 0; c < cal.card_ids_.size(); ++c) {
    for (BinId b : distinct_bins(c)) cal.members_[counts[b]++] = cal.card_ids_[c];
  }
  if (bins == 0) cal.member_offsets_.assign(1, 0);
  return cal;
}

std::vector<CardId> BinMembers(const SignatureCalendar& calendar,
                               const EventSignature& signature) {
  auto bin = calendar.Find(signature);
  if (!bin) return {};
  auto members = bin->members();
  return {members.begin(), members.end()};
}

absl::StatusOr<std::vector<BinRef>> CardBins(const SignatureCalendar& calendar,
                                             CardId card) {
  auto index = calendar.CardIndex(card);
  if (!index) {
    return absl::NotFoundError(
        absl::StrCat("UnknownCard: card ", card, " has no signature"));
  }
  std::vector<BinRef> out;
  for (BinId b : calendar.CardBinIds(*index)) out.push_back(calendar.bin(b));
  return out;
}

// Snapshot format, version 1 (host byte order; little-endian on every
// supported platform):
//   char[8]  magic "TAPRCAL1"
//   u32      version
//   u8       granularity, include_location, kind, reserved
//   i64      period.first, period.last (days since 1970-01-01)
//   u64      bin_count, member_count, card_count, ref_count
//   per bin: i64 time, u8 has_location, i32 mode, i32 stop, u32 event_count
//   u64[bin_count + 1]   member offsets
//   u64[member_count]    members
//   u64[card_count]      card ids
//   u64[card_count + 1]  card offsets
//   u32[ref_count]       card bin references
namespace {

constexpr std::array<char, 8> kMagic = {'T', 'A', 'P', 'R', 'C', 'A', 'L', '1'};
constexpr std::uint32_t kSnapshotVersion = 1;

template <typename T>
void Put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void PutVector(std::ostream& out, const std::vector<T>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
bool Get(std::istream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

template <typename T>
bool GetVector(std::istream& in, std::vector<T>& v, std::uint64_t n) {
  if (n > (std::uint64_t{1} << 36)) return false;
  v.resize(n);
  return static_cast<bool>(in.read(reinterpret_cast<char*>(v.data()),
                                   static_cast<std::streamsize>(n * sizeof(T))));
}

}  // namespace

absl::Status SignatureCalendar::Save(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  Put(out, kSnapshotVersion);
  Put(out, static_cast<std::uint8_t>(granularity_));
  Put(out, static_cast<std::uint8_t>(include_location_));
  Put(out, static_cast<std::uint8_t>(kind_));
  Put(out, std::uint8_t{0});
  Put(out, static_cast<std::int64_t>(period_.first.time_since_epoch().count()));
  Put(out, static_cast<std::int64_t>(period_.last.time_since_epoch().count()));
  Put(out, static_cast<std::uint64_t>(signatures_.size()));
  Put(out, static_cast<std::uint64_t>(members_.size()));
  Put(out, static_cast<std::uint64_t>(card_ids_.size()));
  Put(out, static_cast<std::uint64_t>(card_refs_.size()));
  for (size_t b = 0; b < signatures_.size(); ++b) {
    const EventSignature& s = signatures_[b];
    Put(out, static_cast<std::int64_t>(s.truncated_time.time_since_epoch().count()));
    Put(out, static_cast<std::uint8_t>(s.location.has_value()));
    Put(out, static_cast<std::int32_t>(s.location ? s.location->mode : 0));
    Put(out, static_cast<std::int32_t>(s.location ? s.location->stop_id : 0));
    Put(out, event_counts_[b]);
  }
  PutVector(out, member_offsets_);
  PutVector(out, members_);
  PutVector(out, card_ids_);
  PutVector(out, card_offsets_);
  PutVector(out, card_refs_);
  out.flush();
  if (!out) return absl::DataLossError("calendar snapshot write failed");
  return absl::OkStatus();
}

absl::StatusOr<SignatureCalendar> SignatureCalendar::Load(std::istream& in) {
  auto corrupt = [](std::string_view what) {
    return absl::DataLossError(
        absl::StrCat("calendar snapshot: ", std::string(what)));
  };
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    return corrupt("bad magic");
  }
  std::uint32_t version = 0;
  if (!Get(in, version)) return corrupt("truncated header");
  if (version != kSnapshotVersion) {
    return absl::FailedPreconditionError(
        absl::StrCat("calendar snapshot version ", version, " unsupported"));
  }
  std::uint8_t g = 0, loc = 0, kind = 0, reserved = 0;
  std::int64_t first = 0, last = 0;
  std::uint64_t bins = 0, members = 0, cards = 0, refs = 0;
  if (!Get(in, g) || !Get(in, loc) || !Get(in, kind) || !Get(in, reserved) ||
      !Get(in, first) || !Get(in, last) || !Get(in, bins) || !Get(in, members) ||
      !Get(in, cards) || !Get(in, refs)) {
    return corrupt("truncated header");
  }
  if (g > 4 || loc > 1 || kind > 2) return corrupt("bad enum value");
  SignatureCalendar cal;
  cal.granularity_ = static_cast<TimeGranularity>(g);
  cal.include_location_ = loc != 0;
  cal.kind_ = static_cast<EventKind>(kind);
  cal.period_ = {Date{std::chrono::days{first}}, Date{std::chrono::days{last}}};
  if (bins > (std::uint64_t{1} << 32)) return corrupt("bin count too large");
  cal.signatures_.reserve(bins);
  cal.event_counts_.reserve(bins);
  for (std::uint64_t b = 0; b < bins; ++b) {
    std::int64_t t = 0;
    std::uint8_t has = 0;
    std::int32_t mode = 0, stop = 0;
    std::uint32_t count = 0;
    if (!Get(in, t) || !Get(in, has) || !Get(in, mode) || !Get(in, stop) ||
        !Get(in, count)) {
      return corrupt("truncated bins");
    }
    EventSignature sig{Timestamp{std::chrono::seconds{t}}, std::nullopt};
    if (has) sig.location = LocationKey{mode, stop};
    cal.signatures_.push_back(sig);
    cal.event_counts_.push_back(count);
  }
  if (!GetVector(in, cal.member_offsets_, bins + 1) ||
      !GetVector(in, cal.members_, members) ||
      !GetVector(in, cal.card_ids_, cards) ||
      !GetVector(in, cal.card_offsets_, cards + 1) ||
      !GetVector(in, cal.card_refs_, refs)) {
    return corrupt("truncated arrays");
  }
  if (cal.member_offsets_.back() != members ||
      cal.card_offsets_.back() != refs) {
    return corrupt("inconsistent offsets");
  }
  for (BinId r : cal.card_refs_) {
    if (r >= bins) return corrupt("reference out of range");
  }
  cal.RebuildLookup();
  return cal;
}

}  // namespace tapreid
