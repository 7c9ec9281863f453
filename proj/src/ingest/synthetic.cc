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

#include "tapreid/ingest/synthetic.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "tapreid/core/parallel.h"
#include "tapreid/core/random.h"

namespace tapreid {
namespace {

using std::chrono::days;
using std::chrono::hours;
using std::chrono::minutes;
using std::chrono::seconds;

constexpr seconds kServiceStart = hours{5};
constexpr seconds kServiceEnd = hours{23} + minutes{59} + seconds{59};

enum class Archetype {
  kCommuter,
  kTourist,
  kSeasonPass,
  kChild,
  kParliamentarian,
  kPolice
};

class StopUniverse {
 public:
  explicit StopUniverse(int size) {
    for (StopId s = 1; s <= size; ++s) {
      all_.push_back(s);
      (ModeOfStop(s) == kTramMode ? tram_ : non_tram_).push_back(s);
      by_mode_[ModeOfStop(s)].push_back(s);
    }
  }

  // Low ids are busier: index = floor(n * u^2).
  static StopId PickSkewed(Rng& rng, const std::vector<StopId>& pool) {
    double u = UniformUnit(rng);
    size_t i = static_cast<size_t>(static_cast<double>(pool.size()) * u * u);
    return pool[std::min(i, pool.size() - 1)];
  }

  StopId Any(Rng& rng) const { return PickSkewed(rng, all_); }
  StopId NonTram(Rng& rng) const { return PickSkewed(rng, non_tram_); }
  StopId Tram(Rng& rng) const {
    return tram_.empty() ? Any(rng) : PickSkewed(rng, tram_);
  }

  // A different stop, of the same mode when the mode has more than one stop.
  // `non_tram_only` restricts fallbacks to train/bus stops.
  StopId Destination(Rng& rng, StopId from, bool non_tram_only = false) const {
    const std::vector<StopId>& same = by_mode_[ModeOfStop(from)];
    const std::vector<StopId>& pool =
        same.size() > 1 ? same : (non_tram_only ? non_tram_ : all_);
    for (;;) {
      StopId s = pool[UniformBelow(rng, pool.size())];
      if (s != from) return s;
    }
  }

 private:
  std::vector<StopId> all_;
  std::vector<StopId> tram_;
  std::vector<StopId> non_tram_;
  std::vector<StopId> by_mode_[4];
};

struct CardPlan {
  Archetype archetype;
  CardType type;
};

class CardGenerator {
 public:
  CardGenerator(const SyntheticPopulationConfig& config,
                const StopUniverse& stops, CardId id, CardType type,
                std::uint64_t seed)
      : config_(config), stops_(stops), rng_(seed) {
    card_.card_id = id;
    type_ = type;
  }

  CardEvents Generate(Archetype archetype) {
    switch (archetype) {
      case Archetype::kCommuter:
        Commute(config_.jitter.commuter, 1.0, /*weekdays_only=*/true,
                hours{6}, hours{9} + minutes{30}, hours{16},
                hours{19} + minutes{30});
        break;
      case Archetype::kParliamentarian:
        Commute(config_.jitter.parliamentarian, 0.6, true, hours{6},
                hours{9}, hours{16}, hours{21});
        break;
      case Archetype::kPolice:
        Commute(config_.jitter.police, 5.0 / 7.0, false, hours{5},
                hours{14}, hours{13}, hours{23});
        break;
      case Archetype::kChild:
        School();
        break;
      case Archetype::kTourist:
        Tourist();
        break;
      case Archetype::kSeasonPass:
        SeasonPass();
        break;
    }
    return std::move(card_);
  }

 private:
  seconds UniformTime(seconds lo, seconds hi) {
    return lo + seconds{static_cast<std::int64_t>(
                    UniformBelow(rng_, static_cast<std::uint64_t>(
                                           (hi - lo).count() + 1)))};
  }

  seconds Jittered(seconds base, double sigma) {
    double shift = sigma > 0 ? std::round(StandardNormal(rng_) * sigma) : 0.0;
    return std::clamp(base + seconds{static_cast<std::int64_t>(shift)},
                      kServiceStart, kServiceEnd);
  }

  void AddTrip(Date day, seconds depart, StopId from, StopId to,
               seconds duration, bool allow_off = true) {
    TapEvent e;
    e.card_id = card_.card_id;
    e.card_type = type_;
    e.on_time = Timestamp{day} + depart;
    e.on_mode = ModeOfStop(from);
    e.on_route_id = RouteOfStop(from);
    e.on_stop_id = from;
    bool tram = e.on_mode == kTramMode;
    if (allow_off &&
        !(tram && Bernoulli(rng_, config_.tram_no_touch_off_probability))) {
      seconds arrive = std::min(depart + duration, kServiceEnd);
      e.off = OffSide{Timestamp{day} + arrive, ModeOfStop(to), RouteOfStop(to),
                      to};
    }
    card_.events.push_back(e);
  }

  void Commute(double sigma, double attendance, bool weekdays_only,
               seconds am_lo, seconds am_hi, seconds pm_lo, seconds pm_hi) {
    StopId home = stops_.NonTram(rng_);
    StopId work = stops_.Destination(rng_, home, /*non_tram_only=*/true);
    seconds am = UniformTime(am_lo, am_hi);
    seconds pm = UniformTime(pm_lo, pm_hi);
    seconds travel = minutes{10} + seconds{UniformBelow(rng_, 50 * 60)};
    for (Date d = config_.period.first; d <= config_.period.last; d += days{1}) {
      std::chrono::weekday wd{d};
      bool weekend = wd == std::chrono::Saturday || wd == std::chrono::Sunday;
      if (weekdays_only && weekend) continue;
      if (attendance < 1.0 && !Bernoulli(rng_, attendance)) continue;
      seconds out = Jittered(am, sigma);
      seconds back = std::max(Jittered(pm, sigma), out + travel);
      if (back > kServiceEnd) back = kServiceEnd;
      AddTrip(d, out, home, work, travel);
      AddTrip(d, back, work, home, travel);
    }
  }

  void School() {
    StopId home = stops_.Any(rng_);
    StopId school = stops_.Destination(rng_, home);
    seconds am = UniformTime(hours{7} + minutes{15}, hours{8} + minutes{30});
    seconds pm = UniformTime(hours{15}, hours{16} + minutes{30});
    seconds travel = minutes{5} + seconds{UniformBelow(rng_, 30 * 60)};
    for (Date d = config_.period.first; d <= config_.period.last; d += days{1}) {
      std::chrono::weekday wd{d};
      if (wd == std::chrono::Saturday || wd == std::chrono::Sunday) continue;
      AddTrip(d, Jittered(am, config_.jitter.child), home, school, travel);
      AddTrip(d, Jittered(pm, config_.jitter.child), school, home, travel);
    }
  }

  void Tourist() {
    int span = config_.period.DayCount();
    Date start =
        config_.period.first + days{static_cast<int>(UniformBelow(rng_, span))};
    Date end = std::min(start + days{6}, config_.period.last);
    for (Date d = start; d <= end; d += days{1}) {
      int trips = 2 + static_cast<int>(UniformBelow(rng_, 3));
      std::vector<seconds> times;
      for (int i = 0; i < trips; ++i) {
        times.push_back(UniformTime(hours{8}, hours{21}));
      }
      std::sort(times.begin(), times.end());
      for (seconds t : times) {
        StopId from = stops_.Any(rng_);
        StopId to = stops_.Destination(rng_, from);
        AddTrip(d, t, from, to, minutes{5} + seconds{UniformBelow(rng_, 2400)});
      }
    }
  }

  void SeasonPass() {
    StopId stop = stops_.Tram(rng_);
    seconds base = UniformTime(hours{7}, hours{18});
    using std::chrono::year_month;
    using std::chrono::year_month_day;
    year_month_day first{config_.period.first};
    year_month month{first.year(), first.month()};
    for (;;) {
      Date lo = std::max<Date>(Date{month / std::chrono::day{1}},
                               config_.period.first);
      Date hi = std::min<Date>(Date{month / std::chrono::last},
                               config_.period.last);
      if (lo > config_.period.last) break;
      Date d = lo + days{static_cast<int>(
                        UniformBelow(rng_, (hi - lo).count() + 1))};
      AddTrip(d, Jittered(base, config_.jitter.season_pass), stop, stop,
              seconds{0}, /*allow_off=*/false);
      month += std::chrono::months{1};
    }
  }

  const SyntheticPopulationConfig& config_;
  const StopUniverse& stops_;
  Rng rng_;
  CardEvents card_;
  CardType type_ = 0;
};

}  // namespace

ModeCode ModeOfStop(StopId stop) {
  switch (((stop % 3) + 3) % 3) {
    case 1:
      return kTrainMode;
    case 2:
      return kBusMode;
    default:
      return kTramMode;
  }
}

RouteId RouteOfStop(StopId stop) { return ModeOfStop(stop) * 1000 + stop / 25; }

absl::Status SyntheticPopulationConfig::Validate() const {
  const ArchetypeCounts& c = counts;
  if (c.commuter < 0 || c.tourist_one_week < 0 || c.season_pass_holder < 0 ||
      c.child_concession < 0 || c.parliamentarian < 0 || c.police_pass < 0) {
    return absl::InvalidArgumentError("InvalidConfig: negative archetype count");
  }
  if (stop_universe < 2) {
    return absl::InvalidArgumentError("InvalidConfig: stop universe below 2");
  }
  if (period.empty()) {
    return absl::InvalidArgumentError("InvalidConfig: empty date range");
  }
  if (!(tram_no_touch_off_probability >= 0.0 &&
        tram_no_touch_off_probability <= 1.0)) {
    return absl::InvalidArgumentError(
        "InvalidConfig: tram touch-off probability outside [0, 1]");
  }
  if (first_card_id == 0) {
    return absl::InvalidArgumentError("InvalidConfig: firstCardId must be >= 1");
  }
  return absl::OkStatus();
}

absl::StatusOr<EventStore> GeneratePopulation(
    const SyntheticPopulationConfig& config, int threads) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;

  std::vector<CardPlan> plan;
  plan.reserve(config.counts.total());
  auto add = [&](int n, Archetype a, CardType type) {
    for (int i = 0; i < n; ++i) plan.push_back({a, type});
  };
  add(config.counts.commuter, Archetype::kCommuter, kCommuterClubType);
  add(config.counts.tourist_one_week, Archetype::kTourist, kFullFareType);
  add(config.counts.season_pass_holder, Archetype::kSeasonPass,
      kSeasonPassType);
  add(config.counts.child_concession, Archetype::kChild, kChildConcessionType);
  add(config.counts.parliamentarian, Archetype::kParliamentarian,
      kStateParliamentarianType);
  for (int i = 0; i < config.counts.police_pass; ++i) {
    plan.push_back({Archetype::kPolice,
                    i % 2 == 0 ? kFederalPoliceType : kTransitPoliceType});
  }

  StopUniverse stops(config.stop_universe);
  std::vector<CardEvents> cards(plan.size());
  ParallelFor(plan.size(), threads, [&](size_t k) {
    CardGenerator gen(config, stops, config.first_card_id + k, plan[k].type,
                      MixSeed(config.seed, k));
    cards[k] = gen.Generate(plan[k].archetype);
  });
  return EventStore::FromCards(std::move(cards));
}

absl::StatusOr<SyntheticPopulationConfig> ParsePopulationConfig(
    std::string_view json_text) {
  using nlohmann::json;
  SyntheticPopulationConfig config;
  try {
    json j = json::parse(json_text);
    if (!j.is_object()) {
      return absl::InvalidArgumentError("InvalidConfig: expected a JSON object");
    }
    config.seed = j.value("seed", config.seed);
    config.counts.commuter = j.value("commuter", 0);
    config.counts.tourist_one_week = j.value("touristOneWeek", 0);
    config.counts.season_pass_holder = j.value("seasonPassHolder", 0);
    config.counts.child_concession = j.value("childConcession", 0);
    config.counts.parliamentarian = j.value("parliamentarian", 0);
    config.counts.police_pass = j.value("policePass", 0);
    config.stop_universe = j.value("stopUniverse", config.stop_universe);
    config.tram_no_touch_off_probability = j.value(
        "tramNoTouchOffProbability", config.tram_no_touch_off_probability);
    config.first_card_id = j.value("firstCardId", config.first_card_id);
    auto start = ParseDate(j.value("startDate", std::string()));
    auto end = ParseDate(j.value("endDate", std::string()));
    if (!start.ok() || !end.ok()) {
      return absl::InvalidArgumentError(
          "InvalidConfig: startDate and endDate must be YYYY-MM-DD");
    }
    config.period = {*start, *end};
    if (j.contains("jitter")) {
      const json& jit = j.at("jitter");
      JitterSeconds& js = config.jitter;
      js.commuter = jit.value("commuter", js.commuter);
      js.tourist = jit.value("tourist", js.tourist);
      js.season_pass = jit.value("seasonPass", js.season_pass);
      js.child = jit.value("child", js.child);
      js.parliamentarian = jit.value("parliamentarian", js.parliamentarian);
      js.police = jit.value("police", js.police);
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("InvalidConfig: ", e.what()));
  }
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  return config;
}

}  // namespace tapreid
