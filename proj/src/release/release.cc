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

#include "tapreid/release/release.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "absl/container/flat_hash_map.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "tapreid/core/parallel.h"
#include "tapreid/core/random.h"

namespace tapreid {
namespace {

using CellKey = std::tuple<StopId, std::int64_t, int>;  // stop, block, side
using CellCounts = absl::flat_hash_map<CellKey, std::int64_t>;

constexpr std::uint64_t kLatticeLimit = 200'000'000;
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::int64_t BlockStartSeconds(Timestamp t, int block_minutes) {
  std::int64_t s = t.time_since_epoch().count();
  std::int64_t width = std::int64_t{block_minutes} * 60;
  std::int64_t q = s / width;
  if (s % width < 0) --q;
  return q * width;
}

// Uniform on the open interval (0, 1).
double OpenUnit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t CellSeed(std::uint64_t seed, StopId stop, std::int64_t block_start,
                       Side direction) {
  std::uint64_t h = MixSeed(seed, static_cast<std::uint32_t>(stop));
  h = MixSeed(h, static_cast<std::uint64_t>(block_start));
  return MixSeed(h, direction == Side::kTouchOn ? 1 : 2);
}

std::string FormatCount(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    return absl::StrCat(static_cast<std::int64_t>(v));
  }
  return absl::StrFormat("%.6f", v);
}

}  // namespace

std::uint64_t AggregateTable::LatticeSize() const {
  if (period.empty()) return 0;
  std::uint64_t blocks_per_day = 24 * 60 / block_minutes;
  return stops.size() * static_cast<std::uint64_t>(period.DayCount()) * blocks_per_day * 2;
}

double AggregateTable::Total(Side direction) const {
  double total = 0;
  for (const AggregateCell& c : cells) {
    if (c.direction == direction) total += c.count;
  }
  return total;
}

absl::StatusOr<AggregateTable> AggregateCounts(const EventStore& store,
                                               const AggregateOptions& options) {
  if (options.block_minutes <= 0 || 60 % options.block_minutes != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("InvalidBlock: ", options.block_minutes, " does not divide 60"));
  }
  if (options.max_contribution && *options.max_contribution < 1) {
    return absl::InvalidArgumentError("maxContribution must be >= 1");
  }
  AggregateTable table;
  table.block_minutes = options.block_minutes;
  table.max_contribution = options.max_contribution;
  if (options.period.empty()) return absl::InvalidArgumentError("period is empty");
  table.period = options.period;
  const DateRange open = DateRange::All();
  if (table.period.first == open.first || table.period.last == open.last) {
    if (!store.date_range()) {
      table.period = {Date{}, Date{} - std::chrono::days{1}};
    } else {
      if (table.period.first == open.first) table.period.first = store.date_range()->first;
      if (table.period.last == open.last) table.period.last = store.date_range()->last;
    }
  }

  auto cards = store.cards();
  const int chunks = std::max(1, ResolveThreadCount(options.threads));
  std::vector<CellCounts> partial(chunks);
  std::vector<std::vector<StopId>> seen_stops(chunks);
  size_t per_chunk = (cards.size() + chunks - 1) / std::max<size_t>(1, chunks);
  ParallelFor(chunks, options.threads, [&](size_t w) {
    size_t begin = std::min(cards.size(), w * per_chunk);
    size_t end = std::min(cards.size(), begin + per_chunk);
    for (size_t c = begin; c < end; ++c) {
      std::vector<Tap> taps = SelectTaps(cards[c].events, EventKind::kBoth);
      int kept = 0;
      for (const Tap& tap : taps) {
        seen_stops[w].push_back(tap.location.stop_id);
        if (!table.period.Contains(tap.time)) continue;
        if (options.max_contribution && kept >= *options.max_contribution) continue;
        ++kept;
        ++partial[w][{tap.location.stop_id, BlockStartSeconds(tap.time, table.block_minutes),
                      tap.side == Side::kTouchOn ? 0 : 1}];
      }
    }
  });

  CellCounts merged;
  for (CellCounts& p : partial) {
    for (const auto& [key, n] : p) merged[key] += n;
  }
  if (options.stops.empty()) {
    for (auto& s : seen_stops) table.stops.insert(table.stops.end(), s.begin(), s.end());
  } else {
    table.stops = options.stops;
  }
  std::sort(table.stops.begin(), table.stops.end());
  table.stops.erase(std::unique(table.stops.begin(), table.stops.end()), table.stops.end());

  for (const auto& [key, n] : merged) {
    auto [stop, block, side] = key;
    if (!std::binary_search(table.stops.begin(), table.stops.end(), stop)) continue;
    table.cells.push_back({stop, Timestamp{std::chrono::seconds{block}},
                           side == 0 ? Side::kTouchOn : Side::kTouchOff,
                           static_cast<double>(n)});
  }
  std::sort(table.cells.begin(), table.cells.end(),
            [](const AggregateCell& a, const AggregateCell& b) {
              return std::tie(a.stop_id, a.block_start, a.direction) <
                     std::tie(b.stop_id, b.block_start, b.direction);
            });
  return table;
}

absl::Status PrivacyParams::Validate() const {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError("epsilon must be positive");
  }
  if (adjacency == Adjacency::kCardLevel && max_contribution < 1) {
    return absl::InvalidArgumentError("maxContribution must be >= 1");
  }
  return absl::OkStatus();
}

int PrivacyParams::Sensitivity() const {
  return adjacency == Adjacency::kCardLevel ? max_contribution : 1;
}

std::string_view MechanismName(NoiseMechanism m) {
  return m == NoiseMechanism::kGeometric ? "geometric" : "laplace";
}

absl::StatusOr<NoiseMechanism> ParseMechanism(std::string_view name) {
  if (name == "geometric") return NoiseMechanism::kGeometric;
  if (name == "laplace") return NoiseMechanism::kLaplace;
  return absl::InvalidArgumentError(absl::StrCat("unknown mechanism: ", std::string(name)));
}

std::string_view AdjacencyName(Adjacency a) {
  return a == Adjacency::kEventLevel ? "eventLevel" : "cardLevel";
}

absl::StatusOr<Adjacency> ParseAdjacency(std::string_view name) {
  if (name == "eventLevel" || name == "event") return Adjacency::kEventLevel;
  if (name == "cardLevel" || name == "card") return Adjacency::kCardLevel;
  return absl::InvalidArgumentError(absl::StrCat("unknown adjacency: ", std::string(name)));
}

std::string_view PostProcessName(PostProcess p) {
  return p == PostProcess::kNone ? "none" : "roundAndClampToZero";
}

absl::StatusOr<PostProcess> ParsePostProcess(std::string_view name) {
  if (name == "none") return PostProcess::kNone;
  if (name == "roundAndClampToZero" || name == "round") {
    return PostProcess::kRoundAndClampToZero;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown postProcess: ", std::string(name)));
}

double AnalyticMeanAbsNoise(const PrivacyParams& params) {
  double scale = params.Sensitivity() / params.epsilon;
  if (params.mechanism == NoiseMechanism::kLaplace) return scale;
  double alpha = std::exp(-1.0 / scale);
  return 2 * alpha / (1 - alpha * alpha);
}

double CellNoise(const PrivacyParams& params, StopId stop, Timestamp block_start,
                 Side direction) {
  std::uint64_t state =
      CellSeed(params.seed, stop, block_start.time_since_epoch().count(), direction);
  auto next = [&state] {
    state += kGamma;
    return OpenUnit(Avalanche64(state));
  };
  double scale = params.Sensitivity() / params.epsilon;
  if (params.mechanism == NoiseMechanism::kLaplace) {
    double u = next() - 0.5;
    return -scale * std::copysign(1.0, u) * std::log1p(-2 * std::abs(u));
  }
  // Difference of two geometric variables with P(G >= k) = alpha^k.
  double log_alpha = -1.0 / scale;
  double g1 = std::floor(std::log(next()) / log_alpha);
  double g2 = std::floor(std::log(next()) / log_alpha);
  return g1 - g2;
}

absl::StatusOr<AggregateTable> AddNoise(const AggregateTable& table,
                                        const PrivacyParams& params, int threads) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  if (table.noisy) return absl::InvalidArgumentError("table already carries noise");
  if (params.adjacency == Adjacency::kCardLevel &&
      table.max_contribution != params.max_contribution) {
    return absl::InvalidArgumentError(
        "card-level noise needs counts clamped to the same maxContribution");
  }
  if (table.LatticeSize() > kLatticeLimit) {
    return absl::ResourceExhaustedError(
        absl::StrCat("LatticeTooLarge: ", table.LatticeSize(), " cells"));
  }
  AggregateTable out = table;
  out.noisy = true;
  out.cells.clear();
  if (table.LatticeSize() == 0) return out;

  const std::int64_t width = std::int64_t{table.block_minutes} * 60;
  const std::int64_t blocks =
      std::int64_t{table.period.DayCount()} * 24 * 60 / table.block_minutes;
  const std::int64_t first = Timestamp{table.period.first}.time_since_epoch().count();
  const size_t per_stop = static_cast<size_t>(blocks) * 2;
  out.cells.resize(table.stops.size() * per_stop);

  // Offsets of each stop's true cells inside table.cells.
  std::vector<size_t> stop_begin(table.stops.size() + 1, table.cells.size());
  for (size_t s = 0, i = 0; s < table.stops.size(); ++s) {
    while (i < table.cells.size() && table.cells[i].stop_id < table.stops[s]) ++i;
    stop_begin[s] = i;
  }
  ParallelFor(table.stops.size(), threads, [&](size_t s) {
    StopId stop = table.stops[s];
    size_t i = stop_begin[s];
    for (std::int64_t b = 0; b < blocks; ++b) {
      Timestamp start{std::chrono::seconds{first + b * width}};
      for (Side side : {Side::kTouchOn, Side::kTouchOff}) {
        double truth = 0;
        while (i < table.cells.size() && table.cells[i].stop_id == stop &&
               std::tie(table.cells[i].block_start, table.cells[i].direction) <
                   std::tie(start, side)) {
          ++i;
        }
        if (i < table.cells.size() && table.cells[i].stop_id == stop &&
            table.cells[i].block_start == start && table.cells[i].direction == side) {
          truth = table.cells[i].count;
        }
        double value = truth + CellNoise(params, stop, start, side);
        if (params.post_process == PostProcess::kRoundAndClampToZero) {
          value = std::max(0.0, std::round(value));
        }
        out.cells[s * per_stop + b * 2 + (side == Side::kTouchOn ? 0 : 1)] = {
            stop, start, side, value};
      }
    }
  });
  return out;
}

absl::StatusOr<AggregateTable> ReleaseAggregate(const EventStore& store,
                                                AggregateOptions options,
                                                const PrivacyParams& params) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  options.max_contribution.reset();
  if (params.adjacency == Adjacency::kCardLevel) {
    options.max_contribution = params.max_contribution;
  }
  absl::StatusOr<AggregateTable> counts = AggregateCounts(store, options);
  if (!counts.ok()) return counts.status();
  return AddNoise(*counts, params, options.threads);
}

std::string AggregateCsv(const AggregateTable& table) {
  std::string out = "stopId,blockStart,direction,count\n";
  for (const AggregateCell& c : table.cells) {
    absl::StrAppend(&out, c.stop_id, ",", FormatTimestamp(c.block_start), ",",
                    std::string(SideName(c.direction)), ",", FormatCount(c.count), "\n");
  }
  return out;
}

std::string ReleaseMetadataJson(const AggregateTable& table,
                                const std::optional<PrivacyParams>& params) {
  nlohmann::ordered_json j;
  j["blockMinutes"] = table.block_minutes;
  if (!table.period.empty()) {
    j["periodFrom"] = FormatDate(table.period.first);
    j["periodTo"] = FormatDate(table.period.last);
  }
  j["stops"] = table.stops.size();
  j["cells"] = table.cells.size();
  j["noisy"] = table.noisy;
  if (table.max_contribution) j["maxContribution"] = *table.max_contribution;
  if (params) {
    j["epsilon"] = params->epsilon;
    j["mechanism"] = MechanismName(params->mechanism);
    j["adjacency"] = AdjacencyName(params->adjacency);
    j["sensitivity"] = params->Sensitivity();
    j["postProcess"] = PostProcessName(params->post_process);
    j["seedPolicy"] = "operator-supplied fixed seed, withheld from published artifacts";
  }
  return j.dump(2) + "\n";
}

}  // namespace tapreid
