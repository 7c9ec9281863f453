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

// Aggregate release: tap counts per stop, time block and direction, with
// optional differentially private noise.

#ifndef TAPREID_RELEASE_RELEASE_H_
#define TAPREID_RELEASE_RELEASE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "tapreid/core/time.h"
#include "tapreid/core/types.h"
#include "tapreid/ingest/event_store.h"

namespace tapreid {

inline constexpr int kDefaultBlockMinutes = 15;

struct AggregateCell {
  StopId stop_id = 0;
  Timestamp block_start;
  Side direction = Side::kTouchOn;
  double count = 0;

  friend bool operator==(const AggregateCell&, const AggregateCell&) = default;
};

// Cells sorted by (stop, block, direction). True-count tables omit zero
// cells; noisy tables list every cell of the stops x blocks x directions
// lattice.
struct AggregateTable {
  int block_minutes = kDefaultBlockMinutes;
  DateRange period;
  // Lattice stops, ascending.
  std::vector<StopId> stops;
  // Per-card contribution bound applied while counting, if any.
  std::optional<int> max_contribution;
  bool noisy = false;
  std::vector<AggregateCell> cells;

  // Number of cells in the full lattice.
  std::uint64_t LatticeSize() const;
  double Total(Side direction) const;

  friend bool operator==(const AggregateTable&, const AggregateTable&) = default;
};

struct AggregateOptions {
  int block_minutes = kDefaultBlockMinutes;
  // A bound left at its DateRange::All() value takes the store's own bound.
  DateRange period = DateRange::All();
  // Keep only each card's first k taps (on before off within an event, events
  // by touch-on time). Unset counts everything.
  std::optional<int> max_contribution;
  // Lattice stops. Empty means every stop seen on any tap in the store.
  std::vector<StopId> stops;
  int threads = 0;
};

// Exact counts. Each tap counts in the block of its own time and only when
// its own date is in the period. Errors: "InvalidBlock" when block_minutes
// does not divide 60, INVALID_ARGUMENT for an empty period or
// max_contribution < 1.
absl::StatusOr<AggregateTable> AggregateCounts(const EventStore& store,
                                               const AggregateOptions& options);

enum class NoiseMechanism { kGeometric, kLaplace };
enum class PostProcess { kNone, kRoundAndClampToZero };
enum class Adjacency { kEventLevel, kCardLevel };

struct PrivacyParams {
  double epsilon = 1.0;
  std::uint64_t seed = 0;
  NoiseMechanism mechanism = NoiseMechanism::kGeometric;
  PostProcess post_process = PostProcess::kNone;
  Adjacency adjacency = Adjacency::kEventLevel;
  // Required for kCardLevel.
  int max_contribution = 1;

  absl::Status Validate() const;
  // 1 for event-level adjacency, max_contribution for card-level.
  int Sensitivity() const;
};

std::string_view MechanismName(NoiseMechanism m);
absl::StatusOr<NoiseMechanism> ParseMechanism(std::string_view name);
std::string_view AdjacencyName(Adjacency a);
absl::StatusOr<Adjacency> ParseAdjacency(std::string_view name);
std::string_view PostProcessName(PostProcess p);
absl::StatusOr<PostProcess> ParsePostProcess(std::string_view name);

// Expected |noise| for one cell under `params`.
double AnalyticMeanAbsNoise(const PrivacyParams& params);

// Noise for one lattice cell, a pure function of (params, cell coordinates).
double CellNoise(const PrivacyParams& params, StopId stop, Timestamp block_start,
                 Side direction);

// Adds independent noise to every lattice cell of a true-count table. For
// card-level adjacency the table must have been counted with the same
// max_contribution.
absl::StatusOr<AggregateTable> AddNoise(const AggregateTable& table,
                                        const PrivacyParams& params, int threads = 0);

// Aggregation followed by noise, clamping for card-level adjacency.
absl::StatusOr<AggregateTable> ReleaseAggregate(const EventStore& store,
                                                AggregateOptions options,
                                                const PrivacyParams& params);

// stopId,blockStart,direction,count
std::string AggregateCsv(const AggregateTable& table);

// Release metadata as JSON. The seed itself is never written.
std::string ReleaseMetadataJson(const AggregateTable& table,
                                const std::optional<PrivacyParams>& params);

}  // namespace tapreid

#endif  // TAPREID_RELEASE_RELEASE_H_
