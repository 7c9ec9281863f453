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

// Reading and writing tap events as CSV.
//
// The header is
//   cardId,cardType,onDate,onMode,onRouteId,onStopId,offDate,offMode,offRouteId,offStopId
// Timestamps are YYYY-MM-DDTHH:MM:SS and a missing touch-off is written as
// four empty fields. On input, columns are located by name, so extra columns
// (onVid, onParentRoute, ...) are accepted and ignored.

#ifndef TAPREID_INGEST_CSV_H_
#define TAPREID_INGEST_CSV_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "absl/functional/function_ref.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tapreid/core/types.h"
#include "tapreid/ingest/event_store.h"

namespace tapreid {

inline constexpr std::string_view kEventCsvHeader =
    "cardId,cardType,onDate,onMode,onRouteId,onStopId,offDate,offMode,"
    "offRouteId,offStopId";

// A malformed data row. `line` is the 1-based physical line in the source
// (the header is line 1).
struct RecordError {
  std::int64_t line = 0;
  std::string reason;

  friend bool operator==(const RecordError&, const RecordError&) = default;
};

// Streams rows from `source`, calling `on_event` for each well-formed row and
// `on_error` for each malformed one, in input order. Malformed rows never stop
// the stream. Returns an error only when the source itself is unusable: I/O
// failure (UnreadableSource) or a header lacking a required column.
absl::Status ParseEvents(std::istream& source,
                         absl::FunctionRef<void(TapEvent)> on_event,
                         absl::FunctionRef<void(const RecordError&)> on_error);

struct LoadResult {
  EventStore store;
  std::vector<RecordError> errors;
};

absl::StatusOr<LoadResult> LoadEvents(std::istream& source);

// Loads a CSV file, or every *.csv file of a directory (sorted by name) when
// `path` is a directory. Shards are concatenated before grouping.
absl::StatusOr<LoadResult> LoadEventsPath(const std::filesystem::path& path);

// Writes the header and one row per event, ordered by (cardId, onTime).
// Returns the number of data rows; fails with UnwritableSink on I/O error.
absl::StatusOr<size_t> WriteEvents(const EventStore& store, std::ostream& sink);
absl::StatusOr<size_t> WriteEventsFile(const EventStore& store,
                                       const std::filesystem::path& path);

// One CSV row without trailing newline.
std::string FormatEventRow(const TapEvent& event);

}  // namespace tapreid

#endif  // TAPREID_INGEST_CSV_H_
