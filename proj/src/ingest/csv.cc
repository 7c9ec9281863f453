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

#include "tapreid/ingest/csv.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <optional>

#include "absl/strings/str_cat.h"

namespace tapreid {
namespace {

enum Column {
  kCardId,
  kCardType,
  kOnDate,
  kOnMode,
  kOnRouteId,
  kOnStopId,
  kOffDate,
  kOffMode,
  kOffRouteId,
  kOffStopId,
  kColumnCount
};

constexpr std::array<std::string_view, kColumnCount> kColumnNames = {
    "cardId",  "cardType", "onDate",     "onMode",    "onRouteId",
    "onStopId", "offDate", "offMode", "offRouteId", "offStopId"};

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (;;) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
bool ParseInt(std::string_view text, T& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

struct RowParse {
  std::optional<TapEvent> event;
  std::string error;
};

RowParse ParseRow(const std::vector<std::string_view>& fields,
                  const std::array<size_t, kColumnCount>& index) {
  auto f = [&](Column c) { return fields[index[c]]; };
  RowParse out;
  TapEvent e;

  auto on_time = ParseTimestamp(f(kOnDate));
  if (!on_time.ok()) return {std::nullopt, "unparseable timestamp"};
  e.on_time = *on_time;

  bool off_empty = f(kOffDate).empty() && f(kOffMode).empty() &&
                   f(kOffRouteId).empty() && f(kOffStopId).empty();
  std::optional<Timestamp> off_time;
  if (!off_empty) {
    auto t = ParseTimestamp(f(kOffDate));
    if (!t.ok()) {
      if (f(kOffDate).empty()) return {std::nullopt, "partial off-side"};
      return {std::nullopt, "unparseable timestamp"};
    }
    off_time = *t;
  }

  if (!ParseInt(f(kCardId), e.card_id) || e.card_id == 0) {
    return {std::nullopt, "unparseable cardId"};
  }
  if (!ParseInt(f(kCardType), e.card_type) || e.card_type < 0 ||
      e.card_type > kMaxCardType) {
    return {std::nullopt, "cardType outside 0..127"};
  }
  if (!ParseInt(f(kOnMode), e.on_mode) || !ParseInt(f(kOnRouteId), e.on_route_id) ||
      !ParseInt(f(kOnStopId), e.on_stop_id)) {
    return {std::nullopt, "unparseable on-side field"};
  }
  if (off_time) {
    OffSide off{*off_time, 0, 0, 0};
    if (!ParseInt(f(kOffMode), off.mode) ||
        !ParseInt(f(kOffRouteId), off.route_id) ||
        !ParseInt(f(kOffStopId), off.stop_id)) {
      return {std::nullopt, "partial off-side"};
    }
    if (off.time < e.on_time) return {std::nullopt, "offDate precedes onDate"};
    e.off = off;
  }
  out.event = e;
  return out;
}

}  // namespace

absl::Status ParseEvents(std::istream& source,
                         absl::FunctionRef<void(TapEvent)> on_event,
                         absl::FunctionRef<void(const RecordError&)> on_error) {
  if (!source) return absl::UnavailableError("UnreadableSource: stream not open");
  std::string line;
  std::int64_t line_no = 0;
  std::array<size_t, kColumnCount> index{};
  size_t width = 0;
  bool have_header = false;
  std::vector<std::string_view> fields;

  while (std::getline(source, line)) {
    ++line_no;
    std::string_view text = line;
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (!have_header) {
      if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
      std::vector<std::string_view> names = SplitFields(text);
      for (size_t c = 0; c < kColumnCount; ++c) {
        auto it = std::find(names.begin(), names.end(), kColumnNames[c]);
        if (it == names.end()) {
          return absl::InvalidArgumentError(
              absl::StrCat("header is missing column '", std::string(kColumnNames[c]), "'"));
        }
        index[c] = static_cast<size_t>(it - names.begin());
      }
      width = names.size();
      have_header = true;
      continue;
    }
    if (text.empty()) continue;
    fields = SplitFields(text);
    if (fields.size() != width) {
      on_error({line_no, absl::StrCat("expected ", width, " fields, found ",
                                      fields.size())});
      continue;
    }
    RowParse row = ParseRow(fields, index);
    if (row.event) {
      on_event(std::move(*row.event));
    } else {
      on_error({line_no, std::move(row.error)});
    }
  }
  if (source.bad()) {
    return absl::DataLossError(
        absl::StrCat("UnreadableSource: read failed after line ", line_no));
  }
  if (!have_header) return absl::InvalidArgumentError("missing CSV header");
  return absl::OkStatus();
}

absl::StatusOr<LoadResult> LoadEvents(std::istream& source) {
  std::vector<TapEvent> events;
  LoadResult result;
  absl::Status status = ParseEvents(
      source, [&](TapEvent e) { events.push_back(std::move(e)); },
      [&](const RecordError& err) { result.errors.push_back(err); });
  if (!status.ok()) return status;
  result.store = BuildStore(std::move(events));
  return result;
}

absl::StatusOr<LoadResult> LoadEventsPath(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  std::vector<fs::path> files;
  if (fs::is_directory(path, ec)) {
    for (const auto& entry : fs::directory_iterator(path, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  std::vector<TapEvent> events;
  LoadResult result;
  for (const fs::path& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      return absl::NotFoundError(
          absl::StrCat("UnreadableSource: cannot open ", file.string()));
    }
    absl::Status status = ParseEvents(
        in, [&](TapEvent e) { events.push_back(std::move(e)); },
        [&](const RecordError& err) { result.errors.push_back(err); });
    if (!status.ok()) {
      return absl::Status(status.code(),
                          absl::StrCat(file.string(), ": ", status.message()));
    }
  }
  result.store = BuildStore(std::move(events));
  return result;
}

std::string FormatEventRow(const TapEvent& e) {
  std::string row = absl::StrCat(e.card_id, ",", e.card_type, ",",
                                 FormatTimestamp(e.on_time), ",", e.on_mode,
                                 ",", e.on_route_id, ",", e.on_stop_id, ",");
  if (e.off) {
    absl::StrAppend(&row, FormatTimestamp(e.off->time), ",", e.off->mode, ",",
                    e.off->route_id, ",", e.off->stop_id);
  } else {
    row += ",,,";
  }
  return row;
}

absl::StatusOr<size_t> WriteEvents(const EventStore& store, std::ostream& sink) {
  sink << kEventCsvHeader << '\n';
  size_t rows = 0;
  for (const CardEvents& card : store.cards()) {
    for (const TapEvent& e : card.events) {
      sink << FormatEventRow(e) << '\n';
      ++rows;
    }
  }
  sink.flush();
  if (!sink) return absl::DataLossError("UnwritableSink: write failed");
  return rows;
}

absl::StatusOr<size_t> WriteEventsFile(const EventStore& store,
                                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("UnwritableSink: cannot open ", path.string()));
  }
  return WriteEvents(store, out);
}

}  // namespace tapreid
