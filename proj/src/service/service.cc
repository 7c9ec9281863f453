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

#include "tapreid/service/service.h"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "tapreid/reid/audit.h"

namespace tapreid {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view Strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    size_t pos = s.find(sep);
    out.push_back(s.substr(0, pos));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

template <typename T>
bool ParseNumber(std::string_view s, T* out) {
  s = Strip(s);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
}

absl::StatusOr<json> ParseObject(std::string_view text, bool allow_empty) {
  if (allow_empty && Strip(text).empty()) return json::object();
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return absl::InvalidArgumentError("request body is not valid JSON");
  if (!j.is_object()) return absl::InvalidArgumentError("request body must be a JSON object");
  return j;
}

absl::StatusOr<int> ParseInt(std::string_view text, std::string_view what) {
  int v = 0;
  if (!ParseNumber(text, &v)) {
    return absl::InvalidArgumentError(
        absl::StrCat(std::string(what), " is not an integer: '", std::string(text), "'"));
  }
  return v;
}

// A single date or an inclusive from/to pair; All() when none is given.
absl::StatusOr<DateRange> PeriodFrom(const std::optional<std::string>& date,
                                     const std::optional<std::string>& from,
                                     const std::optional<std::string>& to) {
  DateRange period = DateRange::All();
  if (date) {
    auto d = ParseDate(*date);
    if (!d.ok()) return d.status();
    return DateRange::SingleDay(*d);
  }
  if (from) {
    auto d = ParseDate(*from);
    if (!d.ok()) return d.status();
    period.first = *d;
  }
  if (to) {
    auto d = ParseDate(*to);
    if (!d.ok()) return d.status();
    period.last = *d;
  }
  if (period.empty()) return absl::InvalidArgumentError("period is empty");
  return period;
}

std::optional<std::string> Param(const QueryParams& params, const char* key) {
  auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> JsonString(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return j.at(key).get<std::string>();
}

// FNV-1a, stable across runs and platforms.
std::uint64_t StableHash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string_view CodeName(absl::StatusCode code) {
  switch (code) {
    case absl::StatusCode::kInvalidArgument:
      return "InvalidArgument";
    case absl::StatusCode::kNotFound:
      return "NotFound";
    case absl::StatusCode::kFailedPrecondition:
      return "FailedPrecondition";
    case absl::StatusCode::kResourceExhausted:
      return "ResourceExhausted";
    case absl::StatusCode::kUnavailable:
      return "Unavailable";
    default:
      return "Internal";
  }
}

int HttpStatus(absl::StatusCode code) {
  switch (code) {
    case absl::StatusCode::kInvalidArgument:
      return 400;
    case absl::StatusCode::kNotFound:
      return 404;
    case absl::StatusCode::kFailedPrecondition:
      return 409;
    case absl::StatusCode::kResourceExhausted:
      return 413;
    case absl::StatusCode::kUnavailable:
      return 503;
    default:
      return 500;
  }
}

HttpResponse Ok(const ordered_json& j) { return {200, j.dump()}; }

absl::StatusOr<CardId> ParseCardId(std::string_view text) {
  CardId id = 0;
  if (!ParseNumber(text, &id)) {
    return absl::InvalidArgumentError(absl::StrCat("bad card id '", std::string(text), "'"));
  }
  return id;
}

}  // namespace

absl::Status ServiceConfig::Validate() const {
  if (max_candidate_preview < 1) {
    return absl::InvalidArgumentError("InvalidConfig: maxCandidatePreview must be >= 1");
  }
  if (request_timeout_seconds < 1) {
    return absl::InvalidArgumentError("InvalidConfig: requestTimeoutSeconds must be >= 1");
  }
  if (auto bind = SplitBindAddress(bind_address); !bind.ok()) {
    return absl::InvalidArgumentError(absl::StrCat("InvalidConfig: ", bind.status().message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<ServiceConfig> ParseServiceConfig(std::string_view json_text) {
  auto j = ParseObject(json_text, false);
  if (!j.ok()) return absl::InvalidArgumentError(absl::StrCat("InvalidConfig: ", j.status().message()));
  ServiceConfig config;
  try {
    config.data_path = j->value("dataPath", config.data_path);
    config.bind_address = j->value("bindAddress", config.bind_address);
    config.max_candidate_preview = j->value("maxCandidatePreview", config.max_candidate_preview);
    config.request_timeout_seconds =
        j->value("requestTimeoutSeconds", config.request_timeout_seconds);
    config.threads = j->value("threads", config.threads);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("InvalidConfig: ", e.what()));
  }
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  return config;
}

absl::StatusOr<std::pair<std::string, int>> SplitBindAddress(std::string_view address) {
  std::string host = "127.0.0.1";
  std::string_view port_text = address;
  if (size_t colon = address.rfind(':'); colon != std::string_view::npos) {
    host = std::string(address.substr(0, colon));
    port_text = address.substr(colon + 1);
  }
  int port = 0;
  if (host.empty() || !ParseNumber(port_text, &port) || port < 0 || port > 65535) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad bind address '", std::string(address), "'"));
  }
  return std::make_pair(host, port);
}

absl::StatusOr<std::vector<int>> ParseCardinalities(std::string_view text) {
  std::vector<int> out;
  if (size_t dots = text.find(".."); dots != std::string_view::npos) {
    auto lo = ParseInt(text.substr(0, dots), "n");
    auto hi = ParseInt(text.substr(dots + 2), "n");
    if (!lo.ok()) return lo.status();
    if (!hi.ok()) return hi.status();
    for (int n = *lo; n <= *hi; ++n) out.push_back(n);
  } else {
    for (std::string_view part : Split(text, ',')) {
      auto n = ParseInt(Strip(part), "n");
      if (!n.ok()) return n.status();
      out.push_back(*n);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty() || out.front() < 1) {
    return absl::InvalidArgumentError("cardinalities must be >= 1");
  }
  return out;
}

absl::StatusOr<std::vector<bool>> ParseLocationFlags(std::string_view text) {
  if (text == "both") return std::vector<bool>{false, true};
  if (text == "with" || text == "true") return std::vector<bool>{true};
  if (text == "without" || text == "false") return std::vector<bool>{false};
  return absl::InvalidArgumentError(
      absl::StrCat("location must be both, with or without, got '", std::string(text), "'"));
}

absl::StatusOr<std::vector<TimeGranularity>> ParseGranularities(std::string_view text) {
  if (text == "all") return std::vector<TimeGranularity>(kAllGranularities.begin(),
                                                         kAllGranularities.end());
  std::vector<TimeGranularity> out;
  for (std::string_view part : Split(text, ',')) {
    auto g = ParseGranularity(Strip(part));
    if (!g.ok()) return g.status();
    if (std::find(out.begin(), out.end(), *g) == out.end()) out.push_back(*g);
  }
  return out;
}

absl::StatusOr<std::set<CardType>> ParseCardTypeList(std::string_view text) {
  std::set<CardType> out;
  if (Strip(text).empty()) return out;
  for (std::string_view part : Split(text, ',')) {
    auto t = ParseInt(Strip(part), "card type");
    if (!t.ok()) return t.status();
    if (*t < 0 || *t > kMaxCardType) return absl::InvalidArgumentError("card type out of range");
    out.insert(*t);
  }
  return out;
}

absl::StatusOr<UnicityParams> ParseUnicityRequest(std::string_view json_text) {
  auto parsed = ParseObject(json_text, true);
  if (!parsed.ok()) return parsed.status();
  const json& j = *parsed;
  UnicityParams p;
  try {
    auto list_text = [&](const char* key, std::string fallback) {
      if (!j.contains(key)) return fallback;
      const json& v = j.at(key);
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "with" : "without");
      if (v.is_number_integer()) return absl::StrCat(v.get<int>());
      std::string joined;
      for (const json& item : v) {
        if (!joined.empty()) joined += ",";
        joined += item.is_string() ? item.get<std::string>() : absl::StrCat(item.get<int>());
      }
      return joined;
    };
    auto g = ParseGranularities(list_text("granularities", "all"));
    if (!g.ok()) return g.status();
    p.granularities = *g;
    auto loc = ParseLocationFlags(list_text("location", "both"));
    if (!loc.ok()) return loc.status();
    p.location_flags = *loc;
    auto n = ParseCardinalities(list_text("n", "1..5"));
    if (!n.ok()) return n.status();
    p.cardinalities = *n;
    auto kind = ParseEventKind(j.value("kind", std::string("on")));
    if (!kind.ok()) return kind.status();
    p.kind = *kind;
    p.seed = j.value("seed", std::uint64_t{0});
    auto period = PeriodFrom(std::nullopt, JsonString(j, "from"), JsonString(j, "to"));
    if (!period.ok()) return period.status();
    p.period = *period;
    p.exclude_short = j.value("excludeShort", false);
    p.min_sub_events = j.value("minSubEvents", 1);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(e.what());
  }
  if (absl::Status s = p.Validate(); !s.ok()) return s;
  return p;
}

std::string UnicityReportJson(const UnicityReport& report) {
  ordered_json rows = ordered_json::array();
  for (const UnicityRow& r : report.rows) {
    rows.push_back({{"granularity", GranularityName(r.granularity)},
                    {"location", r.location},
                    {"n", r.n},
                    {"cardsConsidered", r.cards_considered},
                    {"cardsUnique", r.cards_unique},
                    {"percentUnique", std::round(r.percent_unique() * 1e4) / 1e4}});
  }
  return ordered_json{{"rows", rows}}.dump();
}

absl::StatusOr<ReleaseRequest> ParseReleaseRequest(std::string_view json_text) {
  auto parsed = ParseObject(json_text, true);
  if (!parsed.ok()) return parsed.status();
  const json& j = *parsed;
  ReleaseRequest r;
  try {
    r.options.block_minutes = j.value("blockMinutes", kDefaultBlockMinutes);
    auto period = PeriodFrom(std::nullopt, JsonString(j, "from"), JsonString(j, "to"));
    if (!period.ok()) return period.status();
    r.options.period = *period;
    if (j.contains("stops")) r.options.stops = j.at("stops").get<std::vector<StopId>>();
    r.params.epsilon = j.value("epsilon", 1.0);
    r.params.seed = j.value("seed", std::uint64_t{0});
    auto m = ParseMechanism(j.value("mechanism", std::string("geometric")));
    auto a = ParseAdjacency(j.value("adjacency", std::string("eventLevel")));
    auto pp = ParsePostProcess(j.value("postProcess", std::string("none")));
    if (!m.ok()) return m.status();
    if (!a.ok()) return a.status();
    if (!pp.ok()) return pp.status();
    r.params.mechanism = *m;
    r.params.adjacency = *a;
    r.params.post_process = *pp;
    r.params.max_contribution = j.value("maxContribution", 1);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(e.what());
  }
  if (absl::Status s = r.params.Validate(); !s.ok()) return s;
  return r;
}

std::string CandidateSetJson(const EventStore& store, const CandidateSet& set, int limit) {
  ordered_json preview = ordered_json::array();
  for (size_t i = 0; i < set.cards.size() && i < static_cast<size_t>(limit); ++i) {
    const CardEvents* card = store.Find(set.cards[i]);
    if (card == nullptr) continue;
    preview.push_back({{"cardId", card->card_id},
                       {"cardType", ModalCardType(card->events)},
                       {"firstSeen", FormatTimestamp(FirstSeen(*card))},
                       {"lastSeen", FormatTimestamp(LastSeen(*card))},
                       {"eventCount", card->events.size()}});
  }
  ordered_json j;
  j["total"] = set.size();
  j["preview"] = std::move(preview);
  j["truncated"] = set.size() > static_cast<size_t>(limit);
  return j.dump();
}

std::string TimelineJson(const CardTimeline& t) {
  ordered_json events = ordered_json::array();
  for (const TapEvent& e : t.events) {
    ordered_json row = {{"cardType", e.card_type},
                        {"onTime", FormatTimestamp(e.on_time)},
                        {"onMode", e.on_mode},
                        {"onRouteId", e.on_route_id},
                        {"onStopId", e.on_stop_id}};
    if (e.off) {
      row["offTime"] = FormatTimestamp(e.off->time);
      row["offMode"] = e.off->mode;
      row["offRouteId"] = e.off->route_id;
      row["offStopId"] = e.off->stop_id;
    }
    events.push_back(std::move(row));
  }
  ordered_json j;
  j["cardId"] = t.card_id;
  j["cardType"] = t.card_type;
  j["firstSeen"] = FormatTimestamp(t.first_seen);
  j["lastSeen"] = FormatTimestamp(t.last_seen);
  j["eventCount"] = t.events.size();
  j["events"] = std::move(events);
  return j.dump();
}

HttpResponse ErrorResponse(const absl::Status& status) {
  std::string message(status.message());
  std::string code(CodeName(status.code()));
  // Messages of the form "Name: detail" carry a specific error name.
  if (size_t colon = message.find(':'); colon != std::string::npos && colon > 0) {
    std::string_view head(message.data(), colon);
    if (std::all_of(head.begin(), head.end(), [](char c) { return std::isalnum(c); }) &&
        std::isupper(static_cast<unsigned char>(head[0]))) {
      code = std::string(head);
    }
  }
  return {HttpStatus(status.code()), ordered_json{{"error", message}, {"code", code}}.dump()};
}

Service::Service(EventStore store, ServiceConfig config)
    : store_(std::move(store)),
      config_(std::move(config)),
      engine_(store_),
      cotravel_(store_) {}

Service::~Service() { WaitForJobs(); }

HttpResponse Service::Handle(std::string_view method, std::string_view path,
                             const QueryParams& params, std::string_view body) {
  std::vector<std::string_view> parts = Split(path, '/');
  parts.erase(std::remove(parts.begin(), parts.end(), std::string_view()), parts.end());
  auto route = [&](std::string_view m, std::initializer_list<std::string_view> pattern) {
    if (method != m || parts.size() != pattern.size()) return false;
    size_t i = 0;
    for (std::string_view p : pattern) {
      if (p != "*" && p != parts[i]) return false;
      ++i;
    }
    return true;
  };
  if (route("POST", {"query"})) return Query(body);
  if (route("GET", {"cards", "*", "timeline"})) return Timeline(parts[1]);
  if (route("GET", {"cards", "*", "cotravellers"})) return CoTravellers(parts[1], params);
  if (route("POST", {"unicity"})) return SubmitUnicity(body);
  if (route("GET", {"jobs", "*"})) return Job(parts[1]);
  if (route("GET", {"audit", "gaps"})) return AuditGaps(params);
  if (route("GET", {"audit", "types"})) return AuditTypes(params);
  if (route("POST", {"release", "aggregate"})) return Release(body);
  return ErrorResponse(absl::NotFoundError(
      absl::StrCat("NoRoute: ", std::string(method), " ", std::string(path))));
}

HttpResponse Service::Query(std::string_view body) const {
  auto constraints = ParseConstraints(body);
  if (!constraints.ok()) return ErrorResponse(constraints.status());
  auto set = engine_.Evaluate(*std::move(constraints));
  if (!set.ok()) return ErrorResponse(set.status());
  return {200, CandidateSetJson(store_, *set, config_.max_candidate_preview)};
}

HttpResponse Service::Timeline(std::string_view card) const {
  auto id = ParseCardId(card);
  if (!id.ok()) return ErrorResponse(id.status());
  auto t = GetCardTimeline(store_, *id);
  if (!t.ok()) return ErrorResponse(t.status());
  return {200, TimelineJson(*t)};
}

HttpResponse Service::CoTravellers(std::string_view card, const QueryParams& params) const {
  auto id = ParseCardId(card);
  if (!id.ok()) return ErrorResponse(id.status());
  int window = kDefaultCoTravelWindowSeconds;
  if (auto w = Param(params, "window")) {
    auto parsed = ParseInt(*w, "window");
    if (!parsed.ok()) return ErrorResponse(parsed.status());
    window = *parsed;
  }
  auto period = PeriodFrom(Param(params, "date"), Param(params, "from"), Param(params, "to"));
  if (!period.ok()) return ErrorResponse(period.status());
  auto excluded = ParseCardTypeList(Param(params, "excludeTypes").value_or(""));
  if (!excluded.ok()) return ErrorResponse(excluded.status());
  auto matches = cotravel_.CoTravellers(*id, window, *period);
  if (!matches.ok()) return ErrorResponse(matches.status());
  std::vector<CoTravelMatch> kept = ExcludeCardTypes(*std::move(matches), *excluded);
  ordered_json rows = ordered_json::array();
  for (const CoTravelMatch& m : kept) {
    ordered_json pairs = ordered_json::array();
    for (const CoTravelPair& p : m.event_pairs) {
      pairs.push_back({{"ownTime", FormatTimestamp(p.own_time)},
                       {"otherTime", FormatTimestamp(p.other_time)},
                       {"stopId", p.stop_id}});
    }
    rows.push_back({{"otherCardId", m.other_card_id},
                    {"otherCardType", m.other_card_type},
                    {"occurrences", m.occurrences},
                    {"eventPairs", std::move(pairs)}});
  }
  ordered_json j;
  j["cardId"] = *id;
  j["window"] = window;
  j["total"] = kept.size();
  j["matches"] = std::move(rows);
  return Ok(j);
}

HttpResponse Service::SubmitUnicity(std::string_view body) {
  auto params = ParseUnicityRequest(body);
  if (!params.ok()) return ErrorResponse(params.status());
  params->threads = config_.threads;

  ordered_json canonical;
  std::vector<std::string> granularities;
  for (TimeGranularity g : params->granularities) {
    granularities.emplace_back(GranularityName(g));
  }
  canonical["granularities"] = granularities;
  canonical["location"] = std::vector<bool>(params->location_flags.begin(),
                                            params->location_flags.end());
  canonical["n"] = params->cardinalities;
  canonical["kind"] = EventKindName(params->kind);
  canonical["seed"] = params->seed;
  canonical["from"] = FormatDate(params->period.first);
  canonical["to"] = FormatDate(params->period.last);
  canonical["excludeShort"] = params->exclude_short;
  canonical["minSubEvents"] = params->min_sub_events;
  std::string id = absl::StrFormat("u%016x", StableHash(canonical.dump()));

  std::lock_guard<std::mutex> lock(mu_);
  if (!jobs_.count(id)) {
    auto state = std::make_shared<JobState>();
    jobs_[id] = state;
    workers_.emplace_back([this, state, p = *params] {
      std::string result = UnicityReportJson(RunUnicity(store_, p));
      std::lock_guard<std::mutex> lock(mu_);
      state->result = std::move(result);
      state->status = "done";
    });
  }
  return Ok(ordered_json{{"jobId", id}, {"status", jobs_[id]->status}});
}

HttpResponse Service::Job(std::string_view id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = jobs_.find(std::string(id));
  if (it == jobs_.end()) {
    return ErrorResponse(absl::NotFoundError(absl::StrCat("UnknownJob: ", std::string(id))));
  }
  ordered_json j;
  j["jobId"] = it->first;
  j["status"] = it->second->status;
  if (it->second->status == "done") {
    j["report"] = ordered_json::parse(it->second->result);
  }
  return Ok(j);
}

HttpResponse Service::AuditGaps(const QueryParams& params) const {
  int min_gap = 1;
  if (auto g = Param(params, "minGap")) {
    auto parsed = ParseInt(*g, "minGap");
    if (!parsed.ok()) return ErrorResponse(parsed.status());
    min_gap = *parsed;
  }
  if (min_gap < 1) return ErrorResponse(absl::InvalidArgumentError("minGap must be >= 1"));
  auto gaps = IdGapScan(store_, static_cast<std::uint64_t>(min_gap));
  if (!gaps.ok()) return ErrorResponse(gaps.status());
  ordered_json rows = ordered_json::array();
  std::uint64_t missing = 0;
  for (const GapRecord& g : *gaps) {
    rows.push_back({{"lastUsedId", g.last_used_id},
                    {"nextUsedId", g.next_used_id},
                    {"missingCount", g.missing_count}});
    missing += g.missing_count;
  }
  return Ok(ordered_json{{"minGap", min_gap},
                         {"totalMissing", missing},
                         {"gaps", std::move(rows)}});
}

HttpResponse Service::AuditTypes(const QueryParams& params) const {
  int threshold = static_cast<int>(kDefaultSensitiveThreshold);
  if (auto t = Param(params, "threshold")) {
    auto parsed = ParseInt(*t, "threshold");
    if (!parsed.ok()) return ErrorResponse(parsed.status());
    threshold = *parsed;
  }
  ordered_json rows = ordered_json::array();
  for (const CensusRow& r : CardTypeCensus(store_, threshold)) {
    rows.push_back({{"cardType", r.type},
                    {"cardCount", r.card_count},
                    {"eventCount", r.event_count},
                    {"sensitive", r.sensitive}});
  }
  return Ok(ordered_json{{"threshold", threshold}, {"types", std::move(rows)}});
}

HttpResponse Service::Release(std::string_view body) const {
  auto request = ParseReleaseRequest(body);
  if (!request.ok()) return ErrorResponse(request.status());
  request->options.threads = config_.threads;
  auto table = ReleaseAggregate(store_, request->options, request->params);
  if (!table.ok()) return ErrorResponse(table.status());
  ordered_json cells = ordered_json::array();
  for (const AggregateCell& c : table->cells) {
    cells.push_back({{"stopId", c.stop_id},
                     {"blockStart", FormatTimestamp(c.block_start)},
                     {"direction", SideName(c.direction)},
                     {"count", c.count}});
  }
  ordered_json j;
  j["metadata"] = ordered_json::parse(ReleaseMetadataJson(*table, request->params));
  j["cells"] = std::move(cells);
  return Ok(j);
}

void Service::WaitForJobs() {
  std::vector<std::thread> running;
  {
    std::lock_guard<std::mutex> lock(mu_);
    running.swap(workers_);
  }
  for (std::thread& t : running) t.join();
}

}  // namespace tapreid
