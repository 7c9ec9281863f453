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

// Read-only JSON API over one loaded event store.
//
// Routes:
//   POST /query                         {"constraints":[...]}
//   GET  /cards/{id}/timeline
//   GET  /cards/{id}/cotravellers       ?window=5&date=YYYY-MM-DD&from=&to=&excludeTypes=2,1
//   POST /unicity                       unicity parameters, answers {"jobId"}
//   GET  /jobs/{id}
//   GET  /audit/gaps                    ?minGap=1
//   GET  /audit/types                   ?threshold=1000
//   POST /release/aggregate             aggregation and privacy parameters
//
// Errors are {"error": message, "code": name}.

#ifndef TAPREID_SERVICE_SERVICE_H_
#define TAPREID_SERVICE_SERVICE_H_

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tapreid/cotravel/cotravel.h"
#include "tapreid/ingest/event_store.h"
#include "tapreid/reid/query.h"
#include "tapreid/release/release.h"
#include "tapreid/unicity/unicity.h"

namespace tapreid {

struct ServiceConfig {
  std::string data_path;
  std::string bind_address = "127.0.0.1:8080";
  int max_candidate_preview = 50;
  int request_timeout_seconds = 30;
  int threads = 0;

  absl::Status Validate() const;
};

// {"dataPath", "bindAddress", "maxCandidatePreview", "requestTimeoutSeconds",
//  "threads"}; absent keys keep their defaults.
absl::StatusOr<ServiceConfig> ParseServiceConfig(std::string_view json_text);

// Splits "host:port". A bare port binds 127.0.0.1.
absl::StatusOr<std::pair<std::string, int>> SplitBindAddress(std::string_view address);

// Parameter parsing shared with the command line.
// "1..5", "1,3,5" or "2".
absl::StatusOr<std::vector<int>> ParseCardinalities(std::string_view text);
// "both", "with"/"true", "without"/"false".
absl::StatusOr<std::vector<bool>> ParseLocationFlags(std::string_view text);
// Comma-separated granularity names, or "all".
absl::StatusOr<std::vector<TimeGranularity>> ParseGranularities(std::string_view text);
// Comma-separated card type codes.
absl::StatusOr<std::set<CardType>> ParseCardTypeList(std::string_view text);

// Unicity parameters from a JSON object:
//   {"granularities": "all" | [names] | "a,b", "location": "both" | bool,
//    "n": "1..5" | [ints], "kind": "on", "seed": 0, "from": date, "to": date,
//    "excludeShort": false, "minSubEvents": 1}
absl::StatusOr<UnicityParams> ParseUnicityRequest(std::string_view json_text);
std::string UnicityReportJson(const UnicityReport& report);

// Aggregation and privacy parameters from a JSON object:
//   {"blockMinutes": 15, "from": date, "to": date, "stops": [ints],
//    "epsilon": 1.0, "seed": 0, "mechanism": "geometric",
//    "adjacency": "eventLevel", "maxContribution": 1, "postProcess": "none"}
struct ReleaseRequest {
  AggregateOptions options;
  PrivacyParams params;
};
absl::StatusOr<ReleaseRequest> ParseReleaseRequest(std::string_view json_text);

// Candidate set summary: exact total and a preview of the first `limit`
// cards with type, first/last seen and event count.
std::string CandidateSetJson(const EventStore& store, const CandidateSet& set,
                             int limit);
std::string TimelineJson(const CardTimeline& timeline);

struct HttpResponse {
  int status = 200;
  std::string body;
};

HttpResponse ErrorResponse(const absl::Status& status);

using QueryParams = std::map<std::string, std::string>;

class Service {
 public:
  Service(EventStore store, ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  const EventStore& store() const { return store_; }
  const ServiceConfig& config() const { return config_; }

  // Routes one request. `path` excludes the query string.
  HttpResponse Handle(std::string_view method, std::string_view path,
                      const QueryParams& params, std::string_view body);

  HttpResponse Query(std::string_view body) const;
  HttpResponse Timeline(std::string_view card) const;
  HttpResponse CoTravellers(std::string_view card, const QueryParams& params) const;
  // Identical requests share one job and one id.
  HttpResponse SubmitUnicity(std::string_view body);
  HttpResponse Job(std::string_view id) const;
  HttpResponse AuditGaps(const QueryParams& params) const;
  HttpResponse AuditTypes(const QueryParams& params) const;
  HttpResponse Release(std::string_view body) const;

  // Blocks until every submitted job has finished.
  void WaitForJobs();

 private:
  struct JobState {
    std::string status = "running";
    std::string result;  // report JSON or error message
  };

  EventStore store_;
  ServiceConfig config_;
  QueryEngine engine_;
  CoTravelIndex cotravel_;

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<JobState>> jobs_;
  std::vector<std::thread> workers_;
};

// Serves `service` over HTTP until Stop() is called.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Binds; port 0 picks a free port. Returns the bound port.
  absl::StatusOr<int> Bind(const std::string& host, int port);
  // Accept loop; returns after Stop().
  void Run();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tapreid

#endif  // TAPREID_SERVICE_SERVICE_H_
