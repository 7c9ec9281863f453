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

#include "tapreid/cli/cli.h"

#include <pthread.h>
#include <signal.h>

#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "tapreid/cotravel/cotravel.h"
#include "tapreid/ingest/csv.h"
#include "tapreid/ingest/synthetic.h"
#include "tapreid/reid/audit.h"
#include "tapreid/reid/query.h"
#include "tapreid/release/release.h"
#include "tapreid/service/service.h"
#include "tapreid/unicity/unicity.h"

namespace tapreid {
namespace {

// A failed step and the exit code it maps to.
struct Failure {
  int code;
  std::string message;
};

using Outcome = std::optional<Failure>;

Outcome Usage(const absl::Status& s) { return Failure{kExitUsage, std::string(s.message())}; }
Outcome Runtime(const absl::Status& s) {
  return Failure{kExitRuntimeError, std::string(s.message())};
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("UnreadableSource: ", path));
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

Outcome Emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return std::nullopt;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  file << text;
  file.close();
  if (!file) return Failure{kExitRuntimeError, absl::StrCat("UnwritableSink: ", path)};
  return std::nullopt;
}

absl::StatusOr<EventStore> Load(const std::string& path, std::ostream& err) {
  auto loaded = LoadEventsPath(path);
  if (!loaded.ok()) return loaded.status();
  if (!loaded->errors.empty()) {
    err << "warning: skipped " << loaded->errors.size() << " malformed rows in " << path
        << " (first at line " << loaded->errors.front().line << ": "
        << loaded->errors.front().reason << ")\n";
  }
  return std::move(loaded->store);
}

absl::StatusOr<DateRange> PeriodFlags(const std::string& date, const std::string& from,
                                      const std::string& to) {
  DateRange period = DateRange::All();
  if (!date.empty()) {
    auto d = ParseDate(date);
    if (!d.ok()) return d.status();
    return DateRange::SingleDay(*d);
  }
  if (!from.empty()) {
    auto d = ParseDate(from);
    if (!d.ok()) return d.status();
    period.first = *d;
  }
  if (!to.empty()) {
    auto d = ParseDate(to);
    if (!d.ok()) return d.status();
    period.last = *d;
  }
  if (period.empty()) return absl::InvalidArgumentError("period is empty");
  return period;
}

struct Common {
  int threads = 0;
  std::string in;
  std::string out;
};

struct SynthFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
};

Outcome RunSynth(const Common& c, const SynthFlags& f, std::ostream& out) {
  auto text = ReadFile(f.config);
  if (!text.ok()) return Runtime(text.status());
  auto config = ParsePopulationConfig(*text);
  if (!config.ok()) return Usage(config.status());
  if (f.seed) config->seed = *f.seed;
  auto store = GeneratePopulation(*config, c.threads);
  if (!store.ok()) return Usage(store.status());
  std::ostringstream csv;
  if (auto n = WriteEvents(*store, csv); !n.ok()) return Runtime(n.status());
  return Emit(c.out, csv.str(), out);
}

Outcome RunIngest(const Common& c, const std::string& errors_path, std::ostream& out,
                  std::ostream& err) {
  auto loaded = LoadEventsPath(c.in);
  if (!loaded.ok()) return Runtime(loaded.status());
  std::ostringstream csv;
  if (auto n = WriteEvents(loaded->store, csv); !n.ok()) return Runtime(n.status());
  err << "loaded " << loaded->store.event_count() << " events for "
      << loaded->store.card_count() << " cards; rejected " << loaded->errors.size()
      << " rows\n";
  if (!errors_path.empty()) {
    std::string report = "line,reason\n";
    for (const RecordError& e : loaded->errors) {
      absl::StrAppend(&report, e.line, ",\"", e.reason, "\"\n");
    }
    if (auto f = Emit(errors_path, report, out)) return f;
  }
  return Emit(c.out, csv.str(), out);
}

struct UnicityFlags {
  std::string granularity = "all";
  std::string n = "1..5";
  std::string location = "both";
  std::string kind = "on";
  std::uint64_t seed = 0;
  std::string from, to;
  bool exclude_short = false;
  int min_sub_events = 1;
  std::string format = "csv";
};

Outcome RunUnicityCommand(const Common& c, const UnicityFlags& f, std::ostream& out,
                          std::ostream& err) {
  UnicityParams p;
  auto g = ParseGranularities(f.granularity);
  if (!g.ok()) return Usage(g.status());
  auto n = ParseCardinalities(f.n);
  if (!n.ok()) return Usage(n.status());
  auto loc = ParseLocationFlags(f.location);
  if (!loc.ok()) return Usage(loc.status());
  auto kind = ParseEventKind(f.kind);
  if (!kind.ok()) return Usage(kind.status());
  auto period = PeriodFlags("", f.from, f.to);
  if (!period.ok()) return Usage(period.status());
  p.granularities = *g;
  p.cardinalities = *n;
  p.location_flags = *loc;
  p.kind = *kind;
  p.seed = f.seed;
  p.period = *period;
  p.exclude_short = f.exclude_short;
  p.min_sub_events = f.min_sub_events;
  p.threads = c.threads;
  if (absl::Status s = p.Validate(); !s.ok()) return Usage(s);
  auto store = Load(c.in, err);
  if (!store.ok()) return Runtime(store.status());
  UnicityReport report = RunUnicity(*store, p);
  return Emit(c.out, f.format == "json" ? UnicityReportJson(report) + "\n" : report.ToCsv(),
              out);
}

struct CoTravelFlags {
  CardId card = 0;
  int window = kDefaultCoTravelWindowSeconds;
  std::string date, from, to;
  std::string exclude_types;
};

Outcome RunCoTravelCommand(const Common& c, const CoTravelFlags& f, std::ostream& out,
                           std::ostream& err) {
  auto period = PeriodFlags(f.date, f.from, f.to);
  if (!period.ok()) return Usage(period.status());
  auto excluded = ParseCardTypeList(f.exclude_types);
  if (!excluded.ok()) return Usage(excluded.status());
  if (f.window < 0) return Usage(absl::InvalidArgumentError("window must be >= 0"));
  auto store = Load(c.in, err);
  if (!store.ok()) return Runtime(store.status());
  auto matches = CoTravellers(*store, f.card, f.window, *period);
  if (!matches.ok()) return Runtime(matches.status());
  return Emit(c.out, CoTravelCsv(ExcludeCardTypes(*std::move(matches), *excluded)), out);
}

struct QueryFlags {
  std::string constraints;
  std::string format = "json";
  int preview = 50;
};

Outcome RunQueryCommand(const Common& c, const QueryFlags& f, std::ostream& out,
                        std::ostream& err) {
  auto text = ReadFile(f.constraints);
  if (!text.ok()) return Runtime(text.status());
  auto constraints = ParseConstraints(*text);
  if (!constraints.ok()) return Usage(constraints.status());
  if (f.preview < 1) return Usage(absl::InvalidArgumentError("preview must be >= 1"));
  auto store = Load(c.in, err);
  if (!store.ok()) return Runtime(store.status());
  QueryEngine engine(*store);
  auto set = engine.Evaluate(*std::move(constraints));
  if (!set.ok()) return Usage(set.status());
  if (f.format == "csv") {
    std::string csv = "cardId,cardType,firstSeen,lastSeen,eventCount\n";
    for (CardId id : set->cards) {
      const CardEvents* card = store->Find(id);
      absl::StrAppend(&csv, id, ",", ModalCardType(card->events), ",",
                      FormatTimestamp(FirstSeen(*card)), ",",
                      FormatTimestamp(LastSeen(*card)), ",", card->events.size(), "\n");
    }
    return Emit(c.out, csv, out);
  }
  return Emit(c.out, CandidateSetJson(*store, *set, f.preview) + "\n", out);
}

struct ReleaseFlags {
  int block = kDefaultBlockMinutes;
  std::string from, to;
  double epsilon = 1.0;
  std::uint64_t seed = 0;
  std::string mechanism = "geometric";
  std::string adjacency = "eventLevel";
  int max_contribution = 1;
  std::string post_process = "none";
  bool exact = false;
  std::string metadata;
};

Outcome RunReleaseCommand(const Common& c, const ReleaseFlags& f, std::ostream& out,
                          std::ostream& err) {
  auto period = PeriodFlags("", f.from, f.to);
  if (!period.ok()) return Usage(period.status());
  PrivacyParams p;
  auto m = ParseMechanism(f.mechanism);
  if (!m.ok()) return Usage(m.status());
  auto a = ParseAdjacency(f.adjacency);
  if (!a.ok()) return Usage(a.status());
  auto pp = ParsePostProcess(f.post_process);
  if (!pp.ok()) return Usage(pp.status());
  p.epsilon = f.epsilon;
  p.seed = f.seed;
  p.mechanism = *m;
  p.adjacency = *a;
  p.post_process = *pp;
  p.max_contribution = f.max_contribution;
  if (absl::Status s = p.Validate(); !s.ok()) return Usage(s);
  if (f.block <= 0 || 60 % f.block != 0) {
    return Usage(absl::InvalidArgumentError(absl::StrCat("InvalidBlock: ", f.block)));
  }
  auto store = Load(c.in, err);
  if (!store.ok()) return Runtime(store.status());
  AggregateOptions options;
  options.block_minutes = f.block;
  options.period = *period;
  options.threads = c.threads;
  absl::StatusOr<AggregateTable> table =
      f.exact ? AggregateCounts(*store, options) : ReleaseAggregate(*store, options, p);
  if (!table.ok()) return Runtime(table.status());
  if (!f.metadata.empty()) {
    std::optional<PrivacyParams> published;
    if (!f.exact) published = p;
    if (auto fail = Emit(f.metadata, ReleaseMetadataJson(*table, published), out)) return fail;
  }
  return Emit(c.out, AggregateCsv(*table), out);
}

struct ServeFlags {
  std::string config;
  std::string data;
  std::string bind;
  int preview = 0;
  int timeout = 0;
};

Outcome RunServe(const Common& c, const ServeFlags& f, std::ostream& err) {
  ServiceConfig config;
  if (!f.config.empty()) {
    auto text = ReadFile(f.config);
    if (!text.ok()) return Runtime(text.status());
    auto parsed = ParseServiceConfig(*text);
    if (!parsed.ok()) return Usage(parsed.status());
    config = *parsed;
  }
  if (!f.data.empty()) config.data_path = f.data;
  if (!f.bind.empty()) config.bind_address = f.bind;
  if (f.preview > 0) config.max_candidate_preview = f.preview;
  if (f.timeout > 0) config.request_timeout_seconds = f.timeout;
  if (c.threads > 0) config.threads = c.threads;
  if (config.data_path.empty()) {
    return Usage(absl::InvalidArgumentError("InvalidConfig: dataPath is required"));
  }
  if (absl::Status s = config.Validate(); !s.ok()) return Usage(s);
  auto bind = SplitBindAddress(config.bind_address);
  auto store = Load(config.data_path, err);
  if (!store.ok()) return Runtime(store.status());

  // Signals are taken by a dedicated thread so the server can stop cleanly.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Service service(*std::move(store), config);
  HttpServer server(service);
  auto port = server.Bind(bind->first, bind->second);
  if (!port.ok()) return Runtime(port.status());
  err << "serving " << service.store().card_count() << " cards on " << bind->first << ":"
      << *port << "\n";
  std::thread waiter([&server, signals] {
    int received = 0;
    sigwait(&signals, &received);
    server.Stop();
  });
  server.Run();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  return std::nullopt;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Re-identification risk analysis for tap-on/tap-off transit data", "tapreid"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  auto add_in_out = [&common](CLI::App* sub, bool needs_input = true) {
    if (needs_input) {
      sub->add_option("--in", common.in, "Event CSV file or directory of shards")->required();
    }
    sub->add_option("--out", common.out, "Output file (default stdout)");
  };

  SynthFlags synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic population");
  synth_cmd->add_option("--config", synth.config, "Population config JSON")->required();
  synth_cmd->add_option("--seed", synth.seed, "Override the config seed");
  add_in_out(synth_cmd, false);

  std::string ingest_errors;
  CLI::App* ingest_cmd = app.add_subcommand("ingest", "Validate and normalize event CSV");
  ingest_cmd->add_option("--errors", ingest_errors, "Write rejected rows to this CSV");
  add_in_out(ingest_cmd);

  UnicityFlags unicity;
  CLI::App* unicity_cmd = app.add_subcommand("unicity", "Percent of cards unique");
  unicity_cmd->add_option("--granularity", unicity.granularity,
                          "Comma-separated granularities or 'all'");
  unicity_cmd->add_option("--n", unicity.n, "Set cardinalities, e.g. 1..5 or 1,2");
  unicity_cmd->add_option("--location", unicity.location, "both, with or without");
  unicity_cmd->add_option("--kind", unicity.kind, "on, off or both");
  unicity_cmd->add_option("--seed", unicity.seed, "Sampling seed");
  unicity_cmd->add_option("--from", unicity.from, "First date (YYYY-MM-DD)");
  unicity_cmd->add_option("--to", unicity.to, "Last date (YYYY-MM-DD)");
  unicity_cmd->add_flag("--exclude-short", unicity.exclude_short,
                        "Row n only considers cards with at least n taps");
  unicity_cmd->add_option("--min-sub-events", unicity.min_sub_events,
                          "Leave out cards with fewer taps");
  unicity_cmd->add_option("--format", unicity.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  add_in_out(unicity_cmd);

  CoTravelFlags cotravel;
  CLI::App* cotravel_cmd = app.add_subcommand("cotravel", "Cards boarding with a card");
  cotravel_cmd->add_option("--card", cotravel.card, "Subject card id")->required();
  cotravel_cmd->add_option("--window", cotravel.window, "Window in seconds");
  cotravel_cmd->add_option("--date", cotravel.date, "Restrict to one date");
  cotravel_cmd->add_option("--from", cotravel.from, "First date");
  cotravel_cmd->add_option("--to", cotravel.to, "Last date");
  cotravel_cmd->add_option("--exclude-types", cotravel.exclude_types,
                           "Comma-separated card types to drop");
  add_in_out(cotravel_cmd);

  QueryFlags query;
  CLI::App* query_cmd = app.add_subcommand("query", "Cards matching known events");
  query_cmd->add_option("--constraints", query.constraints, "Constraint list JSON")
      ->required();
  query_cmd->add_option("--format", query.format, "json (summary) or csv (every card)")
      ->check(CLI::IsMember({"csv", "json"}));
  query_cmd->add_option("--preview", query.preview, "Preview rows in JSON output");
  add_in_out(query_cmd);

  std::uint64_t min_gap = 1;
  int threshold = static_cast<int>(kDefaultSensitiveThreshold);
  CLI::App* audit_cmd = app.add_subcommand("audit", "Dataset audits");
  audit_cmd->require_subcommand(1);
  CLI::App* gaps_cmd = audit_cmd->add_subcommand("gaps", "Runs of unused card ids");
  gaps_cmd->add_option("--min-gap", min_gap, "Smallest gap reported")
      ->check(CLI::PositiveNumber);
  add_in_out(gaps_cmd);
  CLI::App* types_cmd = audit_cmd->add_subcommand("types", "Card type census");
  types_cmd->add_option("--threshold", threshold, "Sensitive below this many cards");
  add_in_out(types_cmd);

  ReleaseFlags release;
  CLI::App* release_cmd = app.add_subcommand("release", "Noisy aggregate counts");
  release_cmd->add_option("--block", release.block, "Block minutes, dividing 60");
  release_cmd->add_option("--from", release.from, "First date");
  release_cmd->add_option("--to", release.to, "Last date");
  release_cmd->add_option("--epsilon", release.epsilon, "Privacy parameter");
  release_cmd->add_option("--seed", release.seed, "Noise seed");
  release_cmd->add_option("--mechanism", release.mechanism, "geometric or laplace");
  release_cmd->add_option("--adjacency", release.adjacency, "eventLevel or cardLevel");
  release_cmd->add_option("--max-contribution", release.max_contribution,
                          "Per-card tap bound for cardLevel");
  release_cmd->add_option("--post-process", release.post_process,
                          "none or roundAndClampToZero");
  release_cmd->add_flag("--exact", release.exact, "Exact counts, no noise");
  release_cmd->add_option("--metadata", release.metadata, "Write metadata JSON here");
  add_in_out(release_cmd);

  ServeFlags serve;
  CLI::App* serve_cmd = app.add_subcommand("serve", "HTTP/JSON service");
  serve_cmd->add_option("--config", serve.config, "Service config JSON");
  serve_cmd->add_option("--data", serve.data, "Event CSV (overrides dataPath)");
  serve_cmd->add_option("--bind", serve.bind, "host:port (overrides bindAddress)");
  serve_cmd->add_option("--preview", serve.preview, "maxCandidatePreview override");
  serve_cmd->add_option("--timeout", serve.timeout, "requestTimeoutSeconds override");

  std::vector<const char*> argv = {"tapreid"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Outcome result;
  if (synth_cmd->parsed()) {
    result = RunSynth(common, synth, out);
  } else if (ingest_cmd->parsed()) {
    result = RunIngest(common, ingest_errors, out, err);
  } else if (unicity_cmd->parsed()) {
    result = RunUnicityCommand(common, unicity, out, err);
  } else if (cotravel_cmd->parsed()) {
    result = RunCoTravelCommand(common, cotravel, out, err);
  } else if (query_cmd->parsed()) {
    result = RunQueryCommand(common, query, out, err);
  } else if (gaps_cmd->parsed() || types_cmd->parsed()) {
    auto store = Load(common.in, err);
    if (!store.ok()) {
      result = Runtime(store.status());
    } else if (gaps_cmd->parsed()) {
      auto gaps = IdGapScan(*store, min_gap);
      result = gaps.ok() ? Emit(common.out, GapCsv(*gaps), out) : Usage(gaps.status());
    } else {
      result = Emit(common.out, CensusCsv(CardTypeCensus(*store, threshold)), out);
    }
  } else if (release_cmd->parsed()) {
    result = RunReleaseCommand(common, release, out, err);
  } else if (serve_cmd->parsed()) {
    result = RunServe(common, serve, err);
  }
  if (result) {
    err << "error: " << result->message << "\n";
    if (result->code == kExitUsage) err << "run with --help for usage\n";
    return result->code;
  }
  return kExitOk;
}

}  // namespace tapreid
