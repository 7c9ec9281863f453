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

#include <thread>

#include "gtest/gtest.h"
#include "httplib.h"
#include "json.hpp"
#include "scenarios.h"
#include "test_util.h"

namespace tapreid {
namespace {

using ::nlohmann::json;
using ::tapreid::testing::OnEvent;

json Body(const HttpResponse& r) { return json::parse(r.body); }

ServiceConfig SmallPreview(int preview) {
  ServiceConfig config;
  config.max_candidate_preview = preview;
  config.threads = 2;
  return config;
}

TEST(ServiceTest, EmptyQueryReturnsEveryCard) {
  auto scenario = testing::MakeNarrowingScenario();
  size_t cards = scenario.store.card_count();
  Service service(std::move(scenario.store), SmallPreview(10));
  HttpResponse r = service.Handle("POST", "/query", {}, R"({"constraints":[]})");
  ASSERT_EQ(r.status, 200) << r.body;
  json j = Body(r);
  EXPECT_EQ(j["total"], cards);
  EXPECT_EQ(j["preview"].size(), 10u);
  EXPECT_TRUE(j["truncated"].get<bool>());
  const json& first = j["preview"][0];
  for (const char* key : {"cardId", "cardType", "firstSeen", "lastSeen", "eventCount"}) {
    EXPECT_TRUE(first.contains(key)) << key;
  }
}

TEST(ServiceTest, NarrowingThroughTheApi) {
  auto scenario = testing::MakeNarrowingScenario();
  Service service(std::move(scenario.store), SmallPreview(50));
  std::string one = ConstraintsToJson({scenario.busy_window});
  std::string two = ConstraintsToJson({scenario.busy_window, scenario.second_trip});
  HttpResponse wide = service.Handle("POST", "/query", {}, one);
  HttpResponse narrow = service.Handle("POST", "/query", {}, two);
  EXPECT_EQ(Body(wide)["total"], 48);
  EXPECT_EQ(Body(narrow)["total"], 1);
  EXPECT_EQ(Body(narrow)["preview"][0]["cardId"], testing::NarrowingScenario::kSubject);
  EXPECT_EQ(service.Handle("POST", "/query", {}, one).body, wide.body);
}

TEST(ServiceTest, QueryAntiMonotoneOnRandomStores) {
  Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    Service service(testing::RandomStore(rng), SmallPreview(5));
    std::vector<Constraint> cs;
    std::int64_t previous = service.store().card_count();
    for (int step = 0; step < 4; ++step) {
      cs.push_back(testing::RandomConstraint(rng));
      HttpResponse r = service.Handle("POST", "/query", {}, ConstraintsToJson(cs));
      ASSERT_EQ(r.status, 200);
      std::int64_t total = Body(r)["total"];
      EXPECT_LE(total, previous);
      previous = total;
    }
  }
}

TEST(ServiceTest, QueryErrors) {
  Service service(BuildStore({OnEvent(1, "2017-01-02T08:00:00", 1)}), SmallPreview(5));
  HttpResponse bad_json = service.Handle("POST", "/query", {}, "{");
  EXPECT_EQ(bad_json.status, 400);
  EXPECT_TRUE(Body(bad_json).contains("error"));
  EXPECT_TRUE(Body(bad_json).contains("code"));
  HttpResponse bad_window = service.Handle(
      "POST", "/query", {},
      R"([{"kind":"touchOnBetween","date":"2017-01-02","lo":"09:00:00","hi":"08:00:00"}])");
  EXPECT_EQ(bad_window.status, 400);
}

TEST(ServiceTest, Timeline) {
  Service service(BuildStore({OnEvent(5, "2017-01-02T08:00:00", 1, 2),
                              OnEvent(5, "2017-01-03T08:00:00", 1, 2)}),
                  SmallPreview(5));
  HttpResponse r = service.Handle("GET", "/cards/5/timeline", {}, "");
  ASSERT_EQ(r.status, 200);
  json j = Body(r);
  EXPECT_EQ(j["cardType"], 2);
  EXPECT_EQ(j["events"].size(), 2u);
  EXPECT_EQ(j["firstSeen"], "2017-01-02T08:00:00");
  EXPECT_EQ(j["lastSeen"], "2017-01-03T08:00:00");

  HttpResponse missing = service.Handle("GET", "/cards/999999999/timeline", {}, "");
  EXPECT_EQ(missing.status, 404);
  EXPECT_EQ(Body(missing)["code"], "UnknownCard");
  EXPECT_EQ(service.Handle("GET", "/cards/abc/timeline", {}, "").status, 400);
}

TEST(ServiceTest, CoTravellersWithExclusion) {
  auto scenario = testing::MakeSeminarScenario();
  Service service(std::move(scenario.store), SmallPreview(5));
  std::string path = absl::StrCat("/cards/", testing::SeminarScenario::kSubject, "/cotravellers");
  HttpResponse r = service.Handle("GET", path, {{"window", "5"}, {"date", "2016-06-15"}}, "");
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(Body(r)["total"], 4);
  HttpResponse one = service.Handle(
      "GET", path, {{"window", "5"}, {"date", "2016-06-15"}, {"excludeTypes", "2,1"}}, "");
  json j = Body(one);
  ASSERT_EQ(j["total"], 1);
  EXPECT_EQ(j["matches"][0]["otherCardId"], testing::SeminarScenario::kCommuter);
  EXPECT_EQ(service.Handle("GET", path, {{"window", "-1"}}, "").status, 400);
  EXPECT_EQ(service.Handle("GET", "/cards/42/cotravellers", {}, "").status, 404);
}

TEST(ServiceTest, UnicityJobs) {
  Rng rng(3);
  EventStore store = testing::RandomStore(rng);
  UnicityParams direct;
  direct.granularities = {TimeGranularity::kZeroMinutes};
  direct.location_flags = {false, true};
  direct.cardinalities = {1, 2, 3, 4, 5};
  direct.seed = 9;
  UnicityReport expected = RunUnicity(store, direct);

  Service service(std::move(store), SmallPreview(5));
  std::string body = R"({"granularities":["zeroMinutes"],"location":"both","n":"1..5","seed":9})";
  HttpResponse submitted = service.Handle("POST", "/unicity", {}, body);
  ASSERT_EQ(submitted.status, 200) << submitted.body;
  std::string id = Body(submitted)["jobId"];
  HttpResponse again = service.Handle(
      "POST", "/unicity", {}, R"({"seed":9,"n":[1,2,3,4,5],"granularities":"zeroMinutes"})");
  EXPECT_EQ(Body(again)["jobId"], id);
  service.WaitForJobs();
  HttpResponse done = service.Handle("GET", "/jobs/" + id, {}, "");
  json j = Body(done);
  ASSERT_EQ(j["status"], "done");
  ASSERT_EQ(j["report"]["rows"].size(), 10u);
  for (size_t i = 0; i < expected.rows.size(); ++i) {
    EXPECT_EQ(j["report"]["rows"][i]["cardsUnique"], expected.rows[i].cards_unique);
    EXPECT_EQ(j["report"]["rows"][i]["cardsConsidered"], expected.rows[i].cards_considered);
  }
  EXPECT_EQ(service.Handle("GET", "/jobs/nope", {}, "").status, 404);
  EXPECT_EQ(service.Handle("POST", "/unicity", {}, R"({"n":"0..2"})").status, 400);
}

TEST(ServiceTest, Audits) {
  Service service(BuildStore({OnEvent(2, "2017-01-02T08:00:00", 1, 0),
                              OnEvent(15747, "2017-01-02T08:00:00", 1, 51),
                              OnEvent(15748, "2017-01-02T08:00:00", 1, 0)}),
                  SmallPreview(5));
  json gaps = Body(service.Handle("GET", "/audit/gaps", {{"minGap", "10"}}, ""));
  ASSERT_EQ(gaps["gaps"].size(), 1u);
  EXPECT_EQ(gaps["gaps"][0]["missingCount"], 15744);
  EXPECT_EQ(service.Handle("GET", "/audit/gaps", {{"minGap", "0"}}, "").status, 400);
  json types = Body(service.Handle("GET", "/audit/types", {}, ""));
  ASSERT_EQ(types["types"].size(), 2u);
  EXPECT_EQ(types["types"][1]["cardType"], 51);
  EXPECT_EQ(types["types"][1]["sensitive"], true);
}

TEST(ServiceTest, ReleaseAggregate) {
  Service service(BuildStore({OnEvent(1, "2017-01-02T08:00:00", 7),
                              OnEvent(2, "2017-01-02T08:05:00", 8)}),
                  SmallPreview(5));
  std::string body =
      R"({"from":"2017-01-02","to":"2017-01-02","epsilon":0.5,"seed":4,"postProcess":"roundAndClampToZero"})";
  HttpResponse r = service.Handle("POST", "/release/aggregate", {}, body);
  ASSERT_EQ(r.status, 200) << r.body;
  json j = Body(r);
  EXPECT_EQ(j["cells"].size(), 2u * 96 * 2);
  EXPECT_FALSE(j["metadata"].contains("seed"));
  for (const json& c : j["cells"]) EXPECT_GE(c["count"].get<double>(), 0);
  EXPECT_EQ(service.Handle("POST", "/release/aggregate", {}, body).body, r.body);
  EXPECT_EQ(service.Handle("POST", "/release/aggregate", {}, R"({"epsilon":0})").status, 400);
  HttpResponse block =
      service.Handle("POST", "/release/aggregate", {}, R"({"blockMinutes":7})");
  EXPECT_EQ(Body(block)["code"], "InvalidBlock");
}

TEST(ServiceTest, UnknownRoute) {
  Service service(EventStore{}, SmallPreview(5));
  HttpResponse r = service.Handle("GET", "/nothing/here", {}, "");
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(Body(r)["code"], "NoRoute");
  EXPECT_EQ(service.Handle("GET", "/query", {}, "").status, 404);
}

TEST(ServiceConfigTest, ParseAndValidate) {
  auto config = ParseServiceConfig(R"({"dataPath":"x.csv","bindAddress":"0.0.0.0:9000"})");
  ASSERT_TRUE(config.ok());
  EXPECT_EQ(config->max_candidate_preview, 50);
  EXPECT_EQ(config->data_path, "x.csv");
  EXPECT_FALSE(ParseServiceConfig(R"({"maxCandidatePreview":0})").ok());
  EXPECT_FALSE(ParseServiceConfig(R"({"bindAddress":"host:port"})").ok());
  EXPECT_FALSE(ParseServiceConfig("[]").ok());
  auto bind = SplitBindAddress("8081");
  ASSERT_TRUE(bind.ok());
  EXPECT_EQ(bind->first, "127.0.0.1");
  EXPECT_EQ(bind->second, 8081);
}

TEST(ParameterParsingTest, SharedHelpers) {
  EXPECT_EQ(*ParseCardinalities("1..5"), (std::vector<int>{1, 2, 3, 4, 5}));
  EXPECT_EQ(*ParseCardinalities("3,1"), (std::vector<int>{1, 3}));
  EXPECT_FALSE(ParseCardinalities("0..2").ok());
  EXPECT_FALSE(ParseCardinalities("a").ok());
  EXPECT_EQ(*ParseLocationFlags("both"), (std::vector<bool>{false, true}));
  EXPECT_FALSE(ParseLocationFlags("maybe").ok());
  EXPECT_EQ(ParseGranularities("all")->size(), 5u);
  EXPECT_EQ(ParseGranularities("exact, zeroHour")->size(), 2u);
  EXPECT_EQ(*ParseCardTypeList("2,1"), (std::set<CardType>{1, 2}));
  EXPECT_FALSE(ParseCardTypeList("200").ok());
}

TEST(HttpServerTest, ServesOverLoopback) {
  auto scenario = testing::MakeRosannaScenario();
  Service service(std::move(scenario.store), SmallPreview(3));
  HttpServer server(service);
  auto port = server.Bind("127.0.0.1", 0);
  ASSERT_TRUE(port.ok()) << port.status();
  std::thread loop([&server] { server.Run(); });

  httplib::Client client("127.0.0.1", *port);
  auto types = client.Get("/audit/types");
  ASSERT_TRUE(types);
  EXPECT_EQ(types->status, 200);
  EXPECT_EQ(types->get_header_value("Content-Type"), "application/json");
  auto query = client.Post("/query", R"({"constraints":[{"kind":"cardTypeIs","type":51}]})",
                           "application/json");
  ASSERT_TRUE(query);
  EXPECT_EQ(json::parse(query->body)["total"], 5);
  auto missing = client.Get("/cards/999999999/timeline");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(json::parse(missing->body)["code"], "UnknownCard");
  auto gaps = client.Get("/audit/gaps?minGap=2");
  ASSERT_TRUE(gaps);
  EXPECT_EQ(json::parse(gaps->body)["minGap"], 2);

  server.Stop();
  loop.join();
}

}  // namespace
}  // namespace tapreid
