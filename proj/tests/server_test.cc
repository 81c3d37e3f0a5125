/*
 * Copyright 2026 The activetest Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "activetest/server.h"

#include <fstream>
#include <memory>
#include <string>
#include <thread>

#include "activetest/errors.h"
#include "activetest/simulation.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "test_util.h"

namespace activetest {
namespace {

using nlohmann::json;
using test::TempDir;
using ::testing::HasSubstr;
using ::testing::Not;
using ::testing::SizeIs;
using ::testing::StartsWith;

class SessionServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    SyntheticConfig data;
    data.n_pairs = 100;
    data.relations = 3;
    data.positive_rate = 0.3;
    dataset_ = std::make_shared<const PredictionDataset>(Generate(data));
    SaveDataset(*dataset_, dir_.File("data.jsonl"));
    ref_ = {dir_.File("data.jsonl"), HashFile(dir_.File("data.jsonl"))};
    ActiveTestingConfig config;
    config.batch_size = 20;
    config.budget = 40;
    config.ks = {10, 20};
    config.initial = {InitialPolicyKind::kRandom, 0};
    SaveSession({ref_, ActiveTestingSession::Start(dataset_, config)
                           .Snapshot()},
                session_path());
    service_ = SessionService::Open(session_path());
  }

  std::string session_path() const { return dir_.File("review.json"); }

  json State() const {
    const ServiceResponse response = service_->GetState();
    EXPECT_EQ(response.status, 200);
    return json::parse(response.body);
  }

  // Labels the pending batch from the oracle.
  json OracleLabels(const json& state) const {
    json labels = json::object();
    for (const json& pair : state["batch"]["pairs"]) {
      const std::string id = pair["pair_id"];
      labels[id] = *dataset_->pair(*dataset_->FindPair(id)).oracle_labels;
    }
    return {{"batch_id", state["batch"]["batch_id"]}, {"labels", labels}};
  }

  TempDir dir_;
  std::shared_ptr<const PredictionDataset> dataset_;
  DatasetRef ref_;
  std::unique_ptr<SessionService> service_;
};

std::string ErrorCode(const ServiceResponse& response) {
  return json::parse(response.body)["error"]["code"];
}

TEST_F(SessionServiceTest, StateShowsThePendingBatchWithoutOracleLabels) {
  const json state = State();
  EXPECT_EQ(state["session_id"], "review");
  EXPECT_EQ(state["iteration"], 0);
  EXPECT_EQ(state["budget_remaining"], 40);
  EXPECT_EQ(state["budget_total"], 40);
  EXPECT_EQ(state["done"], false);
  EXPECT_EQ(state["batch"]["batch_id"], "batch-1");
  EXPECT_THAT(state["batch"]["pairs"], SizeIs(20));
  EXPECT_THAT(state["batch"]["pairs"][0]["relations"], SizeIs(3));
  EXPECT_THAT(state.dump(), Not(HasSubstr("oracle")));
  EXPECT_FALSE(state.contains("report"));
}

TEST_F(SessionServiceTest, SubmissionIsPersistedBeforeItIsAcknowledged) {
  const ServiceResponse response =
      service_->SubmitLabels(OracleLabels(State()).dump());
  ASSERT_EQ(response.status, 200) << response.body;
  const json state = json::parse(response.body);
  EXPECT_EQ(state["iteration"], 1);
  EXPECT_EQ(state["budget_remaining"], 20);
  EXPECT_EQ(state["batch"]["batch_id"], "batch-2");
  // A restarted server sees exactly the acknowledged state.
  EXPECT_EQ(SessionService::Open(session_path())->GetState().body,
            response.body);
}

TEST_F(SessionServiceTest, StaleBatchIsAConflict) {
  const json first = OracleLabels(State());
  ASSERT_EQ(service_->SubmitLabels(first.dump()).status, 200);
  const ServiceResponse stale = service_->SubmitLabels(first.dump());
  EXPECT_EQ(stale.status, 409);
  EXPECT_EQ(ErrorCode(stale), "stale_batch");
  EXPECT_EQ(State()["iteration"], 1);
}

TEST_F(SessionServiceTest, BadPayloadsAreRejectedWithoutSideEffects) {
  const std::string before = ReadFile(session_path());
  const ServiceResponse garbage = service_->SubmitLabels("{oops");
  EXPECT_EQ(garbage.status, 400);
  EXPECT_EQ(ErrorCode(garbage), "invalid_json");

  json partial = OracleLabels(State());
  partial["labels"].erase(partial["labels"].begin());
  const ServiceResponse missing = service_->SubmitLabels(partial.dump());
  EXPECT_EQ(missing.status, 400);
  EXPECT_EQ(ErrorCode(missing), "invalid_labels");

  json bad = OracleLabels(State());
  bad["labels"].begin().value() = json::array({0, 3, 0});
  EXPECT_EQ(service_->SubmitLabels(bad.dump()).status, 400);
  EXPECT_EQ(service_->SubmitLabels(R"({"labels":{}})").status, 400);

  EXPECT_EQ(ReadFile(session_path()), before);
  EXPECT_EQ(State()["iteration"], 0);
}

TEST_F(SessionServiceTest, PersistenceFailureKeepsTheOldState) {
  std::ofstream(dir_.File("blocker")) << "x";
  ResumedSession resumed = ResumeSession(session_path());
  SessionService service(dir_.File("blocker") + "/s.json", ref_,
                         resumed.dataset, std::move(resumed.session));
  const json state = json::parse(service.GetState().body);
  const ServiceResponse response =
      service.SubmitLabels(OracleLabels(state).dump());
  EXPECT_EQ(response.status, 500);
  EXPECT_EQ(ErrorCode(response), "persistence_failed");
  EXPECT_EQ(json::parse(service.GetState().body), state);
}

TEST_F(SessionServiceTest, FinishedSessionCarriesTheReport) {
  for (int i = 0; i < 2; ++i) {
    ASSERT_EQ(service_->SubmitLabels(OracleLabels(State()).dump()).status,
              200);
  }
  const json state = State();
  EXPECT_EQ(state["done"], true);
  EXPECT_TRUE(state["batch"].is_null());
  EXPECT_EQ(state["vetted_pairs"], 40);
  ASSERT_TRUE(state.contains("report"));
  EXPECT_TRUE(state["report"]["oracle"].is_null());
  EXPECT_THAT(state["report"]["iterations"], SizeIs(2));
  EXPECT_EQ(ErrorCode(service_->SubmitLabels(
                R"({"batch_id":"batch-2","labels":{}})")),
            "stale_batch");
}

TEST_F(SessionServiceTest, ReportFormats) {
  const ServiceResponse json_report = service_->Report("");
  EXPECT_EQ(json_report.status, 200);
  EXPECT_TRUE(json::parse(json_report.body)["oracle"].is_null());
  const ServiceResponse csv = service_->Report("csv");
  EXPECT_EQ(csv.content_type, "text/csv");
  EXPECT_THAT(csv.body, StartsWith("section,source,"));
  EXPECT_THAT(csv.body, Not(HasSubstr("oracle")));
  const ServiceResponse bad = service_->Report("xml");
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(ErrorCode(bad), "invalid_format");
}

TEST(SessionService, WithoutASessionEverythingIs404) {
  SessionService service;
  EXPECT_EQ(service.GetState().status, 404);
  EXPECT_EQ(service.SubmitLabels("{}").status, 404);
  EXPECT_EQ(service.Report("json").status, 404);
  EXPECT_EQ(ErrorCode(service.GetState()), "no_session");
}

TEST_F(SessionServiceTest, ServesTheApiOverHttp) {
  AnnotationServer server(*service_);
  const int port = server.Bind("127.0.0.1", 0);
  std::thread thread([&] { server.Listen(); });
  httplib::Client client("127.0.0.1", port);

  auto get = client.Get("/api/session");
  ASSERT_TRUE(get);
  EXPECT_EQ(get->status, 200);
  const json state = json::parse(get->body);
  EXPECT_THAT(state["batch"]["pairs"], SizeIs(20));

  auto post = client.Post("/api/session/labels", OracleLabels(state).dump(),
                          "application/json");
  ASSERT_TRUE(post);
  EXPECT_EQ(post->status, 200);
  EXPECT_EQ(json::parse(post->body)["iteration"], 1);

  auto stale = client.Post("/api/session/labels", OracleLabels(state).dump(),
                           "application/json");
  ASSERT_TRUE(stale);
  EXPECT_EQ(stale->status, 409);

  auto report = client.Get("/api/session/report?format=csv");
  ASSERT_TRUE(report);
  EXPECT_EQ(report->status, 200);
  EXPECT_THAT(report->body, StartsWith("section,source,"));

  auto missing = client.Get("/api/nothing");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  server.Stop();
  thread.join();
}

TEST(AnnotationServer, BindFailureIsAnIoError) {
  SessionService service;
  AnnotationServer first(service);
  const int port = first.Bind("127.0.0.1", 0);
  AnnotationServer second(service);
  EXPECT_THROW(second.Bind("127.0.0.1", port), IoError);
  EXPECT_THROW(AnnotationServer(service, "/no/such/directory"), IoError);
}

}  // namespace
}  // namespace activetest
