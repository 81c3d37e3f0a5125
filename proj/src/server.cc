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

#include <filesystem>
#include <utility>

#include "activetest/errors.h"
#include "httplib.h"

namespace activetest {

using nlohmann::json;

namespace {

ServiceResponse ErrorResponse(int status, const std::string& code,
                              const std::string& message) {
  return {status, "application/json",
          json{{"error", {{"code", code}, {"message", message}}}}.dump()};
}

ServiceResponse NoSession() {
  return ErrorResponse(404, "no_session", "no session is loaded");
}

}  // namespace

SessionService::SessionService(std::string session_path,
                               DatasetRef dataset_ref,
                               std::shared_ptr<const PredictionDataset> dataset,
                               ActiveTestingSession session)
    : session_path_(std::move(session_path)),
      dataset_ref_(std::move(dataset_ref)),
      dataset_(std::move(dataset)),
      session_(std::move(session)) {}

std::unique_ptr<SessionService> SessionService::Open(
    const std::string& session_path, const std::string& dataset_override) {
  ResumedSession resumed = ResumeSession(session_path, dataset_override);
  return std::make_unique<SessionService>(
      session_path, std::move(resumed.dataset_ref), std::move(resumed.dataset),
      std::move(resumed.session));
}

json SessionService::StateJson() const {
  const ActiveTestingSession& session = *session_;
  const VettingState& state = session.state();
  MetricReport metrics = session.metrics();
  metrics.curve.points.clear();
  const PendingBatch* pending = session.pending();
  json view = {
      {"session_id", std::filesystem::path(session_path_).stem().string()},
      {"iteration", state.history.size()},
      {"budget_remaining", state.budget_remaining},
      {"budget_total", state.initial_budget},
      {"vetted_pairs", state.vetted.size()},
      {"done", session.done()},
      {"relations", session.dataset().relations()},
      {"batch",
       pending ? BatchView(session.dataset(), *pending) : json(nullptr)},
      {"metrics", ToJson(metrics)}};
  if (session.done()) {
    view["report"] = ToJson(session.Report(/*include_oracle=*/false));
  }
  return view;
}

ServiceResponse SessionService::GetState() const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!session_) return NoSession();
  return {200, "application/json", StateJson().dump()};
}

ServiceResponse SessionService::SubmitLabels(const std::string& body) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!session_) return NoSession();
  json payload;
  try {
    payload = json::parse(body);
  } catch (const json::parse_error& e) {
    return ErrorResponse(400, "invalid_json", e.what());
  }
  try {
    BatchLabels labels;
    const std::string batch_id =
        ParseBatchLabels(payload, session_->dataset(), &labels);
    ActiveTestingSession updated = *session_;
    updated.Submit(batch_id, labels);
    SaveSession({dataset_ref_, updated.Snapshot()}, session_path_);
    session_ = std::move(updated);
  } catch (const ConflictError& e) {
    return ErrorResponse(409, "stale_batch", e.what());
  } catch (const ValidationError& e) {
    return ErrorResponse(400, "invalid_labels", e.what());
  } catch (const IoError& e) {
    return ErrorResponse(500, "persistence_failed", e.what());
  }
  return {200, "application/json", StateJson().dump()};
}

ServiceResponse SessionService::Report(const std::string& format) const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!session_) return NoSession();
  ReportFormat parsed;
  try {
    parsed = ParseReportFormat(format.empty() ? "json" : format);
  } catch (const ValidationError& e) {
    return ErrorResponse(400, "invalid_format", e.what());
  }
  const std::string body =
      EmitReport(session_->Report(/*include_oracle=*/false), parsed);
  return {200, parsed == ReportFormat::kCsv ? "text/csv" : "application/json",
          body};
}

AnnotationServer::AnnotationServer(SessionService& service,
                                   const std::string& static_dir)
    : server_(std::make_unique<httplib::Server>()) {
  // SO_REUSEADDR only, so binding an occupied port fails.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  const auto reply = [](httplib::Response& res, const ServiceResponse& out) {
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server_->Get("/api/session",
               [&service, reply](const httplib::Request&,
                                 httplib::Response& res) {
                 reply(res, service.GetState());
               });
  server_->Post("/api/session/labels",
                [&service, reply](const httplib::Request& req,
                                  httplib::Response& res) {
                  reply(res, service.SubmitLabels(req.body));
                });
  server_->Get("/api/session/report",
               [&service, reply](const httplib::Request& req,
                                 httplib::Response& res) {
                 reply(res, service.Report(req.get_param_value("format")));
               });
  if (!static_dir.empty() && !server_->set_mount_point("/", static_dir)) {
    throw IoError("cannot serve static files from '" + static_dir + "'");
  }
}

AnnotationServer::~AnnotationServer() = default;

int AnnotationServer::Bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host)
                              : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw IoError("cannot bind to " + host + ":" + std::to_string(port));
  }
  return bound;
}

void AnnotationServer::Listen() { server_->listen_after_bind(); }

void AnnotationServer::Stop() { server_->stop(); }

}  // namespace activetest
