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

// HTTP API for human annotation of a persisted session.
//
//   GET  /api/session                 current batch, budget and metrics,
//                                     plus the final report once done
//   POST /api/session/labels          {"batch_id": ..., "labels": {...}}
//   GET  /api/session/report?format=  json (default) or csv
//
// Errors are returned as {"error": {"code": ..., "message": ...}} with
// status 400 (invalid input), 404 (no session), 409 (stale batch id) or
// 500 (persistence failure).

#ifndef ACTIVETEST_SERVER_H_
#define ACTIVETEST_SERVER_H_

#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "activetest/io.h"
#include "activetest/vetting.h"

namespace httplib {
class Server;
}

namespace activetest {

struct ServiceResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Transport-independent request handling. All methods are thread-safe.
class SessionService {
 public:
  // A service with no session answers every request with 404.
  SessionService() = default;
  SessionService(std::string session_path, DatasetRef dataset_ref,
                 std::shared_ptr<const PredictionDataset> dataset,
                 ActiveTestingSession session);

  // Resumes the session stored at session_path.
  static std::unique_ptr<SessionService> Open(
      const std::string& session_path,
      const std::string& dataset_override = "");

  ServiceResponse GetState() const;

  // Applies the labels on a copy of the session, writes the new session file
  // and only then replaces the in-memory session.
  ServiceResponse SubmitLabels(const std::string& body);

  // Oracle metrics are never included.
  ServiceResponse Report(const std::string& format) const;

 private:
  nlohmann::json StateJson() const;

  mutable std::mutex mutex_;
  std::string session_path_;
  DatasetRef dataset_ref_;
  std::shared_ptr<const PredictionDataset> dataset_;
  std::optional<ActiveTestingSession> session_;
};

// Routes the API onto an httplib server. The optional static directory is
// mounted at "/" for the annotation UI.
class AnnotationServer {
 public:
  explicit AnnotationServer(SessionService& service,
                            const std::string& static_dir = "");
  ~AnnotationServer();

  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  // Binds to host:port; port 0 picks a free port. Returns the bound port.
  // Throws IoError when binding fails.
  int Bind(const std::string& host, int port);

  // Serves until Stop() is called. Requires a successful Bind().
  void Listen();
  void Stop();

 private:
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace activetest

#endif  // ACTIVETEST_SERVER_H_
