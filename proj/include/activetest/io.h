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

// File formats.
//
// Dataset: JSON lines. The first line is a header
//   {"format": "activetest.dataset", "version": 1, "relations": [...]}
// and every following non-blank line is one entity pair
//   {"pair_id": ..., "head": ..., "tail": ..., "sentences": [...],
//    "scores": {rel: s}, "noisy_labels": {rel: 0|1},
//    "oracle_labels": {rel: 0|1}}
// "sentences" and "oracle_labels" are optional, unknown fields are ignored.
//
// Session: one JSON document holding the dataset path and SHA-256, the loop
// configuration, the RNG state, the vetting state and the pending batch.
//
// Reports: JSON or a long-format CSV with the header
//   section,source,iteration,k,recall,precision,distance,budget_remaining

#ifndef ACTIVETEST_IO_H_
#define ACTIVETEST_IO_H_

#include <iosfwd>
#include <memory>
#include <string>

#include "activetest/dataset.h"
#include "activetest/simulation.h"
#include "activetest/vetting.h"
#include "json.hpp"

namespace activetest {

inline constexpr int kFormatVersion = 1;

// Throws ValidationError naming the line and field on bad content and
// IoError when the file cannot be read.
PredictionDataset LoadDataset(const std::string& path,
                              const DatasetOptions& options = {});
PredictionDataset ParseDataset(std::istream& in,
                               const DatasetOptions& options = {});

void SaveDataset(const PredictionDataset& dataset, const std::string& path);
void WriteDataset(const PredictionDataset& dataset, std::ostream& out);

// Hex SHA-256 of the file with CRLF normalised to LF.
std::string HashFile(const std::string& path);

struct DatasetRef {
  std::string path;
  std::string sha256;

  bool operator==(const DatasetRef&) const = default;
};

struct SessionFile {
  DatasetRef dataset;
  SessionSnapshot snapshot;

  bool operator==(const SessionFile&) const = default;
};

// Written to a temporary file and renamed into place.
void SaveSession(const SessionFile& session, const std::string& path);
SessionFile LoadSession(const std::string& path);

// Loads the session and its dataset. The dataset is read from
// dataset_override if non-empty, else from the recorded path. Throws
// ValidationError if the dataset's hash differs from the recorded one.
struct ResumedSession {
  DatasetRef dataset_ref;
  std::shared_ptr<const PredictionDataset> dataset;
  ActiveTestingSession session;
};
ResumedSession ResumeSession(const std::string& session_path,
                             const std::string& dataset_override = "",
                             const DatasetOptions& options = {});

// Writes `content` to `path` through a temporary file and rename. An
// existing non-regular target such as a device or pipe is written in place.
void WriteFileAtomically(const std::string& path, const std::string& content);
std::string ReadFile(const std::string& path);

enum class ReportFormat { kJson, kCsv };
ReportFormat ParseReportFormat(const std::string& name);

std::string EmitReport(const EvaluationReport& report, ReportFormat format);
EvaluationReport ParseReportJson(const std::string& text);

std::string EmitComparison(const ComparisonTable& table, ReportFormat format);

// Numbers in CSV output: 17 significant digits.
std::string FormatNumber(double value);

// JSON conversions shared with the CLI and the server.
nlohmann::json ToJson(const ActiveTestingConfig& config);
ActiveTestingConfig ConfigFromJson(const nlohmann::json& json);
nlohmann::json ToJson(const SyntheticConfig& config);
SyntheticConfig SyntheticConfigFromJson(const nlohmann::json& json);
nlohmann::json ToJson(const MetricReport& report);
MetricReport MetricReportFromJson(const nlohmann::json& json);
nlohmann::json ToJson(const IterationRecord& record);
IterationRecord IterationRecordFromJson(const nlohmann::json& json);
nlohmann::json ToJson(const EvaluationReport& report);
EvaluationReport EvaluationReportFromJson(const nlohmann::json& json);

// The pending batch as shown to an annotator: entities, sentences, and the
// per-relation score and noisy label. Oracle labels are never included.
nlohmann::json BatchView(const PredictionDataset& dataset,
                         const PendingBatch& batch);

// Parses {"batch_id": ..., "labels": {pair_id: {relation: 0|1}}}. A label
// row may also be an array in relation order. Returns the batch id.
std::string ParseBatchLabels(const nlohmann::json& json,
                             const PredictionDataset& dataset,
                             BatchLabels* labels);

}  // namespace activetest

#endif  // ACTIVETEST_IO_H_
