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

#include "activetest/io.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "activetest/errors.h"

namespace activetest {

using nlohmann::json;

namespace {

constexpr char kDatasetFormat[] = "activetest.dataset";
constexpr char kSessionFormat[] = "activetest.session";
constexpr char kReportFormat[] = "activetest.report";

[[noreturn]] void Fail(std::size_t line, const std::string& field,
                       const std::string& message) {
  throw ValidationError("line " + std::to_string(line) + ": field '" + field +
                        "': " + message);
}

Label ParseLabel(const json& value, std::size_t line,
                 const std::string& field) {
  if (value.is_boolean()) return value.get<bool>() ? 1 : 0;
  if (value.is_number_integer() || value.is_number_unsigned()) {
    const auto v = value.get<std::int64_t>();
    if (v == 0 || v == 1) return static_cast<Label>(v);
  }
  Fail(line, field, "label must be 0 or 1");
}

// Reads a {relation: value} object covering exactly the declared relations.
template <typename T, typename Parse>
std::vector<T> ParseRelationMap(const json& object,
                                const std::vector<std::string>& relations,
                                std::size_t line, const std::string& field,
                                Parse parse) {
  if (!object.is_object()) Fail(line, field, "expected an object");
  std::vector<T> values(relations.size());
  std::vector<bool> seen(relations.size(), false);
  for (const auto& [name, value] : object.items()) {
    const auto it = std::find(relations.begin(), relations.end(), name);
    if (it == relations.end()) {
      Fail(line, field + "." + name, "relation not declared in the header");
    }
    const std::size_t k = it - relations.begin();
    values[k] = parse(value, field + "." + name);
    seen[k] = true;
  }
  for (std::size_t k = 0; k < relations.size(); ++k) {
    if (!seen[k]) Fail(line, field + "." + relations[k], "missing entry");
  }
  return values;
}

std::string OptionalString(const json& record, const char* key,
                           std::size_t line) {
  if (!record.contains(key)) return "";
  if (!record[key].is_string()) Fail(line, key, "expected a string");
  return record[key].get<std::string>();
}

json RelationObject(const std::vector<std::string>& relations,
                    const LabelRow& labels) {
  json object = json::object();
  for (std::size_t k = 0; k < relations.size(); ++k) {
    object[relations[k]] = static_cast<int>(labels[k]);
  }
  return object;
}

template <typename T>
std::optional<T> OptionalField(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

const char* NoiseScopeName(NoiseScope scope) {
  return scope == NoiseScope::kPerRelation ? "per-relation" : "global";
}

NoiseScope ParseNoiseScope(const std::string& name) {
  if (name == "per-relation") return NoiseScope::kPerRelation;
  if (name == "global") return NoiseScope::kGlobal;
  throw ValidationError("unknown noise scope '" + name + "'");
}

json ToJson(const NoiseTable& table) {
  json rows = json::array();
  for (const NoiseRates& rates : table.per_relation) {
    rows.push_back({{"y1_given_z1", rates.y1_given_z1},
                    {"y1_given_z0", rates.y1_given_z0},
                    {"counts",
                     {{"z1", rates.counts.z1},
                      {"y1_z1", rates.counts.y1_z1},
                      {"z0", rates.counts.z0},
                      {"y1_z0", rates.counts.y1_z0}}}});
  }
  return rows;
}

NoiseTable NoiseTableFromJson(const json& rows) {
  NoiseTable table;
  for (const json& row : rows) {
    NoiseRates rates;
    rates.y1_given_z1 = row.at("y1_given_z1").get<double>();
    rates.y1_given_z0 = row.at("y1_given_z0").get<double>();
    const json& counts = row.at("counts");
    rates.counts.z1 = counts.at("z1").get<int>();
    rates.counts.y1_z1 = counts.at("y1_z1").get<int>();
    rates.counts.z0 = counts.at("z0").get<int>();
    rates.counts.y1_z0 = counts.at("y1_z0").get<int>();
    table.per_relation.push_back(rates);
  }
  return table;
}

json ToJson(const PendingBatch& batch) {
  return {{"batch_id", batch.batch_id},
          {"pairs", batch.pairs},
          {"initial", batch.initial}};
}

json ToJson(const VettingState& state) {
  json vetted = json::object();
  for (const auto& [pair_id, labels] : state.vetted) {
    json row = json::array();
    for (Label label : labels) row.push_back(static_cast<int>(label));
    vetted[pair_id] = row;
  }
  json history = json::array();
  for (const IterationRecord& record : state.history) {
    history.push_back(ToJson(record));
  }
  return {{"unvetted", state.unvetted},
          {"vetted", vetted},
          {"initial_budget", state.initial_budget},
          {"budget_remaining", state.budget_remaining},
          {"seed", state.seed ? ToJson(*state.seed) : json(nullptr)},
          {"history", history}};
}

VettingState VettingStateFromJson(const json& j) {
  VettingState state;
  for (const json& id : j.at("unvetted")) {
    state.unvetted.insert(id.get<std::string>());
  }
  for (const auto& [pair_id, row] : j.at("vetted").items()) {
    LabelRow labels;
    for (const json& v : row) {
      const int label = v.get<int>();
      if (label != 0 && label != 1) {
        throw ValidationError("session: vetted label must be 0 or 1");
      }
      labels.push_back(static_cast<Label>(label));
    }
    state.vetted[pair_id] = std::move(labels);
  }
  state.initial_budget = j.at("initial_budget").get<std::size_t>();
  state.budget_remaining = j.at("budget_remaining").get<std::size_t>();
  if (j.contains("seed") && !j["seed"].is_null()) {
    state.seed = IterationRecordFromJson(j["seed"]);
  }
  for (const json& record : j.at("history")) {
    state.history.push_back(IterationRecordFromJson(record));
  }
  return state;
}

void Sha256Update(EVP_MD_CTX* ctx, const std::string& chunk) {
  if (EVP_DigestUpdate(ctx, chunk.data(), chunk.size()) != 1) {
    throw IoError("SHA-256 update failed");
  }
}

}  // namespace

PredictionDataset ParseDataset(std::istream& in,
                               const DatasetOptions& options) {
  std::string text;
  std::size_t line_number = 0;
  std::vector<std::string> relations;
  bool have_header = false;
  std::vector<EntityPair> pairs;
  std::unordered_set<std::string> ids;
  while (std::getline(in, text)) {
    ++line_number;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::exception& e) {
      throw ValidationError("line " + std::to_string(line_number) +
                            ": malformed record: " + e.what());
    }
    if (!record.is_object()) {
      Fail(line_number, "<record>", "expected a JSON object");
    }
    if (!have_header) {
      if (!record.contains("format") || record["format"] != kDatasetFormat) {
        Fail(line_number, "format",
             std::string("header must declare format '") + kDatasetFormat +
                 "'");
      }
      if (!record.contains("version") || !record["version"].is_number() ||
          record["version"].get<int>() > kFormatVersion) {
        Fail(line_number, "version", "unsupported format version");
      }
      if (!record.contains("relations") || !record["relations"].is_array()) {
        Fail(line_number, "relations", "expected an array of names");
      }
      for (const json& name : record["relations"]) {
        if (!name.is_string()) {
          Fail(line_number, "relations", "relation names must be strings");
        }
        relations.push_back(name.get<std::string>());
      }
      have_header = true;
      continue;
    }

    EntityPair pair;
    if (!record.contains("pair_id") || !record["pair_id"].is_string()) {
      Fail(line_number, "pair_id", "missing or not a string");
    }
    pair.pair_id = record["pair_id"].get<std::string>();
    if (!ids.insert(pair.pair_id).second) {
      Fail(line_number, "pair_id", "duplicate pair_id '" + pair.pair_id + "'");
    }
    pair.head = OptionalString(record, "head", line_number);
    pair.tail = OptionalString(record, "tail", line_number);
    if (record.contains("sentences")) {
      if (!record["sentences"].is_array()) {
        Fail(line_number, "sentences", "expected an array of strings");
      }
      for (const json& s : record["sentences"]) {
        if (!s.is_string()) Fail(line_number, "sentences", "expected strings");
        pair.sentences.push_back(s.get<std::string>());
      }
    }
    if (!record.contains("scores")) Fail(line_number, "scores", "missing");
    pair.scores = ParseRelationMap<double>(
        record["scores"], relations, line_number, "scores",
        [&](const json& v, const std::string& field) {
          if (!v.is_number()) Fail(line_number, field, "expected a number");
          double score = v.get<double>();
          if (options.clamp_scores && score >= 0.0 && score <= 1.0) {
            score = std::clamp(score, kClampEpsilon, 1.0 - kClampEpsilon);
          }
          if (!(score > 0.0 && score < 1.0)) {
            Fail(line_number, field, "score must lie strictly inside (0,1)");
          }
          return score;
        });
    const auto label_parser = [&](const json& v, const std::string& field) {
      return ParseLabel(v, line_number, field);
    };
    if (!record.contains("noisy_labels")) {
      Fail(line_number, "noisy_labels", "missing");
    }
    pair.noisy_labels = ParseRelationMap<Label>(
        record["noisy_labels"], relations, line_number, "noisy_labels",
        label_parser);
    if (record.contains("oracle_labels") &&
        !record["oracle_labels"].is_null()) {
      pair.oracle_labels = ParseRelationMap<Label>(
          record["oracle_labels"], relations, line_number, "oracle_labels",
          label_parser);
    }
    pairs.push_back(std::move(pair));
  }
  if (!have_header) throw ValidationError("dataset has no header record");
  return PredictionDataset(std::move(relations), std::move(pairs), options);
}

PredictionDataset LoadDataset(const std::string& path,
                              const DatasetOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  try {
    return ParseDataset(in, options);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void WriteDataset(const PredictionDataset& dataset, std::ostream& out) {
  const auto& relations = dataset.relations();
  out << json{{"format", kDatasetFormat},
              {"version", kFormatVersion},
              {"relations", relations}}
             .dump()
      << '\n';
  for (const EntityPair& pair : dataset.pairs()) {
    json scores = json::object();
    for (std::size_t k = 0; k < relations.size(); ++k) {
      scores[relations[k]] = pair.scores[k];
    }
    json record = {{"pair_id", pair.pair_id},
                   {"head", pair.head},
                   {"tail", pair.tail},
                   {"sentences", pair.sentences},
                   {"scores", scores},
                   {"noisy_labels",
                    RelationObject(relations, pair.noisy_labels)}};
    if (pair.oracle_labels) {
      record["oracle_labels"] = RelationObject(relations, *pair.oracle_labels);
    }
    out << record.dump() << '\n';
  }
}

void SaveDataset(const PredictionDataset& dataset, const std::string& path) {
  std::ostringstream out;
  WriteDataset(dataset, out);
  WriteFileAtomically(path, out.str());
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFileAtomically(const std::string& path, const std::string& content) {
  std::error_code status_error;
  const auto status = std::filesystem::status(path, status_error);
  if (std::filesystem::exists(status) &&
      !std::filesystem::is_regular_file(status)) {
    // Devices and pipes are written in place.
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content).flush()) {
      throw IoError("cannot write '" + path + "'");
    }
    return;
  }
  const std::string temporary = path + ".tmp";
  {
    std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + temporary + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + temporary + "'");
  }
  std::error_code error;
  std::filesystem::rename(temporary, path, error);
  if (error) {
    throw IoError("cannot rename '" + temporary + "' to '" + path +
                  "': " + error.message());
  }
}

std::string HashFile(const std::string& path) {
  std::string content = ReadFile(path);
  std::string normalized;
  normalized.reserve(content.size());
  for (std::size_t i = 0; i < content.size(); ++i) {
    if (content[i] == '\r' && i + 1 < content.size() &&
        content[i + 1] == '\n') {
      continue;
    }
    normalized.push_back(content[i]);
  }
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 initialisation failed");
  }
  Sha256Update(ctx.get(), normalized);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
    throw IoError("SHA-256 finalisation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

json ToJson(const ActiveTestingConfig& config) {
  const EstimatorOptions& e = config.estimator;
  return {{"strategy", StrategyName(config.strategy)},
          {"aggregation", AggregationName(config.aggregation)},
          {"batch_size", config.batch_size},
          {"budget", config.budget},
          {"ks", config.ks},
          {"initial_policy",
           {{"kind", InitialPolicyName(config.initial.kind)},
            {"count", config.initial.count}}},
          {"seed", config.seed},
          {"estimator",
           {{"smoothing_alpha", e.smoothing_alpha},
            {"l2_weight", e.l2_weight},
            {"max_iterations", e.max_iterations},
            {"gradient_tolerance", e.gradient_tolerance},
            {"min_fit_examples", e.min_fit_examples},
            {"noise_scope", NoiseScopeName(e.noise_scope)}}}};
}

ActiveTestingConfig ConfigFromJson(const json& j) {
  ActiveTestingConfig config;
  try {
    if (j.contains("strategy")) {
      config.strategy = ParseStrategy(j["strategy"].get<std::string>());
    }
    if (j.contains("aggregation")) {
      config.aggregation =
          ParseAggregation(j["aggregation"].get<std::string>());
    }
    config.batch_size = j.value("batch_size", config.batch_size);
    config.budget = j.value("budget", config.budget);
    config.ks = j.value("ks", config.ks);
    if (j.contains("initial_policy")) {
      const json& policy = j["initial_policy"];
      if (policy.contains("kind")) {
        config.initial.kind =
            ParseInitialPolicy(policy["kind"].get<std::string>());
      }
      config.initial.count = policy.value("count", config.initial.count);
    }
    config.seed = j.value("seed", config.seed);
    if (j.contains("estimator")) {
      const json& e = j["estimator"];
      EstimatorOptions& o = config.estimator;
      o.smoothing_alpha = e.value("smoothing_alpha", o.smoothing_alpha);
      o.l2_weight = e.value("l2_weight", o.l2_weight);
      o.max_iterations = e.value("max_iterations", o.max_iterations);
      o.gradient_tolerance =
          e.value("gradient_tolerance", o.gradient_tolerance);
      o.min_fit_examples = e.value("min_fit_examples", o.min_fit_examples);
      if (e.contains("noise_scope")) {
        o.noise_scope = ParseNoiseScope(e["noise_scope"].get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad configuration: ") + e.what());
  }
  return config;
}

json ToJson(const SyntheticConfig& c) {
  return {{"pairs", c.n_pairs},
          {"relations", c.relations},
          {"positive_rate", c.positive_rate},
          {"extra_relation_rate", c.extra_relation_rate},
          {"fn_rate", c.false_negative_rate},
          {"fp_rate", c.false_positive_rate},
          {"score_base", c.score_base},
          {"score_signal", c.score_signal},
          {"score_noise", c.score_noise},
          {"seed", c.seed}};
}

SyntheticConfig SyntheticConfigFromJson(const json& j) {
  SyntheticConfig c;
  try {
    c.n_pairs = j.value("pairs", c.n_pairs);
    c.relations = j.value("relations", c.relations);
    c.positive_rate = j.value("positive_rate", c.positive_rate);
    c.extra_relation_rate =
        j.value("extra_relation_rate", c.extra_relation_rate);
    c.false_negative_rate = j.value("fn_rate", c.false_negative_rate);
    c.false_positive_rate = j.value("fp_rate", c.false_positive_rate);
    c.score_base = j.value("score_base", c.score_base);
    c.score_signal = j.value("score_signal", c.score_signal);
    c.score_noise = j.value("score_noise", c.score_noise);
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad synthetic configuration: ") +
                          e.what());
  }
  return c;
}

json ToJson(const MetricReport& report) {
  json at_k = json::array();
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    json row = {{"k", report.ks[i]}, {"precision", report.p_at_k[i]}};
    if (i < report.r_at_k.size()) row["recall"] = report.r_at_k[i];
    at_k.push_back(row);
  }
  json curve = json::array();
  for (const PrPoint& point : report.curve.points) {
    curve.push_back({point.recall, point.precision});
  }
  return {{"source", MetricSourceName(report.source)},
          {"at_k", at_k},
          {"curve", curve}};
}

MetricReport MetricReportFromJson(const json& j) {
  MetricReport report;
  report.source = ParseMetricSource(j.at("source").get<std::string>());
  for (const json& row : j.at("at_k")) {
    report.ks.push_back(row.at("k").get<std::size_t>());
    report.p_at_k.push_back(row.at("precision").get<double>());
    if (row.contains("recall")) {
      report.r_at_k.push_back(row["recall"].get<double>());
    }
  }
  if (j.contains("curve")) {
    for (const json& point : j["curve"]) {
      report.curve.points.push_back(
          {point.at(0).get<double>(), point.at(1).get<double>()});
    }
  }
  return report;
}

json ToJson(const IterationRecord& record) {
  json j = {{"iteration", record.iteration},
            {"batch", record.batch},
            {"budget_remaining", record.budget_remaining},
            {"metrics", ToJson(record.metrics)},
            {"noise", ToJson(record.noise)}};
  if (record.reference_distance) {
    j["reference_distance"] = *record.reference_distance;
  }
  return j;
}

IterationRecord IterationRecordFromJson(const json& j) {
  IterationRecord record;
  record.iteration = j.at("iteration").get<std::size_t>();
  record.batch = j.at("batch").get<std::vector<std::string>>();
  record.budget_remaining = j.at("budget_remaining").get<std::size_t>();
  record.metrics = MetricReportFromJson(j.at("metrics"));
  record.noise = NoiseTableFromJson(j.at("noise"));
  record.reference_distance = OptionalField<double>(j, "reference_distance");
  return record;
}

json ToJson(const EvaluationReport& report) {
  json distances = json::object();
  if (report.expected_distance) {
    distances["expected_vs_oracle"] = *report.expected_distance;
  }
  if (report.held_out_distance) {
    distances["held_out_vs_oracle"] = *report.held_out_distance;
  }
  if (report.initial_distance) distances["initial"] = *report.initial_distance;
  json iterations = json::array();
  for (const IterationRecord& record : report.iterations) {
    iterations.push_back(ToJson(record));
  }
  return {{"format", kReportFormat},
          {"version", kFormatVersion},
          {"ks", report.ks},
          {"held_out", ToJson(report.held_out)},
          {"expected", ToJson(report.expected)},
          {"oracle", report.oracle ? ToJson(*report.oracle) : json(nullptr)},
          {"distances", distances},
          {"seed", report.seed ? ToJson(*report.seed) : json(nullptr)},
          {"iterations", iterations}};
}

EvaluationReport EvaluationReportFromJson(const json& j) {
  EvaluationReport report;
  try {
    report.ks = j.at("ks").get<std::vector<std::size_t>>();
    report.held_out = MetricReportFromJson(j.at("held_out"));
    report.expected = MetricReportFromJson(j.at("expected"));
    if (j.contains("oracle") && !j["oracle"].is_null()) {
      report.oracle = MetricReportFromJson(j["oracle"]);
    }
    const json& distances = j.at("distances");
    report.expected_distance =
        OptionalField<double>(distances, "expected_vs_oracle");
    report.held_out_distance =
        OptionalField<double>(distances, "held_out_vs_oracle");
    report.initial_distance = OptionalField<double>(distances, "initial");
    if (j.contains("seed") && !j["seed"].is_null()) {
      report.seed = IterationRecordFromJson(j["seed"]);
    }
    for (const json& record : j.at("iterations")) {
      report.iterations.push_back(IterationRecordFromJson(record));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
  return report;
}

EvaluationReport ParseReportJson(const std::string& text) {
  try {
    return EvaluationReportFromJson(json::parse(text));
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
}

void SaveSession(const SessionFile& session, const std::string& path) {
  const SessionSnapshot& s = session.snapshot;
  const json document = {
      {"format", kSessionFormat},
      {"version", kFormatVersion},
      {"dataset",
       {{"path", session.dataset.path}, {"sha256", session.dataset.sha256}}},
      {"config", ToJson(s.config)},
      {"rng_state", s.rng_state},
      {"batches_issued", s.batches_issued},
      {"pending", s.pending ? ToJson(*s.pending) : json(nullptr)},
      {"state", ToJson(s.state)}};
  WriteFileAtomically(path, document.dump(1) + "\n");
}

SessionFile LoadSession(const std::string& path) {
  const std::string text = ReadFile(path);
  SessionFile session;
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != kSessionFormat) {
      throw ValidationError("'" + path + "' is not a session file");
    }
    if (j.at("version").get<int>() > kFormatVersion) {
      throw ValidationError("unsupported session version");
    }
    session.dataset.path = j.at("dataset").at("path").get<std::string>();
    session.dataset.sha256 = j.at("dataset").at("sha256").get<std::string>();
    SessionSnapshot& s = session.snapshot;
    s.config = ConfigFromJson(j.at("config"));
    s.rng_state = j.at("rng_state").get<std::string>();
    s.batches_issued = j.at("batches_issued").get<std::uint64_t>();
    if (!j.at("pending").is_null()) {
      const json& pending = j["pending"];
      s.pending = PendingBatch{
          pending.at("batch_id").get<std::string>(),
          pending.at("pairs").get<std::vector<std::string>>(),
          pending.at("initial").get<bool>()};
    }
    s.state = VettingStateFromJson(j.at("state"));
  } catch (const json::exception& e) {
    throw ValidationError("malformed session '" + path + "': " + e.what());
  }
  return session;
}

ResumedSession ResumeSession(const std::string& session_path,
                             const std::string& dataset_override,
                             const DatasetOptions& options) {
  SessionFile file = LoadSession(session_path);
  const std::string dataset_path =
      dataset_override.empty() ? file.dataset.path : dataset_override;
  const std::string hash = HashFile(dataset_path);
  if (hash != file.dataset.sha256) {
    throw ValidationError("dataset '" + dataset_path +
                          "' does not match the session (hash mismatch); "
                          "refusing to resume");
  }
  auto dataset = std::make_shared<const PredictionDataset>(
      LoadDataset(dataset_path, options));
  ActiveTestingSession session =
      ActiveTestingSession::Restore(dataset, file.snapshot);
  return ResumedSession{file.dataset, std::move(dataset), std::move(session)};
}

ReportFormat ParseReportFormat(const std::string& name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw ValidationError("unknown report format '" + name + "'");
}

std::string FormatNumber(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

// section,source,iteration,k,recall,precision,distance,budget_remaining
struct CsvRow {
  std::string section, source, iteration, k, recall, precision, distance,
      budget;
};

void WriteRow(std::ostringstream& out, const CsvRow& r) {
  out << r.section << ',' << r.source << ',' << r.iteration << ',' << r.k
      << ',' << r.recall << ',' << r.precision << ',' << r.distance << ','
      << r.budget << '\n';
}

void WriteAtK(std::ostringstream& out, const MetricReport& report,
              const std::string& iteration, const std::string& distance,
              const std::string& budget, const char* section) {
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    WriteRow(out, {section, MetricSourceName(report.source), iteration,
                   std::to_string(report.ks[i]),
                   i < report.r_at_k.size() ? FormatNumber(report.r_at_k[i])
                                            : "",
                   FormatNumber(report.p_at_k[i]), distance, budget});
  }
}

void WriteRecord(std::ostringstream& out, const IterationRecord& record) {
  WriteAtK(out, record.metrics, std::to_string(record.iteration),
           record.reference_distance ? FormatNumber(*record.reference_distance)
                                     : "",
           std::to_string(record.budget_remaining), "iteration");
}

void WriteCurve(std::ostringstream& out, const MetricReport& report) {
  for (std::size_t i = 0; i < report.curve.points.size(); ++i) {
    const PrPoint& point = report.curve.points[i];
    WriteRow(out, {"curve", MetricSourceName(report.source), "",
                   std::to_string(i + 1), FormatNumber(point.recall),
                   FormatNumber(point.precision), "", ""});
  }
}

}  // namespace

std::string EmitReport(const EvaluationReport& report, ReportFormat format) {
  if (format == ReportFormat::kJson) return ToJson(report).dump(1) + "\n";
  std::ostringstream out;
  out << "section,source,iteration,k,recall,precision,distance,"
         "budget_remaining\n";
  WriteAtK(out, report.held_out, "", "", "", "at_k");
  WriteAtK(out, report.expected, "", "", "", "at_k");
  if (report.oracle) WriteAtK(out, *report.oracle, "", "", "", "at_k");
  if (report.expected_distance) {
    WriteRow(out, {"distance", "expected", "", "", "", "",
                   FormatNumber(*report.expected_distance), ""});
  }
  if (report.held_out_distance) {
    WriteRow(out, {"distance", "held-out", "", "", "", "",
                   FormatNumber(*report.held_out_distance), ""});
  }
  if (report.initial_distance) {
    WriteRow(out, {"distance", "initial", "", "", "", "",
                   FormatNumber(*report.initial_distance), ""});
  }
  if (report.seed) WriteRecord(out, *report.seed);
  for (const IterationRecord& record : report.iterations) {
    WriteRecord(out, record);
  }
  WriteCurve(out, report.held_out);
  WriteCurve(out, report.expected);
  if (report.oracle) WriteCurve(out, *report.oracle);
  return out.str();
}

std::string EmitComparison(const ComparisonTable& table, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    json rows = json::array();
    for (const ComparisonRow& row : table.rows) {
      rows.push_back({{"strategy", StrategyName(row.strategy)},
                      {"budget", row.budget},
                      {"seed", row.seed},
                      {"distance", row.distance},
                      {"held_out_distance", row.held_out_distance},
                      {"abs_error", row.abs_error},
                      {"held_out_abs_error", row.held_out_abs_error},
                      {"trace", row.trace}});
    }
    json summary = json::array();
    for (const ComparisonSummary& s : table.summary) {
      summary.push_back({{"strategy", StrategyName(s.strategy)},
                         {"budget", s.budget},
                         {"mean_distance", s.mean_distance},
                         {"mean_abs_error", s.mean_abs_error}});
    }
    return json{{"ks", table.ks}, {"rows", rows}, {"summary", summary}}
               .dump(1) +
           "\n";
  }
  std::ostringstream out;
  out << "section,strategy,budget,seed,metric,index,value\n";
  const auto line = [&](const char* section, Strategy strategy,
                        std::size_t budget, const std::string& seed,
                        const char* metric, const std::string& index,
                        double value) {
    out << section << ',' << StrategyName(strategy) << ',' << budget << ','
        << seed << ',' << metric << ',' << index << ',' << FormatNumber(value)
        << '\n';
  };
  for (const ComparisonSummary& s : table.summary) {
    line("summary", s.strategy, s.budget, "", "mean_distance", "",
         s.mean_distance);
    for (std::size_t i = 0; i < table.ks.size(); ++i) {
      line("summary", s.strategy, s.budget, "", "mean_abs_error",
           std::to_string(table.ks[i]), s.mean_abs_error[i]);
    }
  }
  for (const ComparisonRow& row : table.rows) {
    const std::string seed = std::to_string(row.seed);
    line("row", row.strategy, row.budget, seed, "distance", "", row.distance);
    line("row", row.strategy, row.budget, seed, "held_out_distance", "",
         row.held_out_distance);
    for (std::size_t i = 0; i < table.ks.size(); ++i) {
      line("row", row.strategy, row.budget, seed, "abs_error",
           std::to_string(table.ks[i]), row.abs_error[i]);
      line("row", row.strategy, row.budget, seed, "held_out_abs_error",
           std::to_string(table.ks[i]), row.held_out_abs_error[i]);
    }
    for (std::size_t i = 0; i < row.trace.size(); ++i) {
      line("row", row.strategy, row.budget, seed, "trace", std::to_string(i),
           row.trace[i]);
    }
  }
  return out.str();
}

json BatchView(const PredictionDataset& dataset, const PendingBatch& batch) {
  json pairs = json::array();
  for (const std::string& pair_id : batch.pairs) {
    const auto index = dataset.FindPair(pair_id);
    if (!index) throw ValidationError("unknown pair '" + pair_id + "'");
    const EntityPair& pair = dataset.pair(*index);
    json relations = json::array();
    for (std::size_t k = 0; k < dataset.num_relations(); ++k) {
      relations.push_back({{"relation", dataset.relations()[k]},
                           {"score", pair.scores[k]},
                           {"noisy_label",
                            static_cast<int>(pair.noisy_labels[k])}});
    }
    pairs.push_back({{"pair_id", pair.pair_id},
                     {"head", pair.head},
                     {"tail", pair.tail},
                     {"sentences", pair.sentences},
                     {"relations", relations}});
  }
  return {{"batch_id", batch.batch_id},
          {"initial", batch.initial},
          {"pairs", pairs}};
}

std::string ParseBatchLabels(const json& j, const PredictionDataset& dataset,
                             BatchLabels* labels) {
  if (!j.is_object() || !j.contains("batch_id") ||
      !j["batch_id"].is_string()) {
    throw ValidationError("labels payload needs a string 'batch_id'");
  }
  if (!j.contains("labels") || !j["labels"].is_object()) {
    throw ValidationError("labels payload needs a 'labels' object");
  }
  const auto& relations = dataset.relations();
  labels->clear();
  for (const auto& [pair_id, row] : j["labels"].items()) {
    LabelRow parsed;
    if (row.is_array()) {
      if (row.size() != relations.size()) {
        throw ValidationError("labels for pair '" + pair_id + "' have " +
                              std::to_string(row.size()) +
                              " entries, expected " +
                              std::to_string(relations.size()));
      }
      for (std::size_t k = 0; k < row.size(); ++k) {
        parsed.push_back(ParseLabel(row[k], 0, pair_id));
      }
    } else {
      parsed = ParseRelationMap<Label>(
          row, relations, 0, pair_id,
          [&](const json& v, const std::string& field) {
            return ParseLabel(v, 0, field);
          });
    }
    (*labels)[pair_id] = std::move(parsed);
  }
  return j["batch_id"].get<std::string>();
}

}  // namespace activetest
