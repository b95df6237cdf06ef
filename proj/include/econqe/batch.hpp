#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "econqe/classifier.hpp"
#include "econqe/corpus.hpp"

namespace econqe {

inline constexpr const char* kVersion = "0.3.0";
inline constexpr int kManifestSchemaVersion = 1;

struct BatchRow {
  std::string id;
  std::optional<ClassificationResult> result;
  /// Set when loading or classifying threw; the row then counts as Unknown.
  std::string error;
};

struct RunManifest {
  ClassifierOptions options;
  std::size_t workers = 1;
  std::string corpus_root;
  std::string corpus_digest;
  std::vector<BatchRow> rows;  // id order
  std::chrono::milliseconds wall{0};
  /// "econqe" plus the first --version line of each configured solver.
  std::map<std::string, std::string> tool_versions;

  /// Outcome label -> count; rows with errors count as "Unknown".
  std::map<std::string, std::size_t> outcome_counts() const;
  /// Decided counterexample queries, by status.
  std::size_t counterexample_count(Status status) const;
  std::size_t error_count() const;
};

/// Classifies every complete entry with `workers` threads. Rows come out in id
/// order whatever the completion order; failures become rows with an error.
RunManifest batch_classify(const CorpusIndex& index, const ClassifierOptions& options, std::size_t workers = 1);

/// {schema_version, tool_versions, config, corpus, rows, summary, wall_millis}.
/// Timing fields are "millis" and "wall_millis"; everything else is
/// reproducible under the same config and seed.
nlohmann::json to_json(const RunManifest& manifest);
/// The manifest JSON with timing fields removed (for determinism checks).
nlohmann::json without_timings(nlohmann::json manifest);

nlohmann::json to_json(const ClassifierOptions& options);

}  // namespace econqe
