#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "econqe/encoders.hpp"

namespace econqe {

/// DOI of the published benchmark set.
inline constexpr const char* kCorpusDoi = "https://doi.org/10.5281/zenodo.1226892";
/// Expected size of the published set: 45 theorems, three queries each.
inline constexpr std::size_t kCorpusTheorems = 45;
inline constexpr std::size_t kCorpusQueryFiles = 135;

struct CorpusEntry {
  enum class Format { Econ, Smt2 };
  std::string id;
  Format format = Format::Smt2;
  /// The .econ file (Econ format).
  std::optional<std::filesystem::path> model;
  /// The three query scripts (Smt2 format); missing ones make the entry incomplete.
  std::optional<std::filesystem::path> assumptions, example, counterexample;

  bool complete() const;
};

struct CorpusIndex {
  std::filesystem::path root;
  std::vector<CorpusEntry> entries;  // sorted by id
  std::size_t smt2_files = 0;
  /// SHA-256 over the sorted (relative path, file SHA-256) list.
  std::string digest;
  /// How ids and query roles were read off the file names.
  std::string layout;
  std::vector<std::string> warnings;

  const CorpusEntry* find(const std::string& id) const;
};

/// Indexes .econ models and .smt2 query scripts below `root`, recursively.
/// Scripts are grouped into theorems by file name: the id is the first run of
/// digits (or the stem without its role word), the role comes from words such
/// as "assumptions", "example"/"true", "counterexample"/"false". A missing
/// directory yields an empty index with a warning.
CorpusIndex index_corpus(const std::filesystem::path& root);

/// The entry's three queries over one shared variable table.
/// Throws econqe::Error for incomplete entries, ParseError for bad files.
QueryTrio load_trio(const CorpusEntry& entry);
/// Original text: the .econ file, or the three scripts with role headers.
std::string entry_source(const CorpusEntry& entry);

/// Summary: {root, digest, layout, smt2_files, theorems, complete, warnings,
/// entries: [{id, format, complete, files}]}.
nlohmann::json to_json(const CorpusIndex& index);

std::string sha256_hex(std::string_view data);
std::string file_sha256(const std::filesystem::path& path);

/// Downloads (http/https URL or the DOI above, resolved through the Zenodo
/// records API) or copies (local directory or archive) the corpus into
/// `dest`, unpacks .zip/.tar* archives and indexes the result. Warns when the
/// query-file count differs from the published one. Throws econqe::Error on
/// network or unpacking failures.
CorpusIndex fetch_corpus(const std::string& source, const std::filesystem::path& dest);

}  // namespace econqe
