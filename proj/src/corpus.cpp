#include "econqe/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <curl/curl.h>

#include "econqe/error.hpp"
#include "econqe/smt2.hpp"

namespace econqe {

namespace fs = std::filesystem;

namespace {

enum class Role { Assumptions, Example, Counterexample, Unknown };

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Role role_of_word(const std::string& w) {
  static const std::set<std::string> assumptions = {"assumptions", "assumption", "assume", "assumes",
                                                    "compat", "compatibility", "consistency", "ass"};
  static const std::set<std::string> example = {"example", "examples", "true", "pos", "positive", "witness", "ah"};
  static const std::set<std::string> counter = {"counterexample", "counterexamples", "cex", "counter", "false",
                                                "neg", "negative", "negated", "anoth", "anh"};
  if (assumptions.count(w)) return Role::Assumptions;
  if (example.count(w)) return Role::Example;
  if (counter.count(w)) return Role::Counterexample;
  return Role::Unknown;
}

std::optional<std::string> digit_run(const std::string& text) {
  static const std::regex digits("[0-9]+");
  std::smatch m;
  if (std::regex_search(text, m, digits)) return m.str();
  return std::nullopt;
}

struct Classified {
  std::string id;
  Role role = Role::Unknown;
};

Classified classify_name(const fs::path& relative) {
  const std::string stem = relative.stem().string();
  Classified out;
  std::vector<std::string> rest;
  for (const auto& w : words(stem)) {
    const Role r = role_of_word(w);
    if (r != Role::Unknown && out.role == Role::Unknown) {
      out.role = r;
    } else {
      rest.push_back(w);
    }
  }
  if (auto d = digit_run(stem)) {
    out.id = *d;
    return out;
  }
  for (auto it = relative.parent_path().end(); it != relative.parent_path().begin();) {
    --it;
    if (auto d = digit_run(it->string())) {
      out.id = *d;
      return out;
    }
  }
  for (const auto& w : rest) out.id += (out.id.empty() ? "" : "-") + w;
  if (out.id.empty()) out.id = relative.parent_path().filename().string();
  return out;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

const char* role_name(Role r) {
  switch (r) {
    case Role::Assumptions: return "assumptions";
    case Role::Example: return "example";
    case Role::Counterexample: return "counterexample";
    case Role::Unknown: break;
  }
  return "unknown";
}

}  // namespace

bool CorpusEntry::complete() const {
  if (format == Format::Econ) return model.has_value();
  return assumptions && example && counterexample;
}

const CorpusEntry* CorpusIndex::find(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string file_sha256(const fs::path& path) { return sha256_hex(read_file(path)); }

CorpusIndex index_corpus(const fs::path& root) {
  CorpusIndex index;
  index.root = root;
  if (!fs::is_directory(root)) {
    index.warnings.push_back("corpus directory " + root.string() + " does not exist");
    index.digest = sha256_hex("");
    return index;
  }
  std::vector<fs::path> files;
  for (const auto& item : fs::recursive_directory_iterator(root)) {
    if (!item.is_regular_file()) continue;
    const auto ext = item.path().extension().string();
    if (ext == ".smt2" || ext == ".econ") files.push_back(fs::relative(item.path(), root));
  }
  std::sort(files.begin(), files.end());

  std::string listing;
  std::map<std::string, CorpusEntry> by_id;
  std::map<std::string, std::vector<fs::path>> unassigned;
  bool content_roles = false;
  for (const auto& rel : files) {
    listing += rel.generic_string() + " " + file_sha256(root / rel) + "\n";
    if (rel.extension() == ".econ") {
      CorpusEntry e;
      e.id = rel.stem().string();
      e.format = CorpusEntry::Format::Econ;
      e.model = root / rel;
      if (by_id.count(e.id)) index.warnings.push_back("duplicate id " + e.id + " (" + rel.string() + ")");
      by_id[e.id] = e;
      continue;
    }
    ++index.smt2_files;
    const auto c = classify_name(rel);
    CorpusEntry& e = by_id[c.id];
    e.id = c.id;
    e.format = CorpusEntry::Format::Smt2;
    std::optional<fs::path>* slot = nullptr;
    switch (c.role) {
      case Role::Assumptions: slot = &e.assumptions; break;
      case Role::Example: slot = &e.example; break;
      case Role::Counterexample: slot = &e.counterexample; break;
      case Role::Unknown: unassigned[c.id].push_back(root / rel); continue;
    }
    if (*slot) {
      index.warnings.push_back("theorem " + c.id + ": two " + role_name(c.role) + " files (" + rel.string() + ")");
    } else {
      *slot = root / rel;
    }
  }

  // Scripts without a role word: the smallest is the assumptions query; of the
  // other two, the one with more (not ...) and (or ...) nodes is the
  // counterexample query, since a negated conjunction of signs is a disjunction.
  for (auto& [id, paths] : unassigned) {
    CorpusEntry& e = by_id[id];
    std::vector<std::optional<fs::path>*> open;
    for (auto* slot : {&e.assumptions, &e.example, &e.counterexample}) {
      if (!*slot) open.push_back(slot);
    }
    if (paths.size() != 3 || open.size() != 3) {
      index.warnings.push_back("theorem " + id + ": cannot assign roles to " + std::to_string(paths.size()) +
                               " unlabelled scripts");
      continue;
    }
    content_roles = true;
    std::vector<std::pair<std::string, fs::path>> texts;
    for (const auto& p : paths) texts.emplace_back(read_file(p), p);
    std::sort(texts.begin(), texts.end(),
              [](const auto& a, const auto& b) { return a.first.size() < b.first.size(); });
    auto negations = [](const std::string& t) { return count_of(t, "(not") + count_of(t, "(or"); };
    const std::size_t n1 = negations(texts[1].first);
    const std::size_t n2 = negations(texts[2].first);
    if (n1 == n2) {
      index.warnings.push_back("theorem " + id + ": example and counterexample scripts are indistinguishable");
      continue;
    }
    e.assumptions = texts[0].second;
    e.example = n1 < n2 ? texts[1].second : texts[2].second;
    e.counterexample = n1 < n2 ? texts[2].second : texts[1].second;
  }

  for (auto& [id, e] : by_id) {
    if (!e.complete()) index.warnings.push_back("theorem " + id + " is incomplete");
    index.entries.push_back(std::move(e));
  }
  index.digest = sha256_hex(listing);
  index.layout = "theorem id = first digit run of the file stem (else of its directories, else the stem without "
                 "its role word); role = role word in the stem";
  if (content_roles) index.layout += "; unlabelled trios: smallest script = assumptions, more (not ...)/(or ...) = counterexample";
  if (files.empty()) index.warnings.push_back("no .smt2 or .econ files below " + root.string());
  return index;
}

QueryTrio load_trio(const CorpusEntry& entry) {
  if (!entry.complete()) throw Error("theorem " + entry.id + " is incomplete");
  if (entry.format == CorpusEntry::Format::Econ) {
    return build_query_trio(parse_problem(read_file(*entry.model), entry.id));
  }
  auto parse = [](const fs::path& path, const VariableTable& base) {
    try {
      return parse_smt2(read_file(path), base).query;
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what(), e.line(), e.column());
    }
  };
  QueryTrio trio;
  trio.assumptions = parse(*entry.assumptions, VariableTable{});
  trio.example = parse(*entry.example, trio.assumptions.vars);
  trio.counterexample = parse(*entry.counterexample, trio.example.vars);
  trio.assumptions.vars = trio.counterexample.vars;
  trio.example.vars = trio.counterexample.vars;
  return trio;
}

std::string entry_source(const CorpusEntry& entry) {
  if (entry.format == CorpusEntry::Format::Econ) return read_file(*entry.model);
  std::string out;
  for (const auto& [name, path] : {std::pair{"assumptions", entry.assumptions}, std::pair{"example", entry.example},
                                   std::pair{"counterexample", entry.counterexample}}) {
    if (!path) continue;
    out += "; ---- " + std::string(name) + ": " + path->filename().string() + "\n" + read_file(*path);
    if (!out.empty() && out.back() != '\n') out += '\n';
  }
  return out;
}

nlohmann::json to_json(const CorpusIndex& index) {
  nlohmann::json entries = nlohmann::json::array();
  std::size_t complete = 0;
  for (const auto& e : index.entries) {
    nlohmann::json files = nlohmann::json::object();
    auto rel = [&](const fs::path& p) { return fs::relative(p, index.root).generic_string(); };
    if (e.model) files["model"] = rel(*e.model);
    if (e.assumptions) files["assumptions"] = rel(*e.assumptions);
    if (e.example) files["example"] = rel(*e.example);
    if (e.counterexample) files["counterexample"] = rel(*e.counterexample);
    complete += e.complete();
    entries.push_back({{"id", e.id},
                       {"format", e.format == CorpusEntry::Format::Econ ? "econ" : "smt2"},
                       {"complete", e.complete()},
                       {"files", std::move(files)}});
  }
  return {{"root", index.root.string()},
          {"digest", index.digest},
          {"layout", index.layout},
          {"smt2_files", index.smt2_files},
          {"theorems", index.entries.size()},
          {"complete", complete},
          {"warnings", index.warnings},
          {"entries", std::move(entries)}};
}

namespace {

std::size_t write_to_string(char* data, std::size_t size, std::size_t count, void* out) {
  static_cast<std::string*>(out)->append(data, size * count);
  return size * count;
}

std::string http_get(const std::string& url) {
  CURL* curl = curl_easy_init();
  if (!curl) throw Error("curl initialisation failed");
  std::string body;
  curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(curl, CURLOPT_CONNECTTIMEOUT, 30L);
  curl_easy_setopt(curl, CURLOPT_USERAGENT, "econqe-fetch");
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, write_to_string);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &body);
  const CURLcode rc = curl_easy_perform(curl);
  curl_easy_cleanup(curl);
  if (rc != CURLE_OK) throw Error("download of " + url + " failed: " + curl_easy_strerror(rc));
  return body;
}

void run_or_throw(const std::string& command, const std::string& what) {
  if (std::system(command.c_str()) != 0) throw Error(what + " failed: " + command);
}

bool is_archive(const fs::path& p) {
  const std::string name = p.filename().string();
  for (const char* ext : {".zip", ".tar", ".tar.gz", ".tgz", ".tar.bz2", ".tar.xz"}) {
    const std::string e = ext;
    if (name.size() >= e.size() && name.compare(name.size() - e.size(), e.size(), e) == 0) return true;
  }
  return false;
}

void unpack(const fs::path& archive, const fs::path& dest) {
  if (archive.extension() == ".zip") {
    run_or_throw("python3 -m zipfile -e " + shell_quote(archive.string()) + " " + shell_quote(dest.string()),
                 "unzip");
  } else {
    run_or_throw("tar -xf " + shell_quote(archive.string()) + " -C " + shell_quote(dest.string()), "tar");
  }
}

/// Record id of a Zenodo DOI or record URL.
std::optional<std::string> zenodo_record(const std::string& source) {
  static const std::regex doi(R"(zenodo\.([0-9]+))");
  static const std::regex record(R"(zenodo\.org/(?:api/)?records?/([0-9]+))");
  std::smatch m;
  if (std::regex_search(source, m, record) || std::regex_search(source, m, doi)) return m[1].str();
  return std::nullopt;
}

}  // namespace

CorpusIndex fetch_corpus(const std::string& source, const fs::path& dest) {
  fs::create_directories(dest);
  const bool remote = source.rfind("http://", 0) == 0 || source.rfind("https://", 0) == 0;
  if (!remote) {
    const fs::path local(source);
    if (fs::is_directory(local)) {
      fs::copy(local, dest, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
    } else if (fs::is_regular_file(local) && is_archive(local)) {
      unpack(local, dest);
    } else {
      throw Error("corpus source " + source + " is neither a directory, an archive nor a URL");
    }
  } else {
    curl_global_init(CURL_GLOBAL_DEFAULT);
    std::vector<std::pair<std::string, std::string>> downloads;  // (name, url)
    if (auto id = zenodo_record(source)) {
      const auto record = nlohmann::json::parse(http_get("https://zenodo.org/api/records/" + *id));
      for (const auto& f : record.value("files", nlohmann::json::array())) {
        const std::string name = f.contains("key") ? f["key"].get<std::string>() : f.value("filename", "file");
        const auto& links = f.at("links");
        downloads.emplace_back(name, links.contains("self") ? links["self"].get<std::string>()
                                                            : links.at("download").get<std::string>());
      }
      if (downloads.empty()) throw Error("Zenodo record " + *id + " lists no files");
    } else {
      downloads.emplace_back(fs::path(source).filename().string(), source);
    }
    for (const auto& [name, url] : downloads) {
      const fs::path target = dest / fs::path(name).filename();
      std::ofstream(target, std::ios::binary) << http_get(url);
      if (is_archive(target)) {
        unpack(target, dest);
        fs::remove(target);
      }
    }
  }
  // Archives inside the copied tree (the record may nest them).
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<fs::path> nested;
    for (const auto& item : fs::recursive_directory_iterator(dest)) {
      if (item.is_regular_file() && is_archive(item.path())) nested.push_back(item.path());
    }
    for (const auto& a : nested) {
      unpack(a, a.parent_path());
      fs::remove(a);
    }
  }
  CorpusIndex index = index_corpus(dest);
  if (index.smt2_files != kCorpusQueryFiles) {
    index.warnings.push_back("expected " + std::to_string(kCorpusQueryFiles) + " query files, found " +
                             std::to_string(index.smt2_files));
  }
  return index;
}

}  // namespace econqe
