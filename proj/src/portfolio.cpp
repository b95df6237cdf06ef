#include "econqe/portfolio.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "econqe/error.hpp"
#include "econqe/smt2.hpp"

namespace econqe {

namespace {

using Clock = std::chrono::steady_clock;
using std::chrono::milliseconds;

constexpr milliseconds kPollInterval{2};
constexpr milliseconds kTerminateGrace{200};
constexpr std::size_t kStderrExcerpt = 400;

std::size_t count_placeholders(const std::string& cmd) {
  std::size_t n = 0;
  for (auto pos = cmd.find("{file}"); pos != std::string::npos; pos = cmd.find("{file}", pos + 1)) ++n;
  return n;
}

bool parse_flag(const std::string& text, const std::string& section) {
  const std::string v = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(text));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error("solver '" + section + "': parses_model must be a boolean, got '" + text + "'");
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

/// A temporary file removed on destruction.
class TempFile {
 public:
  explicit TempFile(const std::string& suffix) {
    const char* dir = std::getenv("TMPDIR");
    std::string pattern = std::string(dir && *dir ? dir : "/tmp") + "/econqe-XXXXXX" + suffix;
    std::vector<char> buf(pattern.begin(), pattern.end());
    buf.push_back('\0');
    fd_ = mkstemps(buf.data(), static_cast<int>(suffix.size()));
    if (fd_ < 0) throw Error("cannot create temporary file in " + std::string(dir && *dir ? dir : "/tmp"));
    path_ = buf.data();
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  ~TempFile() {
    if (fd_ >= 0) ::close(fd_);
    ::unlink(path_.c_str());
  }

  const std::string& path() const { return path_; }
  int fd() const { return fd_; }

  void write(const std::string& text) {
    std::size_t done = 0;
    while (done < text.size()) {
      const ssize_t n = ::write(fd_, text.data() + done, text.size() - done);
      if (n <= 0) throw Error("cannot write " + path_);
      done += static_cast<std::size_t>(n);
    }
  }

  std::string read() const {
    std::ifstream in(path_);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

 private:
  int fd_ = -1;
  std::string path_;
};

struct Lane {
  const SolverSpec* spec = nullptr;
  pid_t pid = -1;
  std::unique_ptr<TempFile> out;
  std::unique_ptr<TempFile> err;
  Clock::time_point start;
  milliseconds limit{0};
  bool running = false;
  ExternalResult result;
};

void start_lane(Lane& lane, const std::string& script_path) {
  lane.result.solver = lane.spec->name;
  lane.start = Clock::now();
  std::string cmd = lane.spec->command;
  cmd.replace(cmd.find("{file}"), 6, shell_quote(script_path));
  try {
    lane.out = std::make_unique<TempFile>(".out");
    lane.err = std::make_unique<TempFile>(".err");
  } catch (const Error& e) {
    lane.result.reason = std::string("spawn-failed: ") + e.what();
    return;
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    lane.result.reason = "spawn-failed: fork";
    return;
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(lane.out->fd(), STDOUT_FILENO);
    ::dup2(lane.err->fd(), STDERR_FILENO);
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    ::execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  lane.pid = pid;
  lane.running = true;
}

void stop_lane(Lane& lane) {
  if (!lane.running) return;
  ::kill(-lane.pid, SIGTERM);
  const auto until = Clock::now() + kTerminateGrace;
  int status = 0;
  while (Clock::now() < until) {
    if (::waitpid(lane.pid, &status, WNOHANG) == lane.pid) {
      ::kill(-lane.pid, SIGKILL);  // stragglers in the group
      lane.running = false;
      return;
    }
    std::this_thread::sleep_for(kPollInterval);
  }
  ::kill(-lane.pid, SIGKILL);
  ::waitpid(lane.pid, &status, 0);
  lane.running = false;
}

std::string first_word(const std::string& text, std::size_t& rest) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  std::size_t j = i;
  while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
  rest = j;
  return text.substr(i, j - i);
}

void interpret(Lane& lane, int wait_status, const ExistsFormula& query) {
  ExternalResult& r = lane.result;
  const std::string out = lane.out->read();
  std::string err = lane.err->read();
  if (err.size() > kStderrExcerpt) err.resize(kStderrExcerpt);
  r.stderr_excerpt = err;
  std::size_t rest = 0;
  const std::string word = first_word(out, rest);
  if (word == "unsat") {
    r.status = Status::Unsat;
    return;
  }
  if (word != "sat") {
    if (word.rfind("(error", 0) == 0) {
      r.reason = "solver-error";
    } else if (word == "unknown" || word == "timeout") {
      r.reason = word;
    } else if (WIFEXITED(wait_status) && WEXITSTATUS(wait_status) == 127) {
      r.reason = "spawn-failed: command not found";
    } else {
      r.reason = "unrecognized-output";
    }
    return;
  }
  r.status = Status::Sat;
  std::string model = out.substr(rest);
  if (model.find_first_not_of(" \t\r\n") == std::string::npos) {
    if (lane.spec->parses_model) {
      r.status = Status::Unknown;
      r.reason = "model-missing";
    } else {
      r.reason = "unvalidated-model";
    }
    return;
  }
  r.model_text = model;
  if (!lane.spec->parses_model) {
    r.reason = "unvalidated-model";
    return;
  }
  Smt2Model parsed;
  try {
    parsed = parse_smt2_model(model, query.vars);
  } catch (const ParseError&) {
    r.status = Status::Unknown;
    r.reason = "model-parse-failed";
    return;
  }
  if (parsed.algebraic) {
    r.reason = "unvalidated-model";
    return;
  }
  // Solvers may omit variables that do not matter; any value works for those.
  for (VarId v : variables_of(query.matrix)) parsed.point.try_emplace(v, 0);
  for (VarId v : query.bound) parsed.point.try_emplace(v, 0);
  bool valid = false;
  try {
    valid = evaluate_at(query.matrix, parsed.point);
  } catch (const Error&) {
    valid = false;
  }
  if (!valid) {
    r.status = Status::Unknown;
    r.reason = "model-validation-failed";
    return;
  }
  r.witness = std::move(parsed.point);
}

/// Polls running lanes until one gives a definitive answer (returned) or all
/// have stopped (nullopt).
std::optional<std::size_t> wait_for_answer(std::vector<Lane>& lanes, const ExistsFormula& query) {
  for (;;) {
    bool any_running = false;
    for (std::size_t i = 0; i < lanes.size(); ++i) {
      Lane& lane = lanes[i];
      if (!lane.running) continue;
      int status = 0;
      const pid_t done = ::waitpid(lane.pid, &status, WNOHANG);
      const auto elapsed = std::chrono::duration_cast<milliseconds>(Clock::now() - lane.start);
      if (done == lane.pid) {
        lane.running = false;
        ::kill(-lane.pid, SIGKILL);
        lane.result.duration = elapsed;
        interpret(lane, status, query);
        if (lane.result.status != Status::Unknown) return i;
        continue;
      }
      if (elapsed >= lane.limit) {
        stop_lane(lane);
        lane.result.duration = elapsed;
        lane.result.reason = "timeout";
        continue;
      }
      any_running = true;
    }
    if (!any_running) return std::nullopt;
    std::this_thread::sleep_for(kPollInterval);
  }
}

}  // namespace

std::vector<SolverSpec> load_solver_config(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error("solver config: " + std::string(e.what()));
  }
  std::vector<SolverSpec> out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw Error("solver config " + path + ": key '" + section + "' outside a section");
    SolverSpec spec;
    spec.name = body.get<std::string>("name", section);
    const auto cmd = body.get_optional<std::string>("cmd");
    if (!cmd) throw Error("solver '" + section + "': missing cmd");
    spec.command = *cmd;
    if (count_placeholders(spec.command) != 1) {
      throw Error("solver '" + section + "': cmd must contain exactly one {file}");
    }
    if (const auto text = body.get_optional<std::string>("timeout_ms")) {
      long value = 0;
      const auto t = boost::algorithm::trim_copy(*text);
      const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
      if (ec != std::errc() || end != t.data() + t.size() || value <= 0) {
        throw Error("solver '" + section + "': timeout_ms must be a positive integer, got '" + *text + "'");
      }
      spec.timeout = milliseconds(value);
    }
    spec.parses_model = parse_flag(body.get<std::string>("parses_model", "true"), section);
    out.push_back(std::move(spec));
  }
  return out;
}

std::optional<std::string> solver_config_path(const std::optional<std::string>& explicit_path) {
  if (explicit_path && !explicit_path->empty()) return explicit_path;
  if (const char* env = std::getenv("ECONQE_SOLVERS"); env && *env) return std::string(env);
  return std::nullopt;
}

PortfolioResult run_portfolio(const ExistsFormula& query, const std::vector<SolverSpec>& solvers, PortfolioMode mode,
                              std::optional<milliseconds> deadline) {
  if (solvers.empty()) throw Error("run_portfolio needs at least one solver");
  TempFile script(".smt2");
  script.write(emit_smt2(query));

  std::vector<Lane> lanes(solvers.size());
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    lanes[i].spec = &solvers[i];
    lanes[i].limit = deadline ? std::min(solvers[i].timeout, *deadline) : solvers[i].timeout;
  }

  std::optional<std::size_t> winner;
  if (mode == PortfolioMode::Race) {
    for (auto& lane : lanes) start_lane(lane, script.path());
    winner = wait_for_answer(lanes, query);
    for (auto& lane : lanes) {
      if (!lane.running) continue;
      stop_lane(lane);
      lane.result.duration = std::chrono::duration_cast<milliseconds>(Clock::now() - lane.start);
      lane.result.reason = "cancelled";
    }
  } else {
    for (std::size_t i = 0; i < lanes.size() && !winner; ++i) {
      start_lane(lanes[i], script.path());
      std::vector<Lane> single;
      single.push_back(std::move(lanes[i]));
      if (wait_for_answer(single, query)) winner = i;
      lanes[i] = std::move(single[0]);
    }
  }

  PortfolioResult result;
  for (auto& lane : lanes) {
    if (!lane.spec) continue;
    if (lane.result.solver.empty()) {
      lane.result.solver = lane.spec->name;
      lane.result.reason = "not-run";
    }
    result.lanes.push_back(lane.result);
  }
  if (winner) {
    const ExternalResult& r = lanes[*winner].result;
    result.solver = r.solver;
    result.verdict = Verdict{r.status, r.witness, r.reason};
    return result;
  }
  const bool all_timeout = std::all_of(result.lanes.begin(), result.lanes.end(),
                                       [](const ExternalResult& r) { return r.reason == "timeout"; });
  std::string reason = "timeout";
  if (!all_timeout) {
    for (const auto& r : result.lanes) {
      if (r.reason != "timeout" && r.reason != "not-run") {
        reason = r.solver + ": " + r.reason;
        break;
      }
    }
  }
  result.verdict = Verdict::unknown(reason);
  return result;
}

}  // namespace econqe
