#pragma once

// Educator workflow state and the operations that move it forward:
// draft -> clues_ready -> generated. Sessions persist as one JSON file each.

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "karekurucu/clueforge.hpp"
#include "karekurucu/error.hpp"
#include "karekurucu/gridengine.hpp"

namespace karekurucu::session {

namespace fs = std::filesystem;
using clueforge::ClueCandidate;
using clueforge::ClueRequest;

enum class Status { Draft, CluesReady, Generated };

constexpr std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::Draft: return "draft";
    case Status::CluesReady: return "clues_ready";
    case Status::Generated: return "generated";
  }
  return "draft";
}

inline Status status_from_string(std::string_view s) {
  if (s == "draft") return Status::Draft;
  if (s == "clues_ready") return Status::CluesReady;
  if (s == "generated") return Status::Generated;
  throw Error(Errc::ValidationFailed, "unknown status " + std::string(s));
}

struct InputFailure {
  std::string answer;
  std::string code;
  std::string message;
};

/// A generated puzzle plus how the search ended.
struct GeneratedPuzzle {
  grid::PuzzleDocument document;
  grid::ScoreBreakdown score;
  grid::TerminationReason reason = grid::TerminationReason::NoMovesRemain;
  int adjustments = 0;
  std::vector<std::string> unplaced;
};

struct Session {
  std::string id;
  clueforge::Clock::time_point created_at{};
  std::vector<ClueRequest> inputs;
  std::vector<ClueCandidate> candidates;
  std::vector<InputFailure> failures;
  std::map<std::string, std::string> selections;  // answer -> chosen clue
  std::optional<GeneratedPuzzle> puzzle;
  Status status = Status::Draft;
  bool generating = false;
  std::optional<nlohmann::json> last_error;

  /// Throws Error(ValidationFailed) if the state is inconsistent.
  void validate() const {
    if (id.empty()) throw Error(Errc::ValidationFailed, "session without id");
    if (inputs.empty()) throw Error(Errc::ValidationFailed, "session without inputs");
    std::set<std::string> answers;
    std::set<std::string> ids;
    for (const auto& c : candidates) {
      answers.insert(c.answer.text());
      if (!ids.insert(c.id).second) throw Error(Errc::ValidationFailed, "duplicate candidate id " + c.id);
    }
    for (const auto& [answer, clue] : selections) {
      if (!answers.contains(answer)) {
        throw Error(Errc::ValidationFailed, "selection for " + answer + " has no candidates");
      }
    }
    if (status == Status::Draft && (!candidates.empty() || !selections.empty() || puzzle)) {
      throw Error(Errc::ValidationFailed, "draft session carries clues or a puzzle");
    }
    if (status == Status::CluesReady && puzzle) throw Error(Errc::ValidationFailed, "puzzle before generation");
    if (status == Status::Generated && !puzzle) throw Error(Errc::ValidationFailed, "generated session without puzzle");
  }
};

inline void to_json(nlohmann::json& j, const GeneratedPuzzle& g) {
  j = {{"document", g.document},
       {"score", {{"FW", g.score.fw}, {"LL", g.score.ll}, {"FR", g.score.fr}, {"LR", g.score.lr}, {"score", g.score.score}}},
       {"termination_reason", grid::to_string(g.reason)},
       {"adjustments", g.adjustments},
       {"unplaced", g.unplaced}};
}

inline void from_json(const nlohmann::json& j, GeneratedPuzzle& g) {
  g.document = j.at("document").get<grid::PuzzleDocument>();
  const auto& s = j.at("score");
  g.score = {s.at("FW").get<int>(), s.at("LL").get<int>(), s.at("FR").get<double>(), s.at("LR").get<double>(),
             s.at("score").get<double>()};
  const std::string reason = j.at("termination_reason").get<std::string>();
  for (auto r : {grid::TerminationReason::MinWordsAndFillReached, grid::TerminationReason::MaxAdjustmentsExhausted,
                 grid::TerminationReason::TimeBudgetExhausted, grid::TerminationReason::NoMovesRemain}) {
    if (grid::to_string(r) == reason) g.reason = r;
  }
  g.adjustments = j.at("adjustments").get<int>();
  g.unplaced = j.at("unplaced").get<std::vector<std::string>>();
}

inline void to_json(nlohmann::json& j, const Session& s) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : s.failures) failures.push_back({{"answer", f.answer}, {"code", f.code}, {"message", f.message}});
  j = {{"id", s.id},
       {"created_at", clueforge::iso8601(s.created_at)},
       {"status", to_string(s.status)},
       {"inputs", s.inputs},
       {"candidates", s.candidates},
       {"failures", failures},
       {"selections", s.selections},
       {"generating", s.generating},
       {"puzzle", s.puzzle ? nlohmann::json(*s.puzzle) : nlohmann::json(nullptr)},
       {"last_error", s.last_error ? *s.last_error : nlohmann::json(nullptr)}};
}

inline void from_json(const nlohmann::json& j, Session& s) {
  s.id = j.at("id").get<std::string>();
  {
    std::tm tm{};
    std::istringstream ts(j.at("created_at").get<std::string>());
    ts >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    s.created_at = clueforge::Clock::from_time_t(timegm(&tm));
  }
  s.status = status_from_string(j.at("status").get<std::string>());
  s.inputs = j.at("inputs").get<std::vector<ClueRequest>>();
  s.candidates = j.at("candidates").get<std::vector<ClueCandidate>>();
  s.failures.clear();
  for (const auto& f : j.at("failures")) {
    s.failures.push_back({f.at("answer").get<std::string>(), f.at("code").get<std::string>(),
                          f.at("message").get<std::string>()});
  }
  s.selections = j.at("selections").get<std::map<std::string, std::string>>();
  s.generating = j.value("generating", false);
  s.puzzle.reset();
  if (!j.at("puzzle").is_null()) s.puzzle = j.at("puzzle").get<GeneratedPuzzle>();
  s.last_error.reset();
  if (j.contains("last_error") && !j.at("last_error").is_null()) s.last_error = j.at("last_error");
}

// ---------------------------------------------------------------------------
// Persistence

/// Held while a session is being modified. Combines an in-process mutex with
/// an flock on `<id>.lock`, so a second writer in this or another process
/// gets Error(Conflict) instead of waiting.
class SessionLock {
 public:
  SessionLock(std::shared_ptr<std::mutex> mu, const fs::path& lock_path) : mu_(std::move(mu)) {
    if (!mu_->try_lock()) throw Error(Errc::Conflict, "session is being modified");
    fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0 || ::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      if (fd_ >= 0) ::close(fd_);
      mu_->unlock();
      throw Error(Errc::Conflict, "session is locked by another writer");
    }
  }
  SessionLock(const SessionLock&) = delete;
  SessionLock& operator=(const SessionLock&) = delete;
  ~SessionLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
    mu_->unlock();
  }

 private:
  std::shared_ptr<std::mutex> mu_;
  int fd_ = -1;
};

class SessionStore {
 public:
  explicit SessionStore(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw Error(Errc::InvalidRequest, "data directory not usable: " + dir_.string());
  }

  const fs::path& directory() const noexcept { return dir_; }

  static bool valid_id(std::string_view id) {
    if (id.empty() || id.size() > 64) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
      return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || c == '-' || c == '_';
    });
  }

  std::string new_id() {
    std::lock_guard lock(mu_);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string id;
    do {
      id.clear();
      for (int i = 0; i < 16; ++i) id.push_back(kHex[rng_() & 0xF]);
    } while (fs::exists(path_for(id)));
    return id;
  }

  bool exists(const std::string& id) const { return valid_id(id) && fs::exists(path_for(id)); }

  Session load(const std::string& id) const {
    if (!exists(id)) throw Error(Errc::SessionNotFound, "no session " + id, {{"id", id}});
    std::ifstream in(path_for(id), std::ios::binary);
    if (!in) throw Error(Errc::SessionNotFound, "no session " + id, {{"id", id}});
    try {
      return nlohmann::json::parse(in).get<Session>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::Internal, "corrupt session file for " + id + ": " + e.what());
    }
  }

  /// Write to a temp file in the same directory, fsync, rename over the target.
  void save(const Session& s) {
    s.validate();
    const fs::path target = path_for(s.id);
    const fs::path tmp = dir_ / (s.id + ".json.tmp");
    const std::string text = nlohmann::json(s).dump(2) + "\n";
    {
      std::FILE* f = std::fopen(tmp.c_str(), "wb");
      if (!f) throw Error(Errc::Internal, "cannot write " + tmp.string());
      const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size() && std::fflush(f) == 0 &&
                      ::fsync(::fileno(f)) == 0;
      std::fclose(f);
      if (!ok) throw Error(Errc::Internal, "short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw Error(Errc::Internal, "cannot rename session file: " + ec.message());
  }

  SessionLock lock(const std::string& id) {
    std::shared_ptr<std::mutex> mu;
    {
      std::lock_guard guard(mu_);
      auto& slot = locks_[id];
      if (!slot) slot = std::make_shared<std::mutex>();
      mu = slot;
    }
    return SessionLock(std::move(mu), dir_ / (id + ".lock"));
  }

 private:
  fs::path path_for(const std::string& id) const { return dir_ / (id + ".json"); }

  fs::path dir_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
  std::mt19937_64 rng_{std::random_device{}()};
};

// ---------------------------------------------------------------------------
// Puzzle construction shared by the CLI and the service

struct SelectedAnswer {
  NormalizedWord answer;
  std::string clue;
  bool priority = false;
};

/// Runs the search on the selected answers and numbers the result.
inline GeneratedPuzzle build_puzzle(const std::vector<SelectedAnswer>& selected, const grid::GenConfig& cfg) {
  if (selected.empty()) throw Error(Errc::ValidationFailed, "no answers selected");
  std::vector<grid::WordEntry> words;
  std::map<std::string, std::string> clues;
  for (const auto& s : selected) {
    words.push_back({s.answer, s.priority});
    clues.emplace(s.answer.text(), s.clue);
  }
  grid::GenResult result = grid::generate(std::move(words), cfg);
  GeneratedPuzzle out;
  out.document = grid::number_and_render(result.layout, clues);
  out.score = result.score;
  out.reason = result.reason;
  out.adjustments = result.adjustments;
  for (const auto& [answer, _] : clues) {
    const bool placed = std::any_of(result.layout.placements().begin(), result.layout.placements().end(),
                                    [&](const grid::Placement& p) { return p.word.text() == answer; });
    if (!placed) out.unplaced.push_back(answer);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Workflow

class Workbench {
 public:
  Workbench(SessionStore& store, clueforge::ClueProvider& provider, grid::GenConfig defaults = {},
            bool allow_absent_answer = false)
      : store_(store), provider_(provider), defaults_(defaults), allow_absent_answer_(allow_absent_answer) {}

  SessionStore& store() noexcept { return store_; }
  const grid::GenConfig& defaults() const noexcept { return defaults_; }

  Session create_session(const std::vector<ClueRequest>& inputs) {
    if (inputs.empty()) throw Error(Errc::ValidationFailed, "at least one input is required");
    for (const auto& in : inputs) {
      try {
        in.validate();
      } catch (const Error& e) {
        throw Error(Errc::ValidationFailed, e.message(), {{"answer", in.answer.text()}});
      }
    }
    Session s;
    s.id = store_.new_id();
    s.created_at = clueforge::Clock::now();
    s.inputs = inputs;
    store_.save(s);
    return s;
  }

  Session get_session(const std::string& id) const { return store_.load(id); }

  /// Collects candidates for every input; per-input failures are recorded.
  Session request_clues(const std::string& id) {
    auto lock = store_.lock(id);
    Session s = store_.load(id);
    if (s.status != Status::Draft) {
      throw Error(Errc::InvalidTransition, "clues were already requested", {{"status", to_string(s.status)}});
    }
    std::vector<ClueCandidate> candidates;
    std::vector<InputFailure> failures;
    for (const auto& in : s.inputs) {
      try {
        auto got = in.text ? clueforge::generate_from_text(in, provider_, allow_absent_answer_)
                           : clueforge::generate_from_answer(in.answer, in.n, provider_);
        if (got.empty()) throw Error(Errc::NoCluesFound, "provider returned no usable clue");
        for (auto& c : got) {
          c.id = "c" + std::to_string(candidates.size() + 1);
          candidates.push_back(std::move(c));
        }
      } catch (const Error& e) {
        failures.push_back({in.answer.text(), std::string(karekurucu::to_string(e.code())), e.message()});
      }
    }
    if (candidates.empty()) {
      nlohmann::json details = nlohmann::json::array();
      for (const auto& f : failures) details.push_back({{"answer", f.answer}, {"code", f.code}});
      throw Error(Errc::AllProvidersFailed, "no input produced a clue", {{"failures", details}});
    }
    s.candidates = std::move(candidates);
    s.failures = std::move(failures);
    s.status = Status::CluesReady;
    store_.save(s);
    return s;
  }

  /// Resolves selections without touching the session. Entries are candidate
  /// ids (strings) or custom {"answer", "clue"} objects for answers that have
  /// candidates.
  static std::vector<SelectedAnswer> resolve(const Session& s, const nlohmann::json& selections) {
    if (s.status != Status::CluesReady) {
      throw Error(Errc::InvalidTransition, "session is not awaiting selection", {{"status", to_string(s.status)}});
    }
    if (!selections.is_array() || selections.empty()) {
      throw Error(Errc::ValidationFailed, "selections must be a non-empty array");
    }
    std::map<std::string, const ClueCandidate*> by_id;
    std::map<std::string, NormalizedWord> answers;
    for (const auto& c : s.candidates) {
      by_id[c.id] = &c;
      answers.emplace(c.answer.text(), c.answer);
    }
    std::map<std::string, SelectedAnswer> chosen;
    for (const auto& sel : selections) {
      if (sel.is_string()) {
        auto it = by_id.find(sel.get<std::string>());
        if (it == by_id.end()) {
          throw Error(Errc::UnknownCandidate, "no candidate " + sel.get<std::string>(), {{"id", sel}});
        }
        const ClueCandidate& c = *it->second;
        if (!chosen.emplace(c.answer.text(), SelectedAnswer{c.answer, c.clue, false}).second) {
          throw Error(Errc::ValidationFailed, "two selections for " + c.answer.text());
        }
      } else if (sel.is_object() && sel.contains("answer") && sel.contains("clue")) {
        const auto word = try_grid_form(corpus::strip_spaces(sel.at("answer").get<std::string>()));
        const std::string clue = sel.at("clue").get<std::string>();
        if (!word || !answers.contains(word->text())) {
          throw Error(Errc::UnknownCandidate, "custom clue for an answer without candidates", {{"selection", sel}});
        }
        if (!clueforge::validate_clue(clue, *word).pass) {
          throw Error(Errc::ValidationFailed, "custom clue rejected", {{"selection", sel}});
        }
        if (!chosen.emplace(word->text(), SelectedAnswer{*word, clue, sel.value("priority", false)}).second) {
          throw Error(Errc::ValidationFailed, "two selections for " + word->text());
        }
      } else {
        throw Error(Errc::ValidationFailed, "selection must be a candidate id or {answer, clue}", {{"selection", sel}});
      }
    }
    std::vector<SelectedAnswer> out;
    for (auto& [_, v] : chosen) out.push_back(std::move(v));
    return out;
  }

  Session select_and_generate(const std::string& id, const nlohmann::json& selections,
                              const std::optional<grid::GenConfig>& cfg = std::nullopt) {
    auto lock = store_.lock(id);
    Session s = store_.load(id);
    if (s.generating) throw Error(Errc::Conflict, "generation already running");
    const std::vector<SelectedAnswer> chosen = resolve(s, selections);
    const grid::GenConfig gen = cfg.value_or(defaults_);
    GeneratedPuzzle puzzle = build_puzzle(chosen, gen);
    s.selections.clear();
    for (const auto& c : chosen) s.selections[c.answer.text()] = c.clue;
    s.puzzle = std::move(puzzle);
    s.status = Status::Generated;
    s.generating = false;
    s.last_error.reset();
    store_.save(s);
    return s;
  }

  /// Marks the session as generating and returns the resolved selections; the
  /// caller finishes with complete_generation() (possibly on another thread).
  std::vector<SelectedAnswer> begin_generation(const std::string& id, const nlohmann::json& selections) {
    auto lock = store_.lock(id);
    Session s = store_.load(id);
    if (s.generating) throw Error(Errc::Conflict, "generation already running");
    auto chosen = resolve(s, selections);
    s.generating = true;
    s.last_error.reset();
    store_.save(s);
    return chosen;
  }

  void complete_generation(const std::string& id, const std::vector<SelectedAnswer>& chosen, const grid::GenConfig& cfg) {
    std::optional<GeneratedPuzzle> puzzle;
    std::optional<nlohmann::json> error;
    try {
      puzzle = build_puzzle(chosen, cfg);
    } catch (const Error& e) {
      error = e.to_json();
    }
    // The flag set by begin_generation keeps other writers out; retry briefly
    // if a reader-triggered lock is momentarily held.
    for (int attempt = 0;; ++attempt) {
      try {
        auto lock = store_.lock(id);
        Session s = store_.load(id);
        s.generating = false;
        if (puzzle) {
          s.selections.clear();
          for (const auto& c : chosen) s.selections[c.answer.text()] = c.clue;
          s.puzzle = std::move(puzzle);
          s.status = Status::Generated;
        } else {
          s.last_error = error;
        }
        store_.save(s);
        return;
      } catch (const Error& e) {
        if (e.code() != Errc::Conflict || attempt > 200) throw;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
    }
  }

 private:
  SessionStore& store_;
  clueforge::ClueProvider& provider_;
  grid::GenConfig defaults_;
  bool allow_absent_answer_;
};

}  // namespace karekurucu::session
