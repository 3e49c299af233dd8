#pragma once

// Clue candidates from pluggable providers: a static corpus lookup and a
// remote chat-completion model driven by a prompt template.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "karekurucu/corpus.hpp"
#include "karekurucu/error.hpp"
#include "karekurucu/textnorm.hpp"

namespace karekurucu::clueforge {

using Clock = std::chrono::system_clock;

inline std::string iso8601(Clock::time_point t) {
  const std::time_t secs = Clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Requests and candidates

struct ClueRequest {
  std::optional<std::string> text;
  NormalizedWord answer;
  std::optional<std::string> category;
  int n = 3;

  void validate() const {
    if (n < 1) throw Error(Errc::InvalidRequest, "n must be at least 1", {{"n", n}});
    if (text && word_count(*text) == 0) throw Error(Errc::InvalidRequest, "text has no words");
  }
};

struct Rating {
  bool accepted = false;
  std::string rater;
};

struct ClueCandidate {
  std::string id;
  std::string clue;
  NormalizedWord answer;
  std::string provider_id;
  Clock::time_point created_at{};
  std::optional<Rating> rating;
};

inline void to_json(nlohmann::json& j, const ClueRequest& r) {
  j = {{"answer", r.answer.text()}, {"n", r.n}};
  if (r.text) j["text"] = *r.text;
  if (r.category) j["category"] = *r.category;
}

inline void from_json(const nlohmann::json& j, ClueRequest& r) {
  if (!j.is_object() || !j.contains("answer") || !j.at("answer").is_string()) {
    throw Error(Errc::ValidationFailed, "input requires a string 'answer'");
  }
  try {
    r.answer = to_grid_form(corpus::strip_spaces(j.at("answer").get<std::string>()));
  } catch (const Error& e) {
    throw Error(Errc::ValidationFailed, e.message(), e.details());
  }
  r.text.reset();
  r.category.reset();
  if (j.contains("text") && !j.at("text").is_null()) r.text = j.at("text").get<std::string>();
  if (j.contains("category") && !j.at("category").is_null()) r.category = j.at("category").get<std::string>();
  r.n = j.value("n", 3);
}

inline void to_json(nlohmann::json& j, const ClueCandidate& c) {
  j = {{"id", c.id},
       {"clue", c.clue},
       {"answer", c.answer.text()},
       {"provider_id", c.provider_id},
       {"created_at", iso8601(c.created_at)}};
  if (c.rating) j["rating"] = {{"accepted", c.rating->accepted}, {"rater", c.rating->rater}};
}

inline void from_json(const nlohmann::json& j, ClueCandidate& c) {
  c.id = j.at("id").get<std::string>();
  c.clue = j.at("clue").get<std::string>();
  c.answer = to_grid_form(j.at("answer").get<std::string>());
  c.provider_id = j.at("provider_id").get<std::string>();
  std::tm tm{};
  std::istringstream ts(j.at("created_at").get<std::string>());
  ts >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  c.created_at = Clock::from_time_t(timegm(&tm));
  c.rating.reset();
  if (j.contains("rating")) {
    c.rating = Rating{j.at("rating").at("accepted").get<bool>(), j.at("rating").at("rater").get<std::string>()};
  }
}

// ---------------------------------------------------------------------------
// Prompt templates

/// Template body with `{text}`, `{answer}`, `{category}` and `{n}`
/// placeholders, each allowed at most once. Any other `{name}` is rejected;
/// braces that do not form `{lowercase_name}` are literal text.
class PromptTemplate {
 public:
  struct Segment {
    bool placeholder = false;
    std::string value;  // literal text, or the placeholder name
  };

  PromptTemplate(std::string id, std::string body) : id_(std::move(id)), body_(std::move(body)) { parse(); }

  static PromptTemplate from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::UnreadableSource, "cannot open template " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return PromptTemplate(path.stem().string(), ss.str());
  }

  const std::string& id() const noexcept { return id_; }
  const std::string& body() const noexcept { return body_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }

  bool references(std::string_view name) const {
    return std::any_of(segments_.begin(), segments_.end(),
                       [&](const Segment& s) { return s.placeholder && s.value == name; });
  }

 private:
  static bool known(std::string_view name) {
    return name == "text" || name == "answer" || name == "category" || name == "n";
  }

  void parse() {
    std::string literal;
    std::size_t i = 0;
    while (i < body_.size()) {
      if (body_[i] == '{') {
        std::size_t j = i + 1;
        while (j < body_.size() && ((body_[j] >= 'a' && body_[j] <= 'z') || body_[j] == '_')) ++j;
        if (j > i + 1 && j < body_.size() && body_[j] == '}') {
          std::string name = body_.substr(i + 1, j - i - 1);
          if (!known(name)) {
            throw Error(Errc::InvalidTemplate, "unknown placeholder {" + name + "}", {{"placeholder", name}});
          }
          if (references(name)) {
            throw Error(Errc::InvalidTemplate, "placeholder {" + name + "} occurs more than once",
                        {{"placeholder", name}});
          }
          if (!literal.empty()) segments_.push_back({false, std::move(literal)});
          literal.clear();
          segments_.push_back({true, std::move(name)});
          i = j + 1;
          continue;
        }
      }
      literal.push_back(body_[i]);
      ++i;
    }
    if (!literal.empty()) segments_.push_back({false, std::move(literal)});
  }

  std::string id_;
  std::string body_;
  std::vector<Segment> segments_;
};

inline std::string render_prompt(const PromptTemplate& tpl, const ClueRequest& req) {
  std::string out;
  for (const auto& seg : tpl.segments()) {
    if (!seg.placeholder) {
      out += seg.value;
    } else if (seg.value == "answer") {
      out += req.answer.text();
    } else if (seg.value == "n") {
      out += std::to_string(req.n);
    } else if (seg.value == "text") {
      if (!req.text) throw Error(Errc::MissingField, "request has no text", {{"placeholder", "text"}});
      out += *req.text;
    } else if (seg.value == "category") {
      if (!req.category) throw Error(Errc::MissingField, "request has no category", {{"placeholder", "category"}});
      out += *req.category;
    }
  }
  return out;
}

// The original instruction prompt is not available verbatim; these are
// reconstructions carrying the same inputs. Replace them via template files.
inline constexpr std::string_view kDefaultSystemPrompt =
    "Sen Türkçe eğitsel bulmacalar için ipucu yazan deneyimli bir öğretmensin.";

inline constexpr std::string_view kDefaultTextPrompt =
    "Aşağıdaki metni okuyup \"{category}\" kategorisindeki bir Türkçe bulmaca için {n} farklı eğitsel ipucu yaz.\n"
    "Metin: {text}\n"
    "Cevap: {answer}\n"
    "Kurallar: ipuçları cevabı içermemeli, metindeki bilgilere dayanmalı, 5 ile 15 kelime arasında olmalı. "
    "Her ipucunu numaralı bir satıra yaz.";

inline constexpr std::string_view kDefaultAnswerPrompt =
    "Cevabı \"{answer}\" olan bir Türkçe bulmaca sorusu için {n} farklı ipucu yaz.\n"
    "Kurallar: ipuçları cevabı içermemeli, öğretici olmalı, 5 ile 15 kelime arasında olmalı. "
    "Her ipucunu numaralı bir satıra yaz.";

// ---------------------------------------------------------------------------
// Validation

struct ClueVerdict {
  bool pass = true;
  std::string reason;  // answer_leak | length_out_of_range | empty
};

/// Fails on an answer leak (substring on letter-normalized forms, so
/// inflected forms like "Ankara'nın" count). In strict mode, also fails when
/// the clue is outside 5..15 words.
inline ClueVerdict validate_clue(std::string_view clue, const NormalizedWord& answer, bool strict = false) {
  if (word_count(clue) == 0) return {false, "empty"};
  const std::u32string letters = letters_only_upper(clue);
  if (!answer.empty() && letters.find(answer.letters()) != std::u32string::npos) return {false, "answer_leak"};
  if (strict) {
    const std::size_t words = word_count(clue);
    if (words < 5 || words > 15) return {false, "length_out_of_range"};
  }
  return {};
}

/// Tolerant parser for model output: a JSON array of strings, or one clue per
/// line with optional "1." / "1)" / "-" / "*" / "•" markers and quotes.
inline std::vector<std::string> parse_clue_list(std::string_view content) {
  std::vector<std::string> clues;
  const auto trim = [](std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
  };
  {
    const std::string whole = trim(std::string(content));
    if (whole.starts_with('[')) {
      auto parsed = nlohmann::json::parse(whole, nullptr, false);
      if (parsed.is_array()) {
        for (const auto& item : parsed) {
          if (item.is_string()) {
            std::string s = trim(item.get<std::string>());
            if (!s.empty()) clues.push_back(std::move(s));
          }
        }
        return clues;
      }
    }
  }
  std::istringstream lines{std::string(content)};
  std::string line;
  while (std::getline(lines, line)) {
    line = trim(line);
    std::size_t k = 0;
    while (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) ++k;
    if (k > 0 && k < line.size() && (line[k] == '.' || line[k] == ')' || line[k] == ':')) {
      line = trim(line.substr(k + 1));
    } else if (line.starts_with("- ") || line.starts_with("* ")) {
      line = trim(line.substr(2));
    } else if (line.starts_with("•")) {
      line = trim(line.substr(std::string_view("•").size()));
    }
    if (line.size() >= 2) {
      const bool dq = line.front() == '"' && line.back() == '"';
      const bool sq = line.front() == '\'' && line.back() == '\'';
      if (dq || sq) line = trim(line.substr(1, line.size() - 2));
    }
    if (line.starts_with("“") && line.ends_with("”") && line.size() > 6) line = trim(line.substr(3, line.size() - 6));
    if (!line.empty()) clues.push_back(std::move(line));
  }
  return clues;
}

// ---------------------------------------------------------------------------
// Providers

class ClueProvider {
 public:
  virtual ~ClueProvider() = default;
  virtual std::string id() const = 0;
  /// Raw clue strings for the request, unvalidated. Throws
  /// Error(ProviderUnavailable) or Error(NoCluesFound).
  virtual std::vector<std::string> propose(const ClueRequest& req) = 0;
};

/// Corpus lookup: clues for the answer in corpus order.
class StaticProvider final : public ClueProvider {
 public:
  explicit StaticProvider(const std::vector<corpus::AnswerCluePair>& pairs, std::string id = "static") : id_(std::move(id)) {
    for (const auto& p : pairs) index_[p.answer.letters()].push_back(p.clue);
  }

  std::string id() const override { return id_; }

  std::vector<std::string> propose(const ClueRequest& req) override {
    auto it = index_.find(req.answer.letters());
    if (it == index_.end()) {
      throw Error(Errc::NoCluesFound, "no corpus clue for " + req.answer.text(), {{"answer", req.answer.text()}});
    }
    return it->second;
  }

 private:
  std::string id_;
  std::map<std::u32string, std::vector<std::string>> index_;
};

struct TransportResponse {
  int status = 0;
  std::string body;
};

/// Transport-level failure (connection refused, timeout, missing fixture).
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChatCall {
  nlohmann::json body;
  NormalizedWord answer;  // lets the mock transport pick a fixture
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual TransportResponse send(const ChatCall& call) = 0;
};

struct Endpoint {
  std::string scheme_host_port;
  std::string path;
};

inline Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(Errc::InvalidRequest, "endpoint must be an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpTransport final : public Transport {
 public:
  HttpTransport(std::string endpoint, std::string api_key, std::chrono::milliseconds timeout)
      : endpoint_(split_endpoint(endpoint)), api_key_(std::move(api_key)), timeout_(timeout) {}

  TransportResponse send(const ChatCall& call) override {
    httplib::Client client(endpoint_.scheme_host_port);
    if (!client.is_valid()) throw TransportError("unsupported endpoint " + endpoint_.scheme_host_port);
    const auto secs = static_cast<time_t>(timeout_.count() / 1000);
    const auto usecs = static_cast<time_t>((timeout_.count() % 1000) * 1000);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    if (!api_key_.empty()) client.set_bearer_token_auth(api_key_);
    auto res = client.Post(endpoint_.path, call.body.dump(), "application/json");
    if (!res) throw TransportError("request failed: " + httplib::to_string(res.error()));
    return {res->status, res->body};
  }

 private:
  Endpoint endpoint_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
};

/// Offline transport. For answer X it serves `<dir>/X.json` as a full
/// response body, or wraps `<dir>/X.txt` as the assistant message content.
/// A missing fixture is a transport failure.
class MockTransport final : public Transport {
 public:
  explicit MockTransport(std::filesystem::path dir) : dir_(std::move(dir)) {}

  TransportResponse send(const ChatCall& call) override {
    const std::string key = call.answer.text();
    if (auto raw = slurp(dir_ / (key + ".json"))) return {200, *raw};
    if (auto content = slurp(dir_ / (key + ".txt"))) {
      nlohmann::json body = {{"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", *content}}}}}}};
      return {200, body.dump()};
    }
    throw TransportError("no fixture for " + key + " in " + dir_.string());
  }

 private:
  static std::optional<std::string> slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::filesystem::path dir_;
};

/// Token bucket holding up to `per_minute` tokens, refilled continuously.
/// A rate of zero disables limiting.
class TokenBucket {
 public:
  explicit TokenBucket(double per_minute) : rate_per_sec_(per_minute / 60.0), capacity_(per_minute), tokens_(per_minute) {}

  void acquire() {
    if (capacity_ <= 0) return;
    std::unique_lock lock(mu_);
    while (true) {
      refill();
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      const double wait_s = (1.0 - tokens_) / rate_per_sec_;
      lock.unlock();
      std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
      lock.lock();
    }
  }

 private:
  void refill() {
    const auto now = std::chrono::steady_clock::now();
    const double dt = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(capacity_, tokens_ + dt * rate_per_sec_);
  }

  std::mutex mu_;
  double rate_per_sec_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

enum class ProviderKind { Static, Remote, Mock };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::Mock;
  std::string endpoint;
  std::string model_name = "gpt-3.5-turbo";
  std::string api_key;  // filled from CLUEFORGE_API_KEY
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  double temperature = 0.7;
  double requests_per_minute = 0;
  std::chrono::milliseconds backoff_initial{500};
  std::chrono::milliseconds backoff_max{8000};
  std::string fixtures_dir;
  std::string corpus_path;
  std::string text_template_path;
  std::string answer_template_path;

  void validate() const {
    if (timeout.count() <= 0) throw Error(Errc::InvalidRequest, "timeout must be positive");
    if (max_retries < 0) throw Error(Errc::InvalidRequest, "max_retries must be non-negative");
    if (kind == ProviderKind::Remote && (endpoint.empty() || api_key.empty())) {
      throw Error(Errc::InvalidRequest, "remote provider requires an endpoint and CLUEFORGE_API_KEY");
    }
    if (kind == ProviderKind::Mock && fixtures_dir.empty()) {
      throw Error(Errc::InvalidRequest, "mock provider requires fixtures_dir");
    }
    if (kind == ProviderKind::Static && corpus_path.empty()) {
      throw Error(Errc::InvalidRequest, "static provider requires corpus_path");
    }
  }

  /// Reads the JSON config; the credential always comes from the environment.
  static ProviderConfig from_json(const nlohmann::json& j) {
    ProviderConfig c;
    const std::string kind = j.value("kind", "mock");
    if (kind == "static") c.kind = ProviderKind::Static;
    else if (kind == "remote") c.kind = ProviderKind::Remote;
    else if (kind == "mock") c.kind = ProviderKind::Mock;
    else throw Error(Errc::InvalidRequest, "unknown provider kind '" + kind + "'");
    c.endpoint = j.value("endpoint", c.endpoint);
    c.model_name = j.value("model_name", c.model_name);
    c.timeout = std::chrono::milliseconds(j.value("timeout_ms", c.timeout.count()));
    c.max_retries = j.value("max_retries", c.max_retries);
    c.temperature = j.value("temperature", c.temperature);
    c.requests_per_minute = j.value("requests_per_minute", c.requests_per_minute);
    c.backoff_initial = std::chrono::milliseconds(j.value("backoff_initial_ms", c.backoff_initial.count()));
    c.backoff_max = std::chrono::milliseconds(j.value("backoff_max_ms", c.backoff_max.count()));
    c.fixtures_dir = j.value("fixtures_dir", c.fixtures_dir);
    c.corpus_path = j.value("corpus_path", c.corpus_path);
    c.text_template_path = j.value("text_template", c.text_template_path);
    c.answer_template_path = j.value("answer_template", c.answer_template_path);
    if (const char* key = std::getenv("CLUEFORGE_API_KEY")) c.api_key = key;
    return c;
  }
};

/// Chat-completion provider: renders the template into a system + user
/// message list, retries transient failures with capped exponential backoff.
class RemoteProvider final : public ClueProvider {
 public:
  RemoteProvider(ProviderConfig cfg, std::unique_ptr<Transport> transport,
                 PromptTemplate text_tpl = PromptTemplate("text", std::string(kDefaultTextPrompt)),
                 PromptTemplate answer_tpl = PromptTemplate("answer", std::string(kDefaultAnswerPrompt)),
                 std::string system_prompt = std::string(kDefaultSystemPrompt))
      : cfg_(std::move(cfg)),
        transport_(std::move(transport)),
        text_tpl_(std::move(text_tpl)),
        answer_tpl_(std::move(answer_tpl)),
        system_prompt_(std::move(system_prompt)),
        bucket_(cfg_.requests_per_minute) {}

  std::string id() const override { return "remote:" + cfg_.model_name; }

  int attempts() const noexcept { return attempts_.load(); }

  nlohmann::json request_body(const ClueRequest& req) const {
    const PromptTemplate& tpl = req.text ? text_tpl_ : answer_tpl_;
    return {{"model", cfg_.model_name},
            {"temperature", cfg_.temperature},
            {"messages",
             {{{"role", "system"}, {"content", system_prompt_}}, {{"role", "user"}, {"content", render_prompt(tpl, req)}}}}};
  }

  std::vector<std::string> propose(const ClueRequest& req) override {
    const ChatCall call{request_body(req), req.answer};
    std::string last_error;
    auto delay = cfg_.backoff_initial;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(delay);
        delay = std::min(delay * 2, cfg_.backoff_max);
      }
      bucket_.acquire();
      ++attempts_;
      try {
        const TransportResponse res = transport_->send(call);
        if (res.status == 200) return parse_response(res.body);
        last_error = "HTTP " + std::to_string(res.status);
        if (res.status != 429 && res.status < 500) break;
      } catch (const TransportError& e) {
        last_error = e.what();
      }
    }
    throw Error(Errc::ProviderUnavailable, last_error, {{"provider", id()}, {"answer", req.answer.text()}});
  }

 private:
  std::vector<std::string> parse_response(const std::string& body) const {
    auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
      throw Error(Errc::ProviderUnavailable, "unrecognized response body", {{"provider", id()}});
    }
    const auto& msg = j["choices"][0].value("message", nlohmann::json::object());
    return parse_clue_list(msg.value("content", ""));
  }

  ProviderConfig cfg_;
  std::unique_ptr<Transport> transport_;
  PromptTemplate text_tpl_;
  PromptTemplate answer_tpl_;
  std::string system_prompt_;
  TokenBucket bucket_;
  std::atomic<int> attempts_{0};
};

/// Builds the provider a config describes (mock and remote share RemoteProvider).
inline std::unique_ptr<ClueProvider> make_provider(const ProviderConfig& cfg) {
  cfg.validate();
  const auto templates = [&] {
    PromptTemplate text_tpl = cfg.text_template_path.empty()
                                  ? PromptTemplate("text", std::string(kDefaultTextPrompt))
                                  : PromptTemplate::from_file(cfg.text_template_path);
    PromptTemplate answer_tpl = cfg.answer_template_path.empty()
                                    ? PromptTemplate("answer", std::string(kDefaultAnswerPrompt))
                                    : PromptTemplate::from_file(cfg.answer_template_path);
    return std::pair{std::move(text_tpl), std::move(answer_tpl)};
  };
  switch (cfg.kind) {
    case ProviderKind::Static: {
      std::ifstream in(cfg.corpus_path);
      if (!in) throw Error(Errc::UnreadableSource, "cannot open corpus " + cfg.corpus_path);
      return std::make_unique<StaticProvider>(corpus::ingest_pairs(in, "corpus").pairs);
    }
    case ProviderKind::Mock: {
      auto [t, a] = templates();
      ProviderConfig mock = cfg;
      mock.model_name = "mock";
      return std::make_unique<RemoteProvider>(mock, std::make_unique<MockTransport>(cfg.fixtures_dir), std::move(t),
                                              std::move(a));
    }
    case ProviderKind::Remote: {
      auto [t, a] = templates();
      return std::make_unique<RemoteProvider>(
          cfg, std::make_unique<HttpTransport>(cfg.endpoint, cfg.api_key, cfg.timeout), std::move(t), std::move(a));
    }
  }
  throw Error(Errc::Internal, "unreachable provider kind");
}

// ---------------------------------------------------------------------------
// Generation

namespace detail {

inline std::vector<ClueCandidate> collect(const std::vector<std::string>& raw, const NormalizedWord& answer, int n,
                                          const std::string& provider_id, bool strict) {
  std::vector<ClueCandidate> out;
  const auto now = Clock::now();
  for (const auto& clue : raw) {
    if (static_cast<int>(out.size()) >= n) break;
    if (!validate_clue(clue, answer, strict).pass) continue;
    out.push_back({"", clue, answer, provider_id, now, std::nullopt});
  }
  return out;
}

}  // namespace detail

/// Up to n validated candidates for a bare answer.
inline std::vector<ClueCandidate> generate_from_answer(const NormalizedWord& answer, int n, ClueProvider& provider,
                                                       bool strict = false) {
  ClueRequest req{std::nullopt, answer, std::nullopt, n};
  req.validate();
  return detail::collect(provider.propose(req), answer, n, provider.id(), strict);
}

/// Up to req.n validated candidates for (text, answer, category). The answer
/// must occur in the text (Turkish case-insensitive) unless allow_absent_answer.
inline std::vector<ClueCandidate> generate_from_text(const ClueRequest& req, ClueProvider& provider,
                                                     bool allow_absent_answer = false, bool strict = false) {
  req.validate();
  if (!req.text) throw Error(Errc::InvalidRequest, "request has no text");
  std::u32string compact = letters_only_upper(*req.text);
  std::erase(compact, U' ');
  if (!allow_absent_answer && compact.find(req.answer.letters()) == std::u32string::npos) {
    throw Error(Errc::AnswerNotInText, req.answer.text() + " does not occur in the text",
                {{"answer", req.answer.text()}});
  }
  return detail::collect(provider.propose(req), req.answer, req.n, provider.id(), strict);
}

}  // namespace karekurucu::clueforge
