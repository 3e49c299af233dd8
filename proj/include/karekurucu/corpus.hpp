#pragma once

// Answer-clue and text-record corpora: TSV ingestion, the keyword/text filter
// chain, and distribution statistics.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "karekurucu/error.hpp"
#include "karekurucu/textnorm.hpp"

namespace karekurucu::corpus {

/// Rejection rule names, as they appear in reports and sidecar files.
namespace rule {
inline constexpr std::string_view malformed = "malformed";
inline constexpr std::string_view non_alphabet = "non_alphabet";
inline constexpr std::string_view too_short = "too_short";
inline constexpr std::string_view too_long = "too_long";
inline constexpr std::string_view empty_clue = "empty_clue";
inline constexpr std::string_view clue_equals_answer = "clue_equals_answer";
inline constexpr std::string_view duplicate = "duplicate";
inline constexpr std::string_view low_popularity = "low_popularity";
inline constexpr std::string_view low_relevance = "low_relevance";
inline constexpr std::string_view too_few_words = "too_few_words";
inline constexpr std::string_view too_many_words = "too_many_words";
}  // namespace rule

struct AnswerCluePair {
  NormalizedWord answer;
  std::string clue;
  std::string source;

  friend bool operator==(const AnswerCluePair&, const AnswerCluePair&) = default;
};

struct TextRecord {
  std::string title;
  std::string text;
  std::string keyword;
  std::string category;
  std::int64_t views = 0;
  double relevance = 0.0;
  std::string url;
};

struct FilterConfig {
  std::size_t min_answer_len = 3;
  std::size_t max_answer_len = 20;
  std::size_t min_text_words = 50;
  std::size_t max_text_words = 982;
  std::int64_t min_views = 0;
  double min_relevance = 0.0;

  void validate() const {
    if (min_answer_len >= max_answer_len || min_text_words >= max_text_words || min_views < 0 ||
        min_relevance < 0.0) {
      throw Error(Errc::InvalidRequest, "inconsistent filter configuration");
    }
  }
};

struct FilterReport {
  std::size_t input_count = 0;
  std::size_t accepted_count = 0;
  std::map<std::string, std::size_t> rejected_by_rule;

  void accept() {
    ++input_count;
    ++accepted_count;
  }
  void reject(std::string_view rule_name) {
    ++input_count;
    ++rejected_by_rule[std::string(rule_name)];
  }
  std::size_t rejected_count() const {
    std::size_t total = 0;
    for (const auto& [_, n] : rejected_by_rule) total += n;
    return total;
  }
  bool reconciles() const { return accepted_count + rejected_count() == input_count; }

  FilterReport& merge(const FilterReport& other) {
    input_count += other.input_count;
    accepted_count += other.accepted_count;
    for (const auto& [name, n] : other.rejected_by_rule) rejected_by_rule[name] += n;
    return *this;
  }
};

/// Accepted word, or the name of the first rule that rejected it.
struct Verdict {
  std::optional<NormalizedWord> word;
  std::string rule;

  bool accepted() const noexcept { return rule.empty(); }
};

/// A raw input row that did not survive, kept for the rejected sidecar.
struct RejectedRow {
  std::vector<std::string> fields;
  std::string rule;
};

// ---------------------------------------------------------------------------
// TSV plumbing

namespace tsv {

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

/// Tabs and line breaks inside a field would break the row structure.
inline std::string sanitize(std::string_view field) {
  std::string out(field);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << '\t';
    out << sanitize(fields[i]);
  }
  out << '\n';
}

/// Header-indexed reader. Strips a UTF-8 BOM and trailing CR.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {
    if (!in_) throw Error(Errc::UnreadableSource, "input stream is not readable");
    std::string line;
    if (!std::getline(in_, line)) throw Error(Errc::UnreadableSource, "input has no header row");
    if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    chomp(line);
    header_ = split(line);
    for (std::size_t i = 0; i < header_.size(); ++i) index_[header_[i]] = i;
  }

  const std::vector<std::string>& header() const noexcept { return header_; }

  std::optional<std::size_t> column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require(const std::string& name) const {
    auto col = column(name);
    if (!col) throw Error(Errc::UnreadableSource, "missing column '" + name + "'", {{"column", name}});
    return *col;
  }

  /// Next non-blank row; false at end of input.
  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      chomp(line);
      if (line.empty()) continue;
      fields = split(line);
      return true;
    }
    if (in_.bad()) throw Error(Errc::UnreadableSource, "read error");
    return false;
  }

 private:
  static void chomp(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }

  std::istream& in_;
  std::vector<std::string> header_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace tsv

// ---------------------------------------------------------------------------
// Filters

/// Removes whitespace so multi-word answers are measured as stored in the grid.
inline std::string strip_spaces(std::string_view raw) {
  std::string out;
  for (char32_t cp : utf8::decode(raw)) {
    if (!detail::is_space(cp)) utf8::append(out, cp);
  }
  return out;
}

/// Accepts iff the (space-stripped) keyword normalizes and its letter count is
/// within [min_answer_len, max_answer_len].
inline Verdict filter_keyword(std::string_view raw, const FilterConfig& cfg = {}) {
  const std::string compact = strip_spaces(raw);
  if (compact.empty()) return {std::nullopt, std::string(rule::too_short)};
  auto word = try_grid_form(compact);
  if (!word) return {std::nullopt, std::string(rule::non_alphabet)};
  if (word->length() < cfg.min_answer_len) return {std::nullopt, std::string(rule::too_short)};
  if (word->length() > cfg.max_answer_len) return {std::nullopt, std::string(rule::too_long)};
  return {std::move(word), {}};
}

/// Checks popularity, relevance, text length, then keyword; the first failing
/// rule in that order is reported.
inline Verdict filter_text_record(const TextRecord& rec, const FilterConfig& cfg = {}) {
  if (rec.views < cfg.min_views) return {std::nullopt, std::string(rule::low_popularity)};
  if (rec.relevance < cfg.min_relevance) return {std::nullopt, std::string(rule::low_relevance)};
  const std::size_t words = word_count(rec.text);
  if (words < cfg.min_text_words) return {std::nullopt, std::string(rule::too_few_words)};
  if (words > cfg.max_text_words) return {std::nullopt, std::string(rule::too_many_words)};
  return filter_keyword(rec.keyword, cfg);
}

// ---------------------------------------------------------------------------
// Ingestion

struct PairIngest {
  std::vector<AnswerCluePair> pairs;
  FilterReport report;
  std::vector<RejectedRow> rejected;
  std::vector<std::string> header;
};

inline void write_pairs(std::ostream& out, const std::vector<AnswerCluePair>& pairs);

/// Reads `answer`, `clue` (and optional `source`) columns. Answers are
/// normalized, exact duplicate (answer, clue) pairs dropped, malformed rows
/// counted and kept for the sidecar. Only an unreadable stream is fatal.
inline PairIngest ingest_pairs(std::istream& in, std::string_view default_source = "") {
  tsv::Reader reader(in);
  const std::size_t answer_col = reader.require("answer");
  const std::size_t clue_col = reader.require("clue");
  const auto source_col = reader.column("source");

  PairIngest result;
  result.header = reader.header();
  std::set<std::pair<std::u32string, std::string>> seen;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    const auto reject = [&](std::string_view name) {
      result.report.reject(name);
      result.rejected.push_back({fields, std::string(name)});
    };
    if (fields.size() <= std::max(answer_col, clue_col)) {
      reject(rule::malformed);
      continue;
    }
    const std::string compact = strip_spaces(fields[answer_col]);
    if (compact.empty()) {
      reject(rule::malformed);
      continue;
    }
    auto answer = try_grid_form(compact);
    if (!answer) {
      reject(rule::non_alphabet);
      continue;
    }
    std::string clue = fields[clue_col];
    if (word_count(clue) == 0) {
      reject(rule::empty_clue);
      continue;
    }
    if (auto as_word = try_grid_form(strip_spaces(clue)); as_word && *as_word == *answer) {
      reject(rule::clue_equals_answer);
      continue;
    }
    if (!seen.emplace(answer->letters(), clue).second) {
      reject(rule::duplicate);
      continue;
    }
    std::string source(default_source);
    if (source_col && *source_col < fields.size()) source = fields[*source_col];
    result.report.accept();
    result.pairs.push_back({std::move(*answer), std::move(clue), std::move(source)});
  }
  return result;
}

struct RecordIngest {
  std::vector<TextRecord> records;
  FilterReport report;
  std::vector<RejectedRow> rejected;
  std::vector<std::string> header;
};

/// Reads title, text, keyword, category, views, relevance, url columns.
/// Rows with non-numeric views/relevance or missing columns are malformed.
inline RecordIngest ingest_records(std::istream& in) {
  tsv::Reader reader(in);
  const std::size_t title = reader.require("title");
  const std::size_t text = reader.require("text");
  const std::size_t keyword = reader.require("keyword");
  const std::size_t category = reader.require("category");
  const std::size_t views = reader.require("views");
  const std::size_t relevance = reader.require("relevance");
  const std::size_t url = reader.require("url");
  const std::size_t needed = std::max({title, text, keyword, category, views, relevance, url});

  RecordIngest result;
  result.header = reader.header();
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    TextRecord rec;
    bool ok = fields.size() > needed;
    if (ok) {
      rec.title = fields[title];
      rec.text = fields[text];
      rec.keyword = fields[keyword];
      rec.category = fields[category];
      rec.url = fields[url];
      try {
        std::size_t used = 0;
        rec.views = std::stoll(fields[views], &used);
        ok = used == fields[views].size() && rec.views >= 0;
        rec.relevance = std::stod(fields[relevance], &used);
        ok = ok && used == fields[relevance].size();
      } catch (const std::exception&) {
        ok = false;
      }
      ok = ok && !rec.text.empty();
    }
    if (!ok) {
      result.report.reject(rule::malformed);
      result.rejected.push_back({fields, std::string(rule::malformed)});
      continue;
    }
    result.report.accept();
    result.records.push_back(std::move(rec));
  }
  return result;
}

struct PairFilterResult {
  std::vector<AnswerCluePair> accepted;
  FilterReport report;
  std::vector<std::pair<AnswerCluePair, std::string>> rejected;
};

/// Applies the keyword length bounds to already-ingested pairs.
inline PairFilterResult filter_pairs(const std::vector<AnswerCluePair>& pairs, const FilterConfig& cfg = {}) {
  cfg.validate();
  PairFilterResult result;
  for (const auto& pair : pairs) {
    Verdict v = filter_keyword(pair.answer.text(), cfg);
    if (v.accepted()) {
      result.report.accept();
      result.accepted.push_back(pair);
    } else {
      result.report.reject(v.rule);
      result.rejected.emplace_back(pair, v.rule);
    }
  }
  return result;
}

struct RecordFilterResult {
  std::vector<TextRecord> accepted;
  FilterReport report;
  std::vector<std::pair<TextRecord, std::string>> rejected;
};

inline RecordFilterResult filter_records(const std::vector<TextRecord>& records, const FilterConfig& cfg = {}) {
  cfg.validate();
  RecordFilterResult result;
  for (const auto& rec : records) {
    Verdict v = filter_text_record(rec, cfg);
    if (v.accepted()) {
      result.report.accept();
      TextRecord kept = rec;
      kept.keyword = v.word->text();
      result.accepted.push_back(std::move(kept));
    } else {
      result.report.reject(v.rule);
      result.rejected.emplace_back(rec, v.rule);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Writers

inline void write_pairs(std::ostream& out, const std::vector<AnswerCluePair>& pairs) {
  tsv::write_row(out, {"answer", "clue", "source"});
  for (const auto& p : pairs) tsv::write_row(out, {p.answer.text(), p.clue, p.source});
}

inline std::vector<std::string> record_fields(const TextRecord& r) {
  return {r.title, r.text, r.keyword, r.category, std::to_string(r.views), nlohmann::json(r.relevance).dump(), r.url};
}

inline void write_records(std::ostream& out, const std::vector<TextRecord>& records) {
  tsv::write_row(out, {"title", "text", "keyword", "category", "views", "relevance", "url"});
  for (const auto& r : records) tsv::write_row(out, record_fields(r));
}

/// Sidecar layout: the input header plus a trailing `rule` column.
inline void write_rejected(std::ostream& out, const std::vector<std::string>& header,
                           const std::vector<RejectedRow>& rows) {
  std::vector<std::string> head = header;
  head.emplace_back("rule");
  tsv::write_row(out, head);
  for (const auto& row : rows) {
    std::vector<std::string> fields = row.fields;
    fields.resize(header.size());
    fields.push_back(row.rule);
    tsv::write_row(out, fields);
  }
}

inline std::string rejected_sidecar_path(const std::string& input_path) { return input_path + ".rejected.tsv"; }

// ---------------------------------------------------------------------------
// Statistics

struct LengthStats {
  std::size_t pairs = 0;
  std::size_t unique_answers = 0;
  std::size_t unique_pairs = 0;

  friend bool operator==(const LengthStats&, const LengthStats&) = default;
};

/// Per answer length: all pairs, distinct answers, distinct (answer, clue).
inline std::map<std::size_t, LengthStats> answer_length_histogram(const std::vector<AnswerCluePair>& pairs) {
  std::map<std::size_t, LengthStats> hist;
  std::set<std::u32string> answers;
  std::set<std::pair<std::u32string, std::string>> unique;
  for (const auto& p : pairs) {
    LengthStats& row = hist[p.answer.length()];
    ++row.pairs;
    if (answers.insert(p.answer.letters()).second) ++row.unique_answers;
    if (unique.emplace(p.answer.letters(), p.clue).second) ++row.unique_pairs;
  }
  return hist;
}

inline std::map<std::string, std::size_t> category_distribution(const std::vector<TextRecord>& records) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records) ++counts[r.category];
  return counts;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_histogram_csv(std::ostream& out, const std::map<std::size_t, LengthStats>& hist) {
  out << "length,pairs,unique_answers,unique_pairs\n";
  for (const auto& [len, s] : hist) {
    out << len << ',' << s.pairs << ',' << s.unique_answers << ',' << s.unique_pairs << '\n';
  }
}

inline void write_category_csv(std::ostream& out, const std::map<std::string, std::size_t>& counts) {
  out << "category,count\n";
  for (const auto& [cat, n] : counts) out << csv_field(cat) << ',' << n << '\n';
}

}  // namespace karekurucu::corpus
