#pragma once

// Clue-quality evaluation: ROUGE-1/2/L against reference clues and
// aggregation of human acceptability ratings.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "karekurucu/corpus.hpp"
#include "karekurucu/error.hpp"
#include "karekurucu/textnorm.hpp"

namespace karekurucu::eval {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline double f_measure(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

inline RougeScore from_counts(std::size_t overlap, std::size_t candidate_total, std::size_t reference_total) {
  RougeScore s;
  s.precision = candidate_total ? static_cast<double>(overlap) / candidate_total : 0.0;
  s.recall = reference_total ? static_cast<double>(overlap) / reference_total : 0.0;
  s.f1 = f_measure(s.precision, s.recall);
  return s;
}

using Tokens = std::vector<std::string>;

namespace detail {

inline std::map<Tokens, std::size_t> ngram_counts(const Tokens& tokens, std::size_t n) {
  std::map<Tokens, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[Tokens(tokens.begin() + static_cast<std::ptrdiff_t>(i), tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

inline std::size_t total(const std::map<Tokens, std::size_t>& counts) {
  std::size_t t = 0;
  for (const auto& [_, c] : counts) t += c;
  return t;
}

}  // namespace detail

struct NgramCounts {
  std::size_t overlap = 0;
  std::size_t candidate = 0;
  std::size_t reference = 0;
};

/// Clipped n-gram overlap between token sequences.
inline NgramCounts ngram_overlap(const Tokens& cand, const Tokens& ref, std::size_t n) {
  const auto c = detail::ngram_counts(cand, n);
  const auto r = detail::ngram_counts(ref, n);
  NgramCounts out{0, detail::total(c), detail::total(r)};
  for (const auto& [gram, count] : c) {
    if (auto it = r.find(gram); it != r.end()) out.overlap += std::min(count, it->second);
  }
  return out;
}

inline RougeScore rouge_n_tokens(const Tokens& cand, const Tokens& ref, int n) {
  if (n != 1 && n != 2) throw Error(Errc::InvalidRequest, "ROUGE-N supports n = 1 or 2", {{"n", n}});
  const NgramCounts c = ngram_overlap(cand, ref, static_cast<std::size_t>(n));
  return from_counts(c.overlap, c.candidate, c.reference);
}

inline RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n) {
  return rouge_n_tokens(tokenize_words(candidate), tokenize_words(reference), n);
}

/// Longest common subsequence length, two-row dynamic program.
inline std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline RougeScore rouge_l_tokens(const Tokens& cand, const Tokens& ref) {
  return from_counts(lcs_length(cand, ref), cand.size(), ref.size());
}

inline RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
  return rouge_l_tokens(tokenize_words(candidate), tokenize_words(reference));
}

enum class Metric { Rouge1, Rouge2, RougeL };

inline constexpr std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::Rouge1: return "rouge1";
    case Metric::Rouge2: return "rouge2";
    case Metric::RougeL: return "rougeL";
  }
  return "";
}

inline RougeScore score_metric(Metric m, std::string_view cand, std::string_view ref) {
  switch (m) {
    case Metric::Rouge1: return rouge_n(cand, ref, 1);
    case Metric::Rouge2: return rouge_n(cand, ref, 2);
    case Metric::RougeL: return rouge_l(cand, ref);
  }
  return {};
}

/// Several references: the one giving the highest F1 wins.
inline RougeScore score_multi(Metric m, std::string_view cand, const std::vector<std::string>& refs) {
  RougeScore best;
  bool first = true;
  for (const auto& ref : refs) {
    RougeScore s = score_metric(m, cand, ref);
    if (first || s.f1 > best.f1) best = s;
    first = false;
  }
  return best;
}

struct EvalPair {
  std::string candidate;
  std::vector<std::string> references;
};

/// Corpus-level scores in percent (0..100).
struct CorpusRouge {
  RougeScore rouge1;
  RougeScore rouge2;
  RougeScore rougeL;

  const RougeScore& get(Metric m) const {
    return m == Metric::Rouge1 ? rouge1 : m == Metric::Rouge2 ? rouge2 : rougeL;
  }
};

enum class Aggregation { PerPairMean, Pooled };

/// Per-pair mean of precision, recall and F1 (default), or F1 of pooled
/// counts. Reported as percentages.
inline CorpusRouge corpus_rouge(const std::vector<EvalPair>& pairs, Aggregation agg = Aggregation::PerPairMean) {
  if (pairs.empty()) throw Error(Errc::EmptyEvaluationSet, "no candidate/reference pairs");
  CorpusRouge out;
  for (Metric m : {Metric::Rouge1, Metric::Rouge2, Metric::RougeL}) {
    RougeScore acc;
    if (agg == Aggregation::PerPairMean) {
      for (const auto& p : pairs) {
        const RougeScore s = score_multi(m, p.candidate, p.references);
        acc.precision += s.precision;
        acc.recall += s.recall;
        acc.f1 += s.f1;
      }
      const double n = static_cast<double>(pairs.size());
      acc = {100.0 * acc.precision / n, 100.0 * acc.recall / n, 100.0 * acc.f1 / n};
    } else {
      std::size_t overlap = 0, cand = 0, ref = 0;
      for (const auto& p : pairs) {
        const Tokens c = tokenize_words(p.candidate);
        const Tokens r = p.references.empty() ? Tokens{} : tokenize_words(p.references.front());
        if (m == Metric::RougeL) {
          overlap += lcs_length(c, r);
          cand += c.size();
          ref += r.size();
        } else {
          const NgramCounts k = ngram_overlap(c, r, m == Metric::Rouge1 ? 1 : 2);
          overlap += k.overlap;
          cand += k.candidate;
          ref += k.reference;
        }
      }
      const RougeScore s = from_counts(overlap, cand, ref);
      acc = {100.0 * s.precision, 100.0 * s.recall, 100.0 * s.f1};
    }
    (m == Metric::Rouge1 ? out.rouge1 : m == Metric::Rouge2 ? out.rouge2 : out.rougeL) = acc;
  }
  return out;
}

/// Fixed two-decimal rendering ("33.33").
inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

// ---------------------------------------------------------------------------
// Human ratings

struct RatingRecord {
  std::string candidate_id;
  std::string model_id;
  bool accepted = false;
  std::string rater;
};

struct RateRow {
  std::size_t accepted = 0;
  std::size_t total = 0;

  double rate() const { return total ? static_cast<double>(accepted) / total : 0.0; }
  /// Percentage rounded to 0.1 ("51.8").
  std::string display() const { return format_fixed(100.0 * rate(), 1); }
};

struct Acceptability {
  RateRow overall;
  std::map<std::string, RateRow> per_model;
};

inline Acceptability acceptability_rate(const std::vector<RatingRecord>& ratings) {
  if (ratings.empty()) throw Error(Errc::EmptyEvaluationSet, "no ratings");
  Acceptability out;
  for (const auto& r : ratings) {
    for (RateRow* row : {&out.overall, &out.per_model[r.model_id]}) {
      ++row->total;
      row->accepted += r.accepted ? 1 : 0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// File formats

/// `candidate` and `reference` columns; repeated candidates with different
/// references are grouped (max-F1 over references).
inline std::vector<EvalPair> read_eval_pairs(std::istream& in) {
  corpus::tsv::Reader reader(in);
  const std::size_t cand_col = reader.require("candidate");
  const std::size_t ref_col = reader.require("reference");
  std::vector<EvalPair> pairs;
  std::map<std::string, std::size_t> index;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() <= std::max(cand_col, ref_col)) {
      throw Error(Errc::MalformedInput, "row with too few columns");
    }
    auto [it, inserted] = index.emplace(fields[cand_col], pairs.size());
    if (inserted) pairs.push_back({fields[cand_col], {}});
    pairs[it->second].references.push_back(fields[ref_col]);
  }
  return pairs;
}

inline bool parse_bool(std::string_view s) {
  if (s == "1" || s == "true" || s == "yes" || s == "accepted" || s == "evet") return true;
  if (s == "0" || s == "false" || s == "no" || s == "rejected" || s == "hayır") return false;
  throw Error(Errc::MalformedInput, "not a boolean: " + std::string(s));
}

inline std::vector<RatingRecord> read_ratings(std::istream& in) {
  corpus::tsv::Reader reader(in);
  const std::size_t id = reader.require("candidate_id");
  const std::size_t model = reader.require("model_id");
  const std::size_t accepted = reader.require("accepted");
  const std::size_t rater = reader.require("rater");
  const std::size_t needed = std::max({id, model, accepted, rater});
  std::vector<RatingRecord> out;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() <= needed) throw Error(Errc::MalformedInput, "row with too few columns");
    out.push_back({fields[id], fields[model], parse_bool(fields[accepted]), fields[rater]});
  }
  return out;
}

inline void write_rouge_csv(std::ostream& out, const CorpusRouge& scores) {
  out << "metric,precision,recall,f1\n";
  for (Metric m : {Metric::Rouge1, Metric::Rouge2, Metric::RougeL}) {
    const RougeScore& s = scores.get(m);
    out << metric_name(m) << ',' << format_fixed(s.precision, 2) << ',' << format_fixed(s.recall, 2) << ','
        << format_fixed(s.f1, 2) << '\n';
  }
}

inline void write_ratings_csv(std::ostream& out, const Acceptability& a) {
  out << "model_id,accepted,total,rate\n";
  for (const auto& [model, row] : a.per_model) {
    out << corpus::csv_field(model) << ',' << row.accepted << ',' << row.total << ',' << row.display() << '\n';
  }
  out << "ALL," << a.overall.accepted << ',' << a.overall.total << ',' << a.overall.display() << '\n';
}

}  // namespace karekurucu::eval
