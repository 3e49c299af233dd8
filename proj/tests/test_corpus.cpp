#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "karekurucu/corpus.hpp"

namespace kk = karekurucu;
namespace kc = karekurucu::corpus;

namespace {

std::string fixture(const std::string& name) { return std::string(KAREKURUCU_FIXTURES) + "/" + name; }

kc::AnswerCluePair pair(const std::string& answer, const std::string& clue) {
  return {kk::to_grid_form(answer), clue, "test"};
}

std::string words(std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += (i ? " " : "") + std::string("kelime");
  return out;
}

kc::TextRecord record(std::string keyword, std::size_t n_words, std::int64_t views = 100, double relevance = 1.0) {
  return {"Başlık", words(n_words), std::move(keyword), "Tarih", views, relevance, "https://example.org/x"};
}

}  // namespace

TEST(IngestPairs, DedupsAndCountsEveryRejection) {
  std::ifstream in(fixture("pairs_small.tsv"));
  ASSERT_TRUE(in);
  const auto r = kc::ingest_pairs(in, "fixture");
  ASSERT_EQ(r.pairs.size(), 5u);
  EXPECT_EQ(r.pairs[0].answer.text(), "KALEM");
  EXPECT_EQ(r.pairs[0].clue, "Yazı aracı");
  EXPECT_EQ(r.pairs[1].answer.text(), "KALEM");
  EXPECT_EQ(r.pairs[1].clue, "Tükenmez");
  EXPECT_EQ(r.pairs[2].answer.text(), "KEDİ");
  EXPECT_EQ(r.pairs[3].answer.text(), "KARADENİZ");
  EXPECT_EQ(r.pairs[3].source, "fixture");
  EXPECT_EQ(r.pairs[4].answer.text(), "EV");

  EXPECT_EQ(r.report.input_count, 9u);
  EXPECT_EQ(r.report.accepted_count, 5u);
  EXPECT_EQ(r.report.rejected_by_rule.at("duplicate"), 1u);
  EXPECT_EQ(r.report.rejected_by_rule.at("non_alphabet"), 1u);
  EXPECT_EQ(r.report.rejected_by_rule.at("clue_equals_answer"), 1u);
  EXPECT_EQ(r.report.rejected_by_rule.at("empty_clue"), 1u);
  EXPECT_TRUE(r.report.reconciles());
  ASSERT_EQ(r.rejected.size(), 4u);
  EXPECT_EQ(r.rejected[1].fields[0], "x1");
  EXPECT_EQ(r.rejected[1].rule, "non_alphabet");

  // Length bounds are a separate pass; "ev" only falls out here.
  const auto f = kc::filter_pairs(r.pairs);
  EXPECT_EQ(f.accepted.size(), 4u);
  ASSERT_EQ(f.rejected.size(), 1u);
  EXPECT_EQ(f.rejected[0].first.answer.text(), "EV");
  EXPECT_EQ(f.rejected[0].second, "too_short");
}

TEST(IngestPairs, MissingColumnIsUnreadable) {
  std::istringstream in("word\tclue\nkedi\tx\n");
  try {
    kc::ingest_pairs(in);
    FAIL();
  } catch (const kk::Error& e) {
    EXPECT_EQ(e.code(), kk::Errc::UnreadableSource);
  }
}

TEST(IngestPairs, ShortRowIsMalformedNotFatal) {
  std::istringstream in("answer\tclue\nkedi\n\tboş\nokul\tBina\n");
  const auto r = kc::ingest_pairs(in);
  EXPECT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.report.rejected_by_rule.at("malformed"), 2u);
  EXPECT_TRUE(r.report.reconciles());
}

TEST(IngestPairs, ReingestOfOutputIsIdentity) {
  std::ifstream in(fixture("words30.tsv"));
  const auto first = kc::ingest_pairs(in, "w");
  std::ostringstream out;
  kc::write_pairs(out, first.pairs);
  std::istringstream again(out.str());
  const auto second = kc::ingest_pairs(again, "other");
  EXPECT_EQ(first.pairs, second.pairs);
  EXPECT_EQ(second.report.accepted_count, second.report.input_count);
  std::ostringstream out2;
  kc::write_pairs(out2, second.pairs);
  EXPECT_EQ(out.str(), out2.str());
}

TEST(IngestPairs, RandomRowsAlwaysReconcile) {
  std::mt19937 rng(3);
  const std::vector<std::string> answers = {"kedi", "KEDİ", "ev", "x1", "", "Kara deniz", "çiçek", "q", "ağaç"};
  const std::vector<std::string> clues = {"", "Bir hayvan", "kedi", "  ", "Ağaç", "Uzun bir ipucu burada"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string tsv = "answer\tclue\n";
    int rows = 0;
    for (int i = 0; i < trial % 25; ++i) {
      std::string line = answers[rng() % answers.size()];
      if (rng() % 7) line += "\t" + clues[rng() % clues.size()];
      rows += line.empty() ? 0 : 1;  // blank lines are skipped, not rows
      tsv += line + "\n";
    }
    std::istringstream in(tsv);
    const auto r = kc::ingest_pairs(in);
    EXPECT_TRUE(r.report.reconciles());
    EXPECT_EQ(r.report.input_count, static_cast<std::size_t>(rows));
    EXPECT_EQ(r.rejected.size(), r.report.rejected_count());
    const auto f = kc::filter_pairs(r.pairs);
    EXPECT_TRUE(f.report.reconciles());
    for (const auto& p : f.accepted) {
      EXPECT_GE(p.answer.length(), 3u);
      EXPECT_LE(p.answer.length(), 20u);
    }
  }
}

TEST(FilterKeyword, Examples) {
  EXPECT_EQ(kc::filter_keyword("ev").rule, "too_short");
  const auto v = kc::filter_keyword("üçgen");
  ASSERT_TRUE(v.accepted());
  EXPECT_EQ(v.word->text(), "ÜÇGEN");
  EXPECT_EQ(kc::filter_keyword(std::string(21, 'a')).rule, "too_long");
  EXPECT_EQ(kc::filter_keyword("covid-19").rule, "non_alphabet");
  EXPECT_EQ(kc::filter_keyword("Kara deniz").word->text(), "KARADENİZ");
}

TEST(FilterKeyword, LengthBoundaries) {
  const std::string base = "ğ";
  const auto of_len = [&](int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += base;
    return s;
  };
  EXPECT_EQ(kc::filter_keyword(of_len(2)).rule, "too_short");
  EXPECT_TRUE(kc::filter_keyword(of_len(3)).accepted());
  EXPECT_TRUE(kc::filter_keyword(of_len(20)).accepted());
  EXPECT_EQ(kc::filter_keyword(of_len(21)).rule, "too_long");
  // Spaces do not count toward length.
  EXPECT_TRUE(kc::filter_keyword("a b c").accepted());
  EXPECT_EQ(kc::filter_keyword("a  b").rule, "too_short");
}

TEST(FilterTextRecord, WordCountAndPopularity) {
  EXPECT_EQ(kc::filter_text_record(record("kedi", 49)).rule, "too_few_words");
  EXPECT_TRUE(kc::filter_text_record(record("kedi", 50)).accepted());
  EXPECT_TRUE(kc::filter_text_record(record("kedi", 982)).accepted());
  EXPECT_EQ(kc::filter_text_record(record("kedi", 983)).rule, "too_many_words");

  kc::FilterConfig cfg;
  cfg.min_views = 1000;
  cfg.min_relevance = 0.5;
  EXPECT_EQ(kc::filter_text_record(record("kedi", 100, 999, 0.9), cfg).rule, "low_popularity");
  EXPECT_EQ(kc::filter_text_record(record("kedi", 100, 5000, 0.4), cfg).rule, "low_relevance");
  const auto ok = kc::filter_text_record(record("kedi", 100, 5000, 0.9), cfg);
  ASSERT_TRUE(ok.accepted());
  EXPECT_EQ(ok.word->text(), "KEDİ");
  EXPECT_EQ(kc::filter_text_record(record("ev", 100, 5000, 0.9), cfg).rule, "too_short");
}

TEST(FilterRecords, NormalizesKeywordAndReconciles) {
  const std::vector<kc::TextRecord> in = {record("istanbul", 60), record("ev", 60), record("kedi", 10)};
  const auto r = kc::filter_records(in);
  ASSERT_EQ(r.accepted.size(), 1u);
  EXPECT_EQ(r.accepted[0].keyword, "İSTANBUL");
  EXPECT_TRUE(r.report.reconciles());
  EXPECT_EQ(r.report.rejected_by_rule.at("too_short"), 1u);
  EXPECT_EQ(r.report.rejected_by_rule.at("too_few_words"), 1u);
}

TEST(IngestRecords, RoundTripsThroughWriter) {
  const std::vector<kc::TextRecord> in = {record("kedi", 60, 12, 0.25), record("ağaç", 70, 0, 1.5)};
  std::ostringstream out;
  kc::write_records(out, in);
  std::istringstream back(out.str() + "t\tx\tk\tc\tnotanumber\t1\tu\n");
  const auto r = kc::ingest_records(back);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[1].keyword, "ağaç");
  EXPECT_EQ(r.records[0].views, 12);
  EXPECT_DOUBLE_EQ(r.records[0].relevance, 0.25);
  EXPECT_EQ(r.report.rejected_by_rule.at("malformed"), 1u);
}

TEST(InvalidConfig, Rejected) {
  kc::FilterConfig cfg;
  cfg.min_answer_len = 21;
  EXPECT_THROW(kc::filter_pairs({}, cfg), kk::Error);
}

TEST(Histogram, CountsPairsAnswersAndUniquePairs) {
  const std::vector<kc::AnswerCluePair> pairs = {pair("KEDİ", "c1"), pair("KEDİ", "c2"), pair("ASLAN", "c3")};
  const auto h = kc::answer_length_histogram(pairs);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h.at(4), (kc::LengthStats{2, 1, 2}));
  EXPECT_EQ(h.at(5), (kc::LengthStats{1, 1, 1}));
  std::ostringstream csv;
  kc::write_histogram_csv(csv, h);
  EXPECT_EQ(csv.str(), "length,pairs,unique_answers,unique_pairs\n4,2,1,2\n5,1,1,1\n");
}

TEST(Histogram, RepeatedPairCountsOnce) {
  const auto h = kc::answer_length_histogram({pair("KEDİ", "c1"), pair("KEDİ", "c1")});
  EXPECT_EQ(h.at(4), (kc::LengthStats{2, 1, 1}));
}

TEST(Categories, DistributionCoversEveryCategory) {
  std::vector<kc::TextRecord> recs;
  for (int c = 0; c < 29; ++c) {
    for (int k = 0; k <= c % 3; ++k) {
      auto r = record("kedi", 60);
      r.category = "kategori" + std::to_string(c);
      recs.push_back(r);
    }
  }
  const auto d = kc::category_distribution(recs);
  EXPECT_EQ(d.size(), 29u);
  std::size_t total = 0;
  for (const auto& [_, n] : d) total += n;
  EXPECT_EQ(total, recs.size());
  EXPECT_EQ(d.at("kategori2"), 3u);

  std::ostringstream csv;
  kc::write_category_csv(csv, {{"Bilim, Teknoloji", 2}});
  EXPECT_EQ(csv.str(), "category,count\n\"Bilim, Teknoloji\",2\n");
}

TEST(RejectedSidecar, KeepsInputColumnsPlusRule) {
  std::ifstream in(fixture("pairs_small.tsv"));
  const auto r = kc::ingest_pairs(in);
  std::ostringstream out;
  kc::write_rejected(out, r.header, r.rejected);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "answer\tclue\trule");
  std::getline(lines, line);
  EXPECT_EQ(line, "kalem\tYazı aracı\tduplicate");
  EXPECT_EQ(kc::rejected_sidecar_path("a/b.tsv"), "a/b.tsv.rejected.tsv");
}
