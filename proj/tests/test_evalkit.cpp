#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "karekurucu/evalkit.hpp"
#include "oracles.hpp"

namespace kk = karekurucu;
namespace ev = karekurucu::eval;

namespace {

kk::Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const kk::Error& e) {
    return e.code();
  }
  return kk::Errc::Internal;
}

std::string join(const std::vector<std::string>& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) out += (i ? " " : "") + t[i];
  return out;
}

}  // namespace

TEST(Rouge, HandCountedExamples) {
  const auto r1 = ev::rouge_n("kedi evde uyur", "kedi bahçede uyur", 1);
  EXPECT_DOUBLE_EQ(r1.precision, 2.0 / 3);
  EXPECT_DOUBLE_EQ(r1.recall, 2.0 / 3);
  EXPECT_DOUBLE_EQ(r1.f1, 2.0 / 3);

  const auto r2 = ev::rouge_n("kedi evde uyur", "kedi evde uyuyor", 2);
  EXPECT_DOUBLE_EQ(r2.precision, 0.5);
  EXPECT_DOUBLE_EQ(r2.recall, 0.5);
  EXPECT_DOUBLE_EQ(r2.f1, 0.5);

  const auto rl = ev::rouge_l("a b c d", "a c b d");
  EXPECT_DOUBLE_EQ(rl.precision, 0.75);
  EXPECT_DOUBLE_EQ(rl.recall, 0.75);
  EXPECT_DOUBLE_EQ(rl.f1, 0.75);

  EXPECT_EQ(ev::rouge_l("elma armut", "kedi köpek").f1, 0.0);
  EXPECT_EQ(ev::rouge_n("", "", 1).f1, 0.0);
  EXPECT_EQ(ev::rouge_n("tek", "tek", 2).f1, 0.0);
}

TEST(Rouge, IdentityScoresOne) {
  for (const char* s : {"Kedi, evde uyur.", "bir iki bir iki", "İstanbul Boğazı"}) {
    EXPECT_EQ(ev::rouge_n(s, s, 1).f1, 1.0);
    EXPECT_EQ(ev::rouge_n(s, s, 2).f1, 1.0);
    EXPECT_EQ(ev::rouge_l(s, s).f1, 1.0);
  }
}

TEST(Rouge, ClippedMultiplicity) {
  // "the the the" vs "the": overlap clipped to 1.
  const auto s = ev::rouge_n("bir bir bir", "bir", 1);
  EXPECT_DOUBLE_EQ(s.precision, 1.0 / 3);
  EXPECT_DOUBLE_EQ(s.recall, 1.0);
}

TEST(Rouge, TokenizationIsTurkishAware) {
  EXPECT_EQ(ev::rouge_n("IŞIK", "ışık.", 1).f1, 1.0);
  EXPECT_EQ(ev::rouge_n("İzmir", "izmir", 1).f1, 1.0);
  EXPECT_EQ(ev::rouge_n("Izmir", "izmir", 1).f1, 0.0);
}

TEST(Rouge, InvalidOrder) {
  EXPECT_EQ(code_of([] { ev::rouge_n("a", "a", 3); }), kk::Errc::InvalidRequest);
}

TEST(Rouge, MatchesOracleOnRandomSequences) {
  std::mt19937 rng(123);
  const std::vector<std::string> vocab = {"kedi", "evde", "uyur", "çiçek", "ağaç", "ışık", "su", "bir", "ve", "güneş"};
  for (int trial = 0; trial < 500; ++trial) {
    oracle::Tokens a, b;
    for (int i = 0, n = static_cast<int>(rng() % 12); i < n; ++i) a.push_back(vocab[rng() % 4 + (trial % 6)]);
    for (int i = 0, n = static_cast<int>(rng() % 12); i < n; ++i) b.push_back(vocab[rng() % 4 + (trial % 6)]);
    for (int n : {1, 2}) {
      const auto got = ev::rouge_n(join(a), join(b), n);
      const auto want = oracle::rouge_n(a, b, n);
      ASSERT_NEAR(got.precision, want.p, 1e-12);
      ASSERT_NEAR(got.recall, want.r, 1e-12);
      ASSERT_NEAR(got.f1, want.f, 1e-12);
    }
    const auto got = ev::rouge_l(join(a), join(b));
    const auto want = oracle::rouge_l(a, b);
    ASSERT_NEAR(got.f1, want.f, 1e-12);
    ASSERT_EQ(ev::lcs_length(a, b), oracle::lcs_table(a, b));
  }
}

TEST(Rouge, SwapExchangesPrecisionAndRecall) {
  std::mt19937 rng(8);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string x, y;
    for (int i = 0, n = static_cast<int>(rng() % 9); i < n; ++i) x += vocab[rng() % 5] + " ";
    for (int i = 0, n = static_cast<int>(rng() % 9); i < n; ++i) y += vocab[rng() % 5] + " ";
    for (auto m : {ev::Metric::Rouge1, ev::Metric::Rouge2, ev::Metric::RougeL}) {
      const auto xy = ev::score_metric(m, x, y);
      const auto yx = ev::score_metric(m, y, x);
      EXPECT_EQ(xy.precision, yx.recall);
      EXPECT_EQ(xy.recall, yx.precision);
      EXPECT_DOUBLE_EQ(xy.f1, yx.f1);
      EXPECT_GE(xy.f1, 0.0);
      EXPECT_LE(xy.f1, std::max(xy.precision, xy.recall) + 1e-15);
      EXPECT_LE(xy.f1, 1.0);
    }
  }
}

TEST(CorpusRouge, MeanOfPerPairScores) {
  const std::vector<ev::EvalPair> pairs = {{"kedi evde uyur", {"kedi bahçede uyur"}}, {"elma", {"armut"}}};
  const auto c = ev::corpus_rouge(pairs);
  EXPECT_EQ(ev::format_fixed(c.rouge1.f1, 2), "33.33");
  EXPECT_NEAR(c.rouge1.f1, 100.0 / 3, 1e-12);

  const std::vector<ev::EvalPair> same = {{"Ay Dünya'nın uydusudur", {"Ay Dünya'nın uydusudur"}}, {"a b", {"a b"}}};
  const auto id = ev::corpus_rouge(same);
  for (auto m : {ev::Metric::Rouge1, ev::Metric::Rouge2, ev::Metric::RougeL}) {
    EXPECT_EQ(ev::format_fixed(id.get(m).f1, 2), "100.00");
  }
  EXPECT_EQ(code_of([] { ev::corpus_rouge({}); }), kk::Errc::EmptyEvaluationSet);
}

TEST(CorpusRouge, PooledCountsDiffersFromMean) {
  const std::vector<ev::EvalPair> pairs = {{"a b c d", {"a b c d"}}, {"x", {"y"}}};
  const auto pooled = ev::corpus_rouge(pairs, ev::Aggregation::Pooled);
  EXPECT_NEAR(pooled.rouge1.precision, 80.0, 1e-12);
  EXPECT_NEAR(ev::corpus_rouge(pairs).rouge1.precision, 50.0, 1e-12);
}

TEST(CorpusRouge, MultipleReferencesTakeBest) {
  const std::vector<ev::EvalPair> pairs = {{"kedi uyur", {"köpek koşar", "kedi uyur"}}};
  EXPECT_EQ(ev::corpus_rouge(pairs).rouge1.f1, 100.0);
}

TEST(CorpusRouge, ReadsTsvAndWritesCsv) {
  std::istringstream in("candidate\treference\nkedi uyur\tkedi uyur\nkedi uyur\tköpek\nelma\tarmut\n");
  const auto pairs = ev::read_eval_pairs(in);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].references.size(), 2u);
  std::ostringstream out;
  ev::write_rouge_csv(out, ev::corpus_rouge(pairs));
  EXPECT_EQ(out.str(),
            "metric,precision,recall,f1\nrouge1,50.00,50.00,50.00\nrouge2,50.00,50.00,50.00\nrougeL,50.00,50.00,50.00\n");
}

TEST(Acceptability, Examples) {
  const auto a = ev::acceptability_rate({{"c1", "m", true, "r"}, {"c2", "m", false, "r"}, {"c3", "m", true, "r"},
                                         {"c4", "m", true, "r"}});
  EXPECT_EQ(a.overall.display(), "75.0");

  const ev::RateRow paper{1106, 2135};
  EXPECT_EQ(paper.display(), "51.8");
  EXPECT_EQ(code_of([] { ev::acceptability_rate({}); }), kk::Errc::EmptyEvaluationSet);
}

TEST(Acceptability, PerModelPartitionsOverall) {
  std::mt19937 rng(4);
  std::vector<ev::RatingRecord> ratings;
  for (int i = 0; i < 400; ++i) {
    ratings.push_back({"c" + std::to_string(i), rng() % 3 ? "ince-ayarlı" : "temel", rng() % 2 == 0, "r1"});
  }
  const auto a = ev::acceptability_rate(ratings);
  ASSERT_EQ(a.per_model.size(), 2u);
  std::size_t acc = 0, total = 0;
  double weighted = 0.0;
  for (const auto& [_, row] : a.per_model) {
    acc += row.accepted;
    total += row.total;
    weighted += row.rate() * row.total;
  }
  EXPECT_EQ(acc, a.overall.accepted);
  EXPECT_EQ(total, a.overall.total);
  EXPECT_NEAR(weighted / total, a.overall.rate(), 1e-12);
}

TEST(Acceptability, ReadsTsvAndWritesCsv) {
  std::istringstream in("candidate_id\tmodel_id\taccepted\trater\nc1\tA\t1\tr\nc2\tA\tfalse\tr\nc3\tB\tevet\tr\n");
  const auto a = ev::acceptability_rate(ev::read_ratings(in));
  std::ostringstream out;
  ev::write_ratings_csv(out, a);
  EXPECT_EQ(out.str(), "model_id,accepted,total,rate\nA,1,2,50.0\nB,1,1,100.0\nALL,2,3,66.7\n");
  std::istringstream bad("candidate_id\tmodel_id\taccepted\trater\nc1\tA\tbelki\tr\n");
  EXPECT_EQ(code_of([&] { ev::read_ratings(bad); }), kk::Errc::MalformedInput);
}
