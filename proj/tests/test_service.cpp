#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "httplib.h"
#include "karekurucu/service.hpp"

namespace fs = std::filesystem;
namespace kk = karekurucu;
namespace cf = karekurucu::clueforge;
namespace ks = karekurucu::session;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  const fs::path dir = fs::temp_directory_path() / ("karekurucu-" + tag + "-" + std::to_string(rng()));
  fs::remove_all(dir);
  return dir;
}

std::unique_ptr<cf::ClueProvider> mock_provider() {
  cf::ProviderConfig cfg;
  cfg.kind = cf::ProviderKind::Mock;
  cfg.fixtures_dir = std::string(KAREKURUCU_FIXTURES) + "/mock";
  cfg.backoff_initial = std::chrono::milliseconds(1);
  cfg.backoff_max = std::chrono::milliseconds(1);
  return cf::make_provider(cfg);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    kk::grid::GenConfig defaults;
    defaults.seed = 42;
    bench = std::make_unique<ks::Workbench>(store, *provider, defaults);
    service = std::make_unique<kk::service::Service>(*bench);
    port = service->bind_any_port();
    ASSERT_GT(port, 0);
    thread = std::thread([this] { service->listen_after_bind(); });
    service->server().wait_until_ready();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    client->set_read_timeout(30, 0);
  }

  void TearDown() override {
    service->stop();
    thread.join();
    service.reset();
    fs::remove_all(dir);
  }

  httplib::Result post(const std::string& path, const json& body) {
    return client->Post(path, body.dump(), "application/json");
  }

  std::string create_and_fetch_clues() {
    auto created = post("/sessions", {{"inputs", {{{"answer", "ankara"}}, {{"answer", "atatürk"}}, {{"answer", "güneş"}}}}});
    EXPECT_EQ(created->status, 201);
    const std::string id = json::parse(created->body).at("id");
    auto clues = client->Post("/sessions/" + id + "/clues");
    EXPECT_EQ(clues->status, 200);
    return id;
  }

  fs::path dir = fresh_dir("service");
  ks::SessionStore store{dir};
  std::unique_ptr<cf::ClueProvider> provider = mock_provider();
  std::unique_ptr<ks::Workbench> bench;
  std::unique_ptr<kk::service::Service> service;
  std::unique_ptr<httplib::Client> client;
  std::thread thread;
  int port = 0;
};

}  // namespace

TEST_F(ServiceTest, Health) {
  auto res = client->Get("/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body).at("status"), "ok");
}

TEST_F(ServiceTest, SessionLifecycle) {
  auto created = post("/sessions", {{"inputs", {{{"answer", "kedi"}}, {{"answer", "kalem"}}}}});
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  const auto s = json::parse(created->body);
  EXPECT_EQ(s.at("status"), "draft");
  EXPECT_TRUE(s.at("candidates").empty());

  auto got = client->Get("/sessions/" + s.at("id").get<std::string>());
  EXPECT_EQ(got->status, 200);
  EXPECT_EQ(json::parse(got->body), s);

  auto missing = client->Get("/sessions/ffffffffffffffff");
  EXPECT_EQ(missing->status, 404);
  const auto err = json::parse(missing->body);
  EXPECT_EQ(err.at("code"), "SessionNotFound");
  EXPECT_TRUE(err.contains("message"));
  EXPECT_TRUE(err.contains("details"));
}

TEST_F(ServiceTest, ValidationErrors) {
  auto bad_json = client->Post("/sessions", "{not json", "application/json");
  EXPECT_EQ(bad_json->status, 400);
  EXPECT_EQ(json::parse(bad_json->body).at("code"), "ValidationFailed");
  EXPECT_EQ(post("/sessions", json::object())->status, 400);
  EXPECT_EQ(post("/sessions", {{"inputs", json::array()}})->status, 400);
  auto bad_word = post("/sessions", {{"inputs", {{{"answer", "covid-19"}}}}});
  EXPECT_EQ(bad_word->status, 400);
  const auto bad_word_err = json::parse(bad_word->body);
  EXPECT_EQ(bad_word_err.at("code"), "ValidationFailed");
  EXPECT_EQ(bad_word_err.at("details").at("char"), "-");
  EXPECT_TRUE(fs::is_empty(dir));
}

TEST_F(ServiceTest, CluesThenPuzzle) {
  const std::string id = create_and_fetch_clues();
  const auto s = json::parse(client->Get("/sessions/" + id)->body);
  EXPECT_EQ(s.at("status"), "clues_ready");
  EXPECT_EQ(s.at("candidates").size(), 9u);

  auto again = client->Post("/sessions/" + id + "/clues");
  EXPECT_EQ(again->status, 409);
  EXPECT_EQ(json::parse(again->body).at("code"), "InvalidTransition");

  EXPECT_EQ(client->Get("/sessions/" + id + "/puzzle.json")->status, 409);

  const std::string before = slurp(dir / (id + ".json"));
  auto unknown = post("/sessions/" + id + "/puzzle", {{"selections", {"c1", "nope"}}});
  EXPECT_EQ(unknown->status, 422);
  EXPECT_EQ(json::parse(unknown->body).at("code"), "UnknownCandidate");
  auto too_small = post("/sessions/" + id + "/puzzle", {{"selections", {"c1"}}, {"config", {{"width", 3}, {"height", 3}}}});
  EXPECT_EQ(too_small->status, 422);
  EXPECT_EQ(json::parse(too_small->body).at("code"), "NoWordFits");
  EXPECT_EQ(slurp(dir / (id + ".json")), before);

  auto made = post("/sessions/" + id + "/puzzle", {{"selections", {"c1", "c4", "c7"}}});
  ASSERT_EQ(made->status, 200);
  const auto done = json::parse(made->body);
  EXPECT_EQ(done.at("status"), "generated");
  EXPECT_TRUE(done.at("puzzle").contains("termination_reason"));

  auto doc = client->Get("/sessions/" + id + "/puzzle.json");
  ASSERT_EQ(doc->status, 200);
  const auto parsed = json::parse(doc->body);
  for (const char* key : {"width", "height", "cells", "numbers", "across", "down"}) EXPECT_TRUE(parsed.contains(key));
  auto txt = client->Get("/sessions/" + id + "/puzzle.txt");
  ASSERT_EQ(txt->status, 200);
  EXPECT_NE(txt->body.find("SOLDAN SAĞA"), std::string::npos);
}

TEST_F(ServiceTest, AsyncGenerationIsPolled) {
  const std::string id = create_and_fetch_clues();
  auto accepted = post("/sessions/" + id + "/puzzle", {{"selections", {"c1", "c4", "c7"}}, {"async", true}});
  ASSERT_EQ(accepted->status, 202);
  std::string status;
  for (int i = 0; i < 500 && status != "generated"; ++i) {
    status = json::parse(client->Get("/sessions/" + id)->body).at("status");
    if (status != "generated") std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  EXPECT_EQ(status, "generated");
}

TEST_F(ServiceTest, RougeEndpoint) {
  auto res = post("/eval/rouge", {{"pairs", {{{"candidate", "kedi evde uyur"}, {"reference", "kedi bahçede uyur"}},
                                             {{"candidate", "elma"}, {"references", {"armut"}}}}}});
  ASSERT_EQ(res->status, 200);
  const auto j = json::parse(res->body);
  EXPECT_NEAR(j.at("rouge1").at("f1").get<double>(), 100.0 / 3, 1e-9);
  EXPECT_TRUE(j.contains("rouge2"));
  EXPECT_TRUE(j.contains("rougeL"));
  auto empty = post("/eval/rouge", {{"pairs", json::array()}});
  EXPECT_EQ(empty->status, 400);
  EXPECT_EQ(json::parse(empty->body).at("code"), "EmptyEvaluationSet");
}

TEST_F(ServiceTest, CliAndHttpProduceIdenticalDocument) {
  const std::string id = create_and_fetch_clues();
  const json cfg = {{"width", 11}, {"height", 11}, {"seed", 5}, {"min_words", 3}, {"max_adjustments", 5}};
  auto made = post("/sessions/" + id + "/puzzle", {{"selections", {"c2", "c5", "c9"}}, {"config", cfg}});
  ASSERT_EQ(made->status, 200);
  const std::string http_doc = client->Get("/sessions/" + id + "/puzzle.json")->body;

  const auto s = json::parse(client->Get("/sessions/" + id)->body);
  const fs::path work = fresh_dir("cli");
  fs::create_directories(work);
  {
    std::ofstream tsv(work / "words.tsv");
    tsv << "answer\tclue\n";
    for (const auto& [answer, clue] : s.at("selections").items()) tsv << answer << '\t' << clue.get<std::string>() << '\n';
  }
  const std::string cmd = std::string("\"") + KAREKURUCU_CLI + "\" puzzle --input \"" + (work / "words.tsv").string() +
                          "\" --output \"" + (work / "out.json").string() +
                          "\" --width 11 --height 11 --seed 5 --min-words 3 --max-adjustments 5";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(slurp(work / "out.json"), http_doc);
  fs::remove_all(work);
}
