#pragma once

// JSON-over-HTTP front end for the session workflow.
//
//   POST /sessions                  {"inputs": [{answer, text?, category?, n?}]}
//   GET  /sessions/{id}
//   POST /sessions/{id}/clues
//   POST /sessions/{id}/puzzle      {"selections": [...], "config": {...}?, "async": bool?}
//   GET  /sessions/{id}/puzzle.json
//   GET  /sessions/{id}/puzzle.txt
//   POST /eval/rouge                {"pairs": [{candidate, reference | references}], "aggregation"?}
//   GET  /health
//
// Errors are {code, message, details} with the stable code strings of Errc.

#include <cstddef>
#include <list>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "karekurucu/error.hpp"
#include "karekurucu/evalkit.hpp"
#include "karekurucu/gridengine.hpp"
#include "karekurucu/session.hpp"

namespace karekurucu::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t max_body_bytes = 1 << 20;
  std::size_t max_inputs = 200;
};

inline int http_status(Errc code) {
  switch (code) {
    case Errc::SessionNotFound: return 404;
    case Errc::Conflict:
    case Errc::InvalidTransition: return 409;
    case Errc::NoWordFits:
    case Errc::UnknownCandidate:
    case Errc::AnswerNotInText:
    case Errc::NonAlphabetCharacter: return 422;
    case Errc::AllProvidersFailed:
    case Errc::ProviderUnavailable: return 502;
    case Errc::Internal:
    case Errc::UnreadableSource: return 500;
    default: return 400;
  }
}

class Service {
 public:
  Service(session::Workbench& bench, ServiceConfig cfg = {}) : bench_(bench), cfg_(std::move(cfg)) { bind(); }

  ~Service() {
    stop();
    std::lock_guard lock(jobs_mu_);
    for (auto& t : jobs_) {
      if (t.joinable()) t.join();
    }
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  httplib::Server& server() noexcept { return server_; }

  /// Blocks until stop().
  bool listen() { return server_.listen(cfg_.host, cfg_.port); }

  /// Binds an ephemeral port on host; returns it. Follow with listen_after_bind().
  int bind_any_port() { return server_.bind_to_any_port(cfg_.host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }

  void stop() { server_.stop(); }

 private:
  static void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, const Error& e) { send_json(res, http_status(e.code()), e.to_json()); }

  static nlohmann::json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return nlohmann::json::object();
    auto j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::ValidationFailed, "request body is not valid JSON");
    return j;
  }

  template <typename Handler>
  auto guarded(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const nlohmann::json::exception& e) {
        send_error(res, Error(Errc::ValidationFailed, e.what()));
      } catch (const std::exception& e) {
        send_error(res, Error(Errc::Internal, e.what()));
      }
    };
  }

  void bind() {
    server_.set_payload_max_length(cfg_.max_body_bytes);

    server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}});
    });

    server_.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      if (!body.contains("inputs") || !body["inputs"].is_array()) {
        throw Error(Errc::ValidationFailed, "body requires an 'inputs' array");
      }
      if (body["inputs"].size() > cfg_.max_inputs) throw Error(Errc::ValidationFailed, "too many inputs");
      std::vector<clueforge::ClueRequest> inputs;
      for (const auto& in : body["inputs"]) inputs.push_back(in.get<clueforge::ClueRequest>());
      send_json(res, 201, bench_.create_session(inputs));
    }));

    server_.Get("/sessions/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, bench_.get_session(req.path_params.at("id")));
    }));

    server_.Post("/sessions/:id/clues", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, bench_.request_clues(req.path_params.at("id")));
    }));

    server_.Post("/sessions/:id/puzzle", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.path_params.at("id");
      const auto body = parse_body(req);
      grid::GenConfig cfg = bench_.defaults();
      if (body.contains("config")) {
        body.at("config").get_to(cfg);
        cfg.validate();
      }
      const nlohmann::json selections = body.value("selections", nlohmann::json());
      if (body.value("async", false)) {
        auto chosen = bench_.begin_generation(id, selections);
        std::lock_guard lock(jobs_mu_);
        jobs_.emplace_back([this, id, chosen = std::move(chosen), cfg] { bench_.complete_generation(id, chosen, cfg); });
        send_json(res, 202, bench_.get_session(id));
        return;
      }
      send_json(res, 200, bench_.select_and_generate(id, selections, cfg));
    }));

    server_.Get("/sessions/:id/puzzle.json", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto s = bench_.get_session(req.path_params.at("id"));
      if (!s.puzzle) throw Error(Errc::InvalidTransition, "no puzzle generated yet");
      res.status = 200;
      res.set_content(grid::to_json_text(s.puzzle->document), "application/json");
    }));

    server_.Get("/sessions/:id/puzzle.txt", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto s = bench_.get_session(req.path_params.at("id"));
      if (!s.puzzle) throw Error(Errc::InvalidTransition, "no puzzle generated yet");
      res.status = 200;
      res.set_content(grid::render_text(s.puzzle->document), "text/plain; charset=utf-8");
    }));

    server_.Post("/eval/rouge", guarded([](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      std::vector<eval::EvalPair> pairs;
      for (const auto& p : body.value("pairs", nlohmann::json::array())) {
        eval::EvalPair ep{p.at("candidate").get<std::string>(), {}};
        if (p.contains("references")) ep.references = p.at("references").get<std::vector<std::string>>();
        else ep.references.push_back(p.at("reference").get<std::string>());
        pairs.push_back(std::move(ep));
      }
      const auto agg = body.value("aggregation", "mean") == "pooled" ? eval::Aggregation::Pooled
                                                                     : eval::Aggregation::PerPairMean;
      const eval::CorpusRouge scores = eval::corpus_rouge(pairs, agg);
      nlohmann::json out;
      for (auto m : {eval::Metric::Rouge1, eval::Metric::Rouge2, eval::Metric::RougeL}) {
        const auto& s = scores.get(m);
        out[std::string(eval::metric_name(m))] = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
      }
      send_json(res, 200, out);
    }));
  }

  session::Workbench& bench_;
  ServiceConfig cfg_;
  httplib::Server server_;
  std::mutex jobs_mu_;
  std::list<std::thread> jobs_;
};

}  // namespace karekurucu::service
