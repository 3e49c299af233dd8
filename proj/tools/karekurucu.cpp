// karekurucu: command-line front end for the crossword pipeline.
//
// Exit codes: 0 success, 1 validation error, 2 provider failure,
// 3 generation failure.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "karekurucu/karekurucu.hpp"

namespace kk = karekurucu;
namespace fs = std::filesystem;

namespace {

int exit_code(kk::Errc code) {
  switch (code) {
    case kk::Errc::ProviderUnavailable:
    case kk::Errc::AllProvidersFailed:
    case kk::Errc::NoCluesFound: return 2;
    case kk::Errc::NoWordFits:
    case kk::Errc::IllegalPlacement:
    case kk::Errc::MissingClue: return 3;
    default: return 1;
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw kk::Error(kk::Errc::UnreadableSource, "cannot open " + path);
  return in;
}

/// Writes to `path`, or stdout when empty or "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw kk::Error(kk::Errc::UnreadableSource, "cannot write " + path);
  fn(out);
}

nlohmann::json report_json(const kk::corpus::FilterReport& r) {
  return {{"input_count", r.input_count}, {"accepted_count", r.accepted_count}, {"rejected_by_rule", r.rejected_by_rule}};
}

struct ProviderOptions {
  std::string config_path;
  std::string fixtures;
  std::string corpus;

  kk::clueforge::ProviderConfig resolve() const {
    kk::clueforge::ProviderConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in = open_input(config_path);
      cfg = kk::clueforge::ProviderConfig::from_json(nlohmann::json::parse(in));
    } else if (!corpus.empty()) {
      cfg.kind = kk::clueforge::ProviderKind::Static;
      cfg.corpus_path = corpus;
    } else {
      cfg.kind = kk::clueforge::ProviderKind::Mock;
      cfg.fixtures_dir = fixtures;
    }
    if (cfg.kind == kk::clueforge::ProviderKind::Mock && !fixtures.empty()) cfg.fixtures_dir = fixtures;
    return cfg;
  }

  void add_to(CLI::App* cmd) {
    cmd->add_option("--provider-config", config_path, "Provider config JSON (kind, endpoint, model_name, ...)");
    cmd->add_option("--fixtures", fixtures, "Mock provider fixtures directory (<ANSWER>.txt)");
    cmd->add_option("--corpus", corpus, "Static provider: answer/clue TSV");
  }
};

void add_gen_options(CLI::App* cmd, kk::grid::GenConfig& cfg, long long& budget_ms) {
  cmd->add_option("--width", cfg.width, "Grid width")->capture_default_str();
  cmd->add_option("--height", cfg.height, "Grid height")->capture_default_str();
  cmd->add_option("--min-words", cfg.min_words, "Stop once this many words are placed (with --fill)")->capture_default_str();
  cmd->add_option("--fill", cfg.target_fill_ratio, "Target filled-cell ratio in (0,1]")->capture_default_str();
  cmd->add_option("--max-adjustments", cfg.max_adjustments, "Removal + reset budget")->capture_default_str();
  cmd->add_option("--time-budget-ms", budget_ms, "Wall-clock budget in milliseconds")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  cmd->add_option("--removal-batch", cfg.removal_batch, "Words removed per perturbation")->capture_default_str();
  cmd->add_option("--max-resets", cfg.max_resets, "Fruitless removal rounds before a reset")->capture_default_str();
  cmd->add_option("--crossing-weight", cfg.crossing_weight, "Weight of crossing cells in the score")->capture_default_str();
  cmd->add_option("--workers", cfg.workers, "Threads evaluating candidate placements")->capture_default_str();
}

std::vector<kk::session::SelectedAnswer> read_word_list(std::istream& in) {
  kk::corpus::tsv::Reader reader(in);
  const std::size_t answer_col = reader.require("answer");
  const std::size_t clue_col = reader.require("clue");
  const auto priority_col = reader.column("priority");
  std::vector<kk::session::SelectedAnswer> out;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() <= std::max(answer_col, clue_col)) throw kk::Error(kk::Errc::MalformedInput, "short row");
    kk::session::SelectedAnswer s{kk::to_grid_form(kk::corpus::strip_spaces(fields[answer_col])), fields[clue_col],
                                  false};
    if (priority_col && *priority_col < fields.size()) {
      const std::string& p = fields[*priority_col];
      s.priority = p == "1" || p == "true" || p == "yes";
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"karekurucu: Turkish educational crossword generator"};
  app.require_subcommand(1);

  // ingest
  std::string ingest_in, ingest_out, ingest_source;
  auto* ingest = app.add_subcommand("ingest", "Normalize and deduplicate an answer/clue TSV");
  ingest->add_option("--input", ingest_in, "TSV with answer, clue columns")->required();
  ingest->add_option("--output", ingest_out, "Clean TSV (default stdout)");
  ingest->add_option("--source", ingest_source, "Source tag when the input has no source column");

  // filter
  std::string filter_kind = "pairs", filter_in, filter_out;
  kk::corpus::FilterConfig fcfg;
  auto* filter = app.add_subcommand("filter", "Apply keyword / text-record filters");
  filter->add_option("--kind", filter_kind, "pairs | records")->check(CLI::IsMember({"pairs", "records"}));
  filter->add_option("--input", filter_in)->required();
  filter->add_option("--output", filter_out, "Accepted rows (default stdout)");
  filter->add_option("--min-len", fcfg.min_answer_len)->capture_default_str();
  filter->add_option("--max-len", fcfg.max_answer_len)->capture_default_str();
  filter->add_option("--min-words", fcfg.min_text_words)->capture_default_str();
  filter->add_option("--max-words", fcfg.max_text_words)->capture_default_str();
  filter->add_option("--min-views", fcfg.min_views)->capture_default_str();
  filter->add_option("--min-relevance", fcfg.min_relevance)->capture_default_str();

  // stats
  std::string stats_kind = "pairs", stats_in, stats_out;
  auto* stats = app.add_subcommand("stats", "Answer-length histogram or category distribution as CSV");
  stats->add_option("--kind", stats_kind, "pairs | records")->check(CLI::IsMember({"pairs", "records"}));
  stats->add_option("--input", stats_in)->required();
  stats->add_option("--output", stats_out);

  // clues
  ProviderOptions clue_provider;
  std::string clue_answer, clue_text, clue_category;
  int clue_n = 3;
  bool clue_allow_absent = false, clue_strict = false;
  auto* clues = app.add_subcommand("clues", "Generate candidate clues for one answer");
  clue_provider.add_to(clues);
  clues->add_option("--answer", clue_answer)->required();
  clues->add_option("--text", clue_text, "Source text (text/answer/category mode)");
  clues->add_option("--category", clue_category);
  clues->add_option("-n", clue_n, "Number of candidates")->capture_default_str();
  clues->add_flag("--allow-absent", clue_allow_absent, "Allow an answer that does not occur in the text");
  clues->add_flag("--strict", clue_strict, "Also require 5..15 words per clue");

  // puzzle
  std::string puzzle_in, puzzle_out, puzzle_text, puzzle_trace;
  kk::grid::GenConfig gcfg;
  long long puzzle_budget = gcfg.time_budget.count();
  auto* puzzle = app.add_subcommand("puzzle", "Build a crossword from an answer/clue TSV");
  puzzle->add_option("--input", puzzle_in, "TSV with answer, clue[, priority]")->required();
  puzzle->add_option("--output", puzzle_out, "Puzzle JSON (default stdout)");
  puzzle->add_option("--text", puzzle_text, "Also write the monospace rendering here");
  puzzle->add_option("--trace", puzzle_trace, "Write the search trace (JSON lines) here");
  add_gen_options(puzzle, gcfg, puzzle_budget);

  // eval
  std::string eval_kind = "rouge", eval_in, eval_out;
  bool eval_pooled = false;
  auto* evalcmd = app.add_subcommand("eval", "ROUGE scores or acceptability rates");
  evalcmd->add_option("--kind", eval_kind, "rouge | ratings")->check(CLI::IsMember({"rouge", "ratings"}));
  evalcmd->add_option("--input", eval_in)->required();
  evalcmd->add_option("--output", eval_out);
  evalcmd->add_flag("--pooled", eval_pooled, "F1 of pooled counts instead of per-pair means");

  // serve
  ProviderOptions serve_provider;
  std::string serve_listen = "127.0.0.1:8080", serve_data;
  kk::grid::GenConfig serve_gcfg;
  long long serve_budget = serve_gcfg.time_budget.count();
  bool serve_allow_absent = false;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve_provider.add_to(serve);
  serve->add_option("--listen", serve_listen, "host:port")->capture_default_str();
  serve->add_option("--data-dir", serve_data, "Session directory (default $KAREKURUCU_DATA_DIR)");
  serve->add_flag("--allow-absent", serve_allow_absent);
  add_gen_options(serve, serve_gcfg, serve_budget);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      std::ifstream in = open_input(ingest_in);
      auto result = kk::corpus::ingest_pairs(in, ingest_source);
      with_output(ingest_out, [&](std::ostream& out) { kk::corpus::write_pairs(out, result.pairs); });
      std::ofstream side(kk::corpus::rejected_sidecar_path(ingest_in), std::ios::binary);
      kk::corpus::write_rejected(side, result.header, result.rejected);
      std::cerr << report_json(result.report).dump() << '\n';
    } else if (*filter) {
      fcfg.validate();
      std::ifstream in = open_input(filter_in);
      std::ofstream side(kk::corpus::rejected_sidecar_path(filter_in), std::ios::binary);
      kk::corpus::FilterReport report;
      if (filter_kind == "pairs") {
        auto ingested = kk::corpus::ingest_pairs(in);
        auto filtered = kk::corpus::filter_pairs(ingested.pairs, fcfg);
        with_output(filter_out, [&](std::ostream& out) { kk::corpus::write_pairs(out, filtered.accepted); });
        auto rejected = ingested.rejected;
        const auto col = [&](std::string_view name) {
          return static_cast<std::size_t>(
              std::find(ingested.header.begin(), ingested.header.end(), name) - ingested.header.begin());
        };
        for (const auto& [pair, rule] : filtered.rejected) {
          std::vector<std::string> fields(ingested.header.size());
          fields[col("answer")] = pair.answer.text();
          fields[col("clue")] = pair.clue;
          if (col("source") < fields.size()) fields[col("source")] = pair.source;
          rejected.push_back({fields, rule});
        }
        kk::corpus::write_rejected(side, ingested.header, rejected);
        report = ingested.report;
        report.accepted_count = 0;
        report.input_count -= ingested.report.accepted_count;
        report.merge(filtered.report);
      } else {
        auto ingested = kk::corpus::ingest_records(in);
        auto filtered = kk::corpus::filter_records(ingested.records, fcfg);
        with_output(filter_out, [&](std::ostream& out) { kk::corpus::write_records(out, filtered.accepted); });
        auto rejected = ingested.rejected;
        for (const auto& [rec, rule] : filtered.rejected) rejected.push_back({kk::corpus::record_fields(rec), rule});
        std::vector<std::string> header = {"title", "text", "keyword", "category", "views", "relevance", "url"};
        kk::corpus::write_rejected(side, header, rejected);
        report = ingested.report;
        report.accepted_count = 0;
        report.input_count -= ingested.report.accepted_count;
        report.merge(filtered.report);
      }
      std::cerr << report_json(report).dump() << '\n';
    } else if (*stats) {
      std::ifstream in = open_input(stats_in);
      if (stats_kind == "pairs") {
        auto hist = kk::corpus::answer_length_histogram(kk::corpus::ingest_pairs(in).pairs);
        with_output(stats_out, [&](std::ostream& out) { kk::corpus::write_histogram_csv(out, hist); });
      } else {
        auto dist = kk::corpus::category_distribution(kk::corpus::ingest_records(in).records);
        with_output(stats_out, [&](std::ostream& out) { kk::corpus::write_category_csv(out, dist); });
      }
    } else if (*clues) {
      auto provider = kk::clueforge::make_provider(clue_provider.resolve());
      kk::clueforge::ClueRequest req;
      req.answer = kk::to_grid_form(kk::corpus::strip_spaces(clue_answer));
      req.n = clue_n;
      if (!clue_category.empty()) req.category = clue_category;
      std::vector<kk::clueforge::ClueCandidate> got;
      if (!clue_text.empty()) {
        req.text = clue_text;
        got = kk::clueforge::generate_from_text(req, *provider, clue_allow_absent, clue_strict);
      } else {
        got = kk::clueforge::generate_from_answer(req.answer, req.n, *provider, clue_strict);
      }
      for (std::size_t i = 0; i < got.size(); ++i) got[i].id = "c" + std::to_string(i + 1);
      std::cout << nlohmann::json(got).dump(2) << '\n';
    } else if (*puzzle) {
      gcfg.time_budget = std::chrono::milliseconds(puzzle_budget);
      gcfg.trace = !puzzle_trace.empty();
      std::ifstream in = open_input(puzzle_in);
      const auto words = read_word_list(in);
      const auto built = kk::session::build_puzzle(words, gcfg);
      with_output(puzzle_out, [&](std::ostream& out) { out << kk::grid::to_json_text(built.document); });
      if (!puzzle_text.empty()) {
        with_output(puzzle_text, [&](std::ostream& out) { out << kk::grid::render_text(built.document); });
      }
      if (!puzzle_trace.empty()) {
        // The trace comes from a second, identical run with tracing enabled.
        std::vector<kk::grid::WordEntry> entries;
        for (const auto& w : words) entries.push_back({w.answer, w.priority});
        const auto traced = kk::grid::generate(entries, gcfg);
        with_output(puzzle_trace, [&](std::ostream& out) { out << kk::grid::trace_lines(traced.trace); });
      }
      std::cerr << "termination: " << kk::grid::to_string(built.reason) << ", score " << built.score.score
                << ", words " << built.score.fw << ", unplaced " << built.unplaced.size() << '\n';
    } else if (*evalcmd) {
      std::ifstream in = open_input(eval_in);
      if (eval_kind == "rouge") {
        const auto scores = kk::eval::corpus_rouge(kk::eval::read_eval_pairs(in), eval_pooled
                                                                                      ? kk::eval::Aggregation::Pooled
                                                                                      : kk::eval::Aggregation::PerPairMean);
        with_output(eval_out, [&](std::ostream& out) { kk::eval::write_rouge_csv(out, scores); });
      } else {
        const auto rates = kk::eval::acceptability_rate(kk::eval::read_ratings(in));
        with_output(eval_out, [&](std::ostream& out) { kk::eval::write_ratings_csv(out, rates); });
      }
    } else if (*serve) {
      serve_gcfg.time_budget = std::chrono::milliseconds(serve_budget);
      serve_gcfg.validate();
      if (serve_data.empty()) {
        if (const char* env = std::getenv("KAREKURUCU_DATA_DIR")) serve_data = env;
        else serve_data = "karekurucu-data";
      }
      const auto colon = serve_listen.rfind(':');
      if (colon == std::string::npos) throw kk::Error(kk::Errc::InvalidRequest, "--listen expects host:port");
      kk::service::ServiceConfig scfg;
      scfg.host = serve_listen.substr(0, colon);
      scfg.port = std::stoi(serve_listen.substr(colon + 1));
      auto provider = kk::clueforge::make_provider(serve_provider.resolve());
      kk::session::SessionStore store(serve_data);
      kk::session::Workbench bench(store, *provider, serve_gcfg, serve_allow_absent);
      kk::service::Service svc(bench, scfg);
      std::cerr << "listening on " << scfg.host << ':' << scfg.port << ", data in " << serve_data << '\n';
      if (!svc.listen()) throw kk::Error(kk::Errc::Internal, "cannot listen on " + serve_listen);
    }
  } catch (const kk::Error& e) {
    std::cerr << "error: " << e.to_json().dump() << '\n';
    return exit_code(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
