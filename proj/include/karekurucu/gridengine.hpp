#pragma once

// Criss-cross layout construction: placement legality, incremental scoring,
// and the insertion / removal / reset search.
//
//   score = (FW + w * LL) * FR * LR
//
// with FW the number of placed words, LL the number of crossing cells, FR the
// filled fraction of the grid and LR = LL / filled cells; w defaults to 0.5.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "karekurucu/corpus.hpp"
#include "karekurucu/error.hpp"
#include "karekurucu/textnorm.hpp"

namespace karekurucu::grid {

enum class Direction : std::uint8_t { Across = 0, Down = 1 };

constexpr std::string_view to_string(Direction d) noexcept { return d == Direction::Across ? "across" : "down"; }

struct Cell {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct Placement {
  NormalizedWord word;
  int row = 0;
  int col = 0;
  Direction direction = Direction::Across;

  Cell cell(std::size_t i) const {
    const int k = static_cast<int>(i);
    return direction == Direction::Across ? Cell{row, col + k} : Cell{row + k, col};
  }
  Cell before() const { return direction == Direction::Across ? Cell{row, col - 1} : Cell{row - 1, col}; }
  Cell after() const { return cell(word.length()); }

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct ScoreBreakdown {
  int fw = 0;
  int ll = 0;
  double fr = 0.0;
  double lr = 0.0;
  double score = 0.0;
};

/// Builds the breakdown from raw counts. The formula is evaluated literally
/// so hand-computed cases reproduce bit for bit.
inline ScoreBreakdown make_score(int words, int crossings, int filled, int area, double crossing_weight = 0.5) {
  ScoreBreakdown s;
  s.fw = words;
  s.ll = crossings;
  s.fr = area > 0 ? static_cast<double>(filled) / area : 0.0;
  s.lr = filled > 0 ? static_cast<double>(crossings) / filled : 0.0;
  s.score = (s.fw + crossing_weight * s.ll) * s.fr * s.lr;
  return s;
}

/// Grid state. Each cell is covered by at most one across and one down word;
/// counters for filled and crossing cells are kept in step with every edit.
class Layout {
 public:
  Layout(int width, int height) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw Error(Errc::InvalidRequest, "grid dimensions must be positive");
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    letters_.assign(n, 0);
    across_.assign(n, 0);
    down_.assign(n, 0);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int area() const noexcept { return width_ * height_; }
  const std::vector<Placement>& placements() const noexcept { return placements_; }
  bool empty() const noexcept { return placements_.empty(); }
  int filled_cells() const noexcept { return filled_; }
  int crossing_cells() const noexcept { return crossings_; }

  bool in_bounds(Cell c) const noexcept { return c.row >= 0 && c.col >= 0 && c.row < height_ && c.col < width_; }

  /// 0 for an empty or out-of-bounds cell.
  char32_t letter(Cell c) const noexcept { return in_bounds(c) ? letters_[index(c)] : 0; }

  bool covered(Cell c, Direction d) const noexcept {
    if (!in_bounds(c)) return false;
    return (d == Direction::Across ? across_ : down_)[index(c)] != 0;
  }

  int coverage(Cell c) const noexcept {
    return in_bounds(c) ? across_[index(c)] + down_[index(c)] : 0;
  }

  bool contains(const NormalizedWord& word) const {
    return std::any_of(placements_.begin(), placements_.end(), [&](const Placement& p) { return p.word == word; });
  }

  /// Crossing cells on one placement.
  int crossings_of(const Placement& p) const {
    int n = 0;
    for (std::size_t i = 0; i < p.word.length(); ++i) n += coverage(p.cell(i)) == 2;
    return n;
  }

  /// Places a word. Throws Error(IllegalPlacement) unless the placement is legal.
  void place(const Placement& p);

  /// Removes a word; cells still covered by a crossing word keep their letter.
  void erase(const NormalizedWord& word) {
    auto it = std::find_if(placements_.begin(), placements_.end(), [&](const Placement& p) { return p.word == word; });
    if (it == placements_.end()) {
      throw Error(Errc::WordNotPresent, word.text() + " is not in the layout", {{"word", word.text()}});
    }
    const Placement p = *it;
    placements_.erase(it);
    auto& own = p.direction == Direction::Across ? across_ : down_;
    for (std::size_t i = 0; i < p.word.length(); ++i) {
      const std::size_t k = index(p.cell(i));
      own[k] = 0;
      const int remaining = across_[k] + down_[k];
      if (remaining == 0) {
        letters_[k] = 0;
        --filled_;
      } else {
        --crossings_;
      }
    }
  }

  void clear() {
    std::fill(letters_.begin(), letters_.end(), 0);
    std::fill(across_.begin(), across_.end(), 0);
    std::fill(down_.begin(), down_.end(), 0);
    placements_.clear();
    filled_ = crossings_ = 0;
  }

  /// Row strings with '.' for empty cells.
  std::vector<std::string> rows() const {
    std::vector<std::string> out;
    for (int r = 0; r < height_; ++r) {
      std::string line;
      for (int c = 0; c < width_; ++c) {
        const char32_t ch = letter({r, c});
        if (ch) utf8::append(line, ch);
        else line.push_back('.');
      }
      out.push_back(std::move(line));
    }
    return out;
  }

 private:
  std::size_t index(Cell c) const noexcept { return static_cast<std::size_t>(c.row) * width_ + c.col; }

  int width_;
  int height_;
  std::vector<char32_t> letters_;
  std::vector<std::uint8_t> across_;
  std::vector<std::uint8_t> down_;
  std::vector<Placement> placements_;
  int filled_ = 0;
  int crossings_ = 0;
};

/// Outcome of checking one (row, col, direction) for a word.
struct PlacementCheck {
  bool legal = false;
  int overlaps = 0;
};

/// Legality rules:
///   - every cell in bounds
///   - overlapped cells carry the same letter and are not already covered in
///     the same direction
///   - at least one overlap, unless the layout is empty
///   - the cells just before and after the word along its axis are empty
///   - newly filled cells have no letter on either side across the axis
///   - the word is not already placed
inline PlacementCheck check_placement(const Layout& layout, const Placement& p) {
  const std::size_t len = p.word.length();
  if (len == 0) return {};
  if (!layout.in_bounds(p.cell(0)) || !layout.in_bounds(p.cell(len - 1))) return {};
  if (layout.letter(p.before()) || layout.letter(p.after())) return {};
  const Direction other = p.direction == Direction::Across ? Direction::Down : Direction::Across;
  int overlaps = 0;
  for (std::size_t i = 0; i < len; ++i) {
    const Cell c = p.cell(i);
    const char32_t existing = layout.letter(c);
    if (existing) {
      if (existing != p.word[i] || layout.covered(c, p.direction)) return {};
      ++overlaps;
    } else {
      const Cell side_a = other == Direction::Down ? Cell{c.row - 1, c.col} : Cell{c.row, c.col - 1};
      const Cell side_b = other == Direction::Down ? Cell{c.row + 1, c.col} : Cell{c.row, c.col + 1};
      if (layout.letter(side_a) || layout.letter(side_b)) return {};
    }
  }
  if (overlaps == 0 && !layout.empty()) return {};
  if (layout.contains(p.word)) return {};
  return {true, overlaps};
}

inline void Layout::place(const Placement& p) {
  const PlacementCheck check = check_placement(*this, p);
  if (!check.legal) {
    throw Error(Errc::IllegalPlacement,
                p.word.text() + " cannot be placed " + std::string(to_string(p.direction)) + " at (" +
                    std::to_string(p.row) + "," + std::to_string(p.col) + ")",
                {{"word", p.word.text()}, {"row", p.row}, {"col", p.col}, {"direction", to_string(p.direction)}});
  }
  auto& own = p.direction == Direction::Across ? across_ : down_;
  for (std::size_t i = 0; i < p.word.length(); ++i) {
    const std::size_t k = index(p.cell(i));
    if (letters_[k]) {
      ++crossings_;
    } else {
      letters_[k] = p.word[i];
      ++filled_;
    }
    own[k] = 1;
  }
  placements_.push_back(p);
}

/// All legal placements, ordered by (row, col, direction).
inline std::vector<Placement> legal_placements(const Layout& layout, const NormalizedWord& word) {
  std::vector<Placement> out;
  const int len = static_cast<int>(word.length());
  if (len == 0 || len > std::max(layout.width(), layout.height()) || layout.contains(word)) return out;

  if (layout.empty()) {
    for (int r = 0; r < layout.height(); ++r) {
      for (int c = 0; c < layout.width(); ++c) {
        for (Direction d : {Direction::Across, Direction::Down}) {
          Placement p{word, r, c, d};
          if (check_placement(layout, p).legal) out.push_back(std::move(p));
        }
      }
    }
    return out;
  }

  // Any legal placement overlaps a filled cell, so anchor on letter matches.
  std::set<std::tuple<int, int, int>> starts;
  for (int r = 0; r < layout.height(); ++r) {
    for (int c = 0; c < layout.width(); ++c) {
      const char32_t ch = layout.letter({r, c});
      if (!ch) continue;
      for (int i = 0; i < len; ++i) {
        if (word[i] != ch) continue;
        if (!layout.covered({r, c}, Direction::Across)) starts.emplace(r, c - i, 0);
        if (!layout.covered({r, c}, Direction::Down)) starts.emplace(r - i, c, 1);
      }
    }
  }
  for (const auto& [r, c, d] : starts) {
    Placement p{word, r, c, static_cast<Direction>(d)};
    if (check_placement(layout, p).legal) out.push_back(std::move(p));
  }
  return out;
}

/// Returns a copy with `p` placed.
inline Layout apply(Layout layout, const Placement& p) {
  layout.place(p);
  return layout;
}

/// Returns a copy with `word` removed.
inline Layout remove(Layout layout, const NormalizedWord& word) {
  layout.erase(word);
  return layout;
}

inline ScoreBreakdown score(const Layout& layout, double crossing_weight = 0.5) {
  return make_score(static_cast<int>(layout.placements().size()), layout.crossing_cells(), layout.filled_cells(),
                    layout.area(), crossing_weight);
}

// ---------------------------------------------------------------------------
// Search

struct WordEntry {
  NormalizedWord word;
  bool priority = false;
};

struct GenConfig {
  int width = 11;
  int height = 11;
  int min_words = 8;
  double target_fill_ratio = 0.5;
  int max_adjustments = 50;
  std::chrono::milliseconds time_budget{5000};
  std::uint64_t seed = 0;
  int removal_batch = 2;
  int max_resets = 3;
  double crossing_weight = 0.5;
  int workers = 1;
  bool trace = false;

  void validate() const {
    if (width <= 0 || height <= 0 || min_words <= 0 || max_adjustments < 0 || time_budget.count() <= 0 ||
        removal_batch <= 0 || max_resets < 0 || workers <= 0 || !(target_fill_ratio > 0.0 && target_fill_ratio <= 1.0)) {
      throw Error(Errc::InvalidRequest, "invalid generation config");
    }
  }
};

inline void to_json(nlohmann::json& j, const GenConfig& c) {
  j = {{"width", c.width},
       {"height", c.height},
       {"min_words", c.min_words},
       {"target_fill_ratio", c.target_fill_ratio},
       {"max_adjustments", c.max_adjustments},
       {"time_budget_ms", c.time_budget.count()},
       {"seed", c.seed},
       {"removal_batch", c.removal_batch},
       {"max_resets", c.max_resets},
       {"crossing_weight", c.crossing_weight},
       {"workers", c.workers}};
}

/// Missing keys keep the values already in `c`.
inline void from_json(const nlohmann::json& j, GenConfig& c) {
  c.width = j.value("width", c.width);
  c.height = j.value("height", c.height);
  c.min_words = j.value("min_words", c.min_words);
  c.target_fill_ratio = j.value("target_fill_ratio", c.target_fill_ratio);
  c.max_adjustments = j.value("max_adjustments", c.max_adjustments);
  c.time_budget = std::chrono::milliseconds(j.value("time_budget_ms", c.time_budget.count()));
  c.seed = j.value("seed", c.seed);
  c.removal_batch = j.value("removal_batch", c.removal_batch);
  c.max_resets = j.value("max_resets", c.max_resets);
  c.crossing_weight = j.value("crossing_weight", c.crossing_weight);
  c.workers = j.value("workers", c.workers);
  c.trace = j.value("trace", c.trace);
}

enum class TerminationReason { MinWordsAndFillReached, MaxAdjustmentsExhausted, TimeBudgetExhausted, NoMovesRemain };

constexpr std::string_view to_string(TerminationReason r) noexcept {
  switch (r) {
    case TerminationReason::MinWordsAndFillReached: return "MinWordsAndFillReached";
    case TerminationReason::MaxAdjustmentsExhausted: return "MaxAdjustmentsExhausted";
    case TerminationReason::TimeBudgetExhausted: return "TimeBudgetExhausted";
    case TerminationReason::NoMovesRemain: return "NoMovesRemain";
  }
  return "NoMovesRemain";
}

struct TraceRecord {
  int step = 0;
  std::string action;
  double score = 0.0;
  double elapsed_ms = 0.0;
};

struct GenResult {
  Layout layout;
  ScoreBreakdown score;
  TerminationReason reason = TerminationReason::NoMovesRemain;
  int adjustments = 0;
  int steps = 0;
  double elapsed_ms = 0.0;
  double longest_cycle_ms = 0.0;  // slowest single loop iteration
  std::vector<TraceRecord> trace;
};

/// Line-delimited JSON, one object per trace record.
inline std::string trace_lines(const std::vector<TraceRecord>& trace) {
  std::string out;
  for (const auto& t : trace) {
    out += nlohmann::json{{"step", t.step}, {"action", t.action}, {"score", t.score}, {"elapsed_ms", t.elapsed_ms}}.dump();
    out += '\n';
  }
  return out;
}

namespace detail {

struct Move {
  std::size_t word_index = 0;  // into the sorted word table
  Placement placement;
  double score = -1.0;
};

/// True when `a` should be chosen over `b`: higher score, then word order,
/// row, column, direction.
inline bool better(const Move& a, const Move& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.placement.word != b.placement.word) return a.placement.word < b.placement.word;
  if (a.placement.row != b.placement.row) return a.placement.row < b.placement.row;
  if (a.placement.col != b.placement.col) return a.placement.col < b.placement.col;
  return a.placement.direction < b.placement.direction;
}

class Search {
 public:
  Search(std::vector<WordEntry> words, const GenConfig& cfg)
      : cfg_(cfg), layout_(cfg.width, cfg.height), best_(cfg.width, cfg.height), rng_(cfg.seed) {
    cfg_.validate();
    const int longest = std::max(cfg.width, cfg.height);
    std::map<std::u32string, WordEntry> unique;
    for (auto& w : words) {
      if (w.word.empty() || static_cast<int>(w.word.length()) > longest) continue;
      auto [it, inserted] = unique.emplace(w.word.letters(), w);
      if (!inserted) it->second.priority = it->second.priority || w.priority;
    }
    if (unique.empty()) throw Error(Errc::NoWordFits, "no input word fits a " + std::to_string(cfg.width) + "x" +
                                                          std::to_string(cfg.height) + " grid");
    for (auto& [_, w] : unique) words_.push_back(std::move(w));
    std::sort(words_.begin(), words_.end(), [](const WordEntry& a, const WordEntry& b) { return a.word < b.word; });
    placed_.assign(words_.size(), false);
    tabu_.assign(words_.size(), false);

    // Insertion order for the spine: priority first, longest, then alphabetical.
    order_.resize(words_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      if (words_[a].priority != words_[b].priority) return words_[a].priority;
      return words_[a].word.length() > words_[b].word.length();
    });
  }

  GenResult run() {
    start_ = std::chrono::steady_clock::now();
    seed_layout();
    TerminationReason reason;
    double longest_cycle = 0.0;
    while (true) {
      const auto cycle_start = std::chrono::steady_clock::now();
      if (cycle_start - start_ >= cfg_.time_budget) {
        reason = TerminationReason::TimeBudgetExhausted;
        break;
      }
      const ScoreBreakdown now = score(layout_, cfg_.crossing_weight);
      if (now.fw >= cfg_.min_words && now.fr >= cfg_.target_fill_ratio) {
        reason = TerminationReason::MinWordsAndFillReached;
        break;
      }
      std::optional<TerminationReason> stop = step();
      const double cycle_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - cycle_start).count();
      longest_cycle = std::max(longest_cycle, cycle_ms);
      if (stop) {
        reason = *stop;
        break;
      }
    }
    GenResult result{best_, score(best_, cfg_.crossing_weight), reason, adjustments_, steps_, elapsed_ms(),
                     longest_cycle, std::move(trace_)};
    return result;
  }

 private:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

  void log(std::string action) {
    ++steps_;
    if (cfg_.trace) trace_.push_back({steps_, std::move(action), score(layout_, cfg_.crossing_weight).score, elapsed_ms()});
  }

  void note_best() {
    const double s = score(layout_, cfg_.crossing_weight).score;
    const bool more_words = layout_.placements().size() > best_.placements().size();
    if (s > best_score_ || (s == best_score_ && more_words)) {
      best_score_ = s;
      best_ = layout_;
      improved_ = true;
    }
  }

  /// Places the first untabooed word of the current order as the spine.
  void seed_layout() {
    std::size_t pick = order_.front();
    for (std::size_t idx : order_) {
      if (!tabu_[idx]) {
        pick = idx;
        break;
      }
    }
    const NormalizedWord& w = words_[pick].word;
    const int len = static_cast<int>(w.length());
    Placement p = len <= cfg_.width ? Placement{w, cfg_.height / 2, (cfg_.width - len) / 2, Direction::Across}
                                    : Placement{w, (cfg_.height - len) / 2, cfg_.width / 2, Direction::Down};
    layout_.place(p);
    placed_[pick] = true;
    log("seed " + w.text());
    note_best();
  }

  std::optional<Move> best_move_among(const std::vector<std::size_t>& candidates) const {
    const auto evaluate = [&](std::size_t begin, std::size_t end) {
      std::optional<Move> best;
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t idx = candidates[k];
        for (auto& p : legal_placements(layout_, words_[idx].word)) {
          const int overlaps = check_placement(layout_, p).overlaps;
          const int fw = static_cast<int>(layout_.placements().size()) + 1;
          const int ll = layout_.crossing_cells() + overlaps;
          const int filled = layout_.filled_cells() + static_cast<int>(p.word.length()) - overlaps;
          Move m{idx, std::move(p), make_score(fw, ll, filled, layout_.area(), cfg_.crossing_weight).score};
          if (!best || better(m, *best)) best = std::move(m);
        }
      }
      return best;
    };
    const std::size_t workers = std::min<std::size_t>(cfg_.workers, candidates.size());
    if (workers <= 1) return evaluate(0, candidates.size());

    std::vector<std::optional<Move>> partial(workers);
    std::vector<std::thread> pool;
    const std::size_t chunk = (candidates.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(candidates.size(), begin + chunk);
      pool.emplace_back([&, w, begin, end] { partial[w] = evaluate(begin, end); });
    }
    for (auto& t : pool) t.join();
    std::optional<Move> best;
    for (auto& m : partial) {
      if (m && (!best || better(*m, *best))) best = std::move(m);
    }
    return best;
  }

  std::optional<Move> best_move() const {
    std::vector<std::size_t> priority;
    std::vector<std::size_t> regular;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (placed_[i] || tabu_[i]) continue;
      (words_[i].priority ? priority : regular).push_back(i);
    }
    if (!priority.empty()) {
      if (auto m = best_move_among(priority)) return m;
    }
    return best_move_among(regular);
  }

  std::optional<TerminationReason> step() {
    if (auto move = best_move()) {
      layout_.place(move->placement);
      placed_[move->word_index] = true;
      const Placement& p = move->placement;
      log("place " + p.word.text() + " " + std::to_string(p.row) + " " + std::to_string(p.col) + " " +
          std::string(to_string(p.direction)));
      note_best();
      return std::nullopt;
    }
    if (std::any_of(tabu_.begin(), tabu_.end(), [](bool t) { return t; })) {
      std::fill(tabu_.begin(), tabu_.end(), false);
      return std::nullopt;
    }
    if (std::all_of(placed_.begin(), placed_.end(), [](bool p) { return p; })) {
      return TerminationReason::NoMovesRemain;
    }
    if (adjustments_ >= cfg_.max_adjustments) return TerminationReason::MaxAdjustmentsExhausted;

    ++adjustments_;
    fruitless_ = improved_ ? 0 : fruitless_ + 1;
    improved_ = false;
    if (fruitless_ > cfg_.max_resets) {
      reset();
    } else {
      remove_batch();
    }
    return std::nullopt;
  }

  void remove_batch() {
    std::vector<Placement> ranked = layout_.placements();
    std::vector<int> crossings;
    std::stable_sort(ranked.begin(), ranked.end(), [&](const Placement& a, const Placement& b) {
      const int ca = layout_.crossings_of(a);
      const int cb = layout_.crossings_of(b);
      if (ca != cb) return ca < cb;
      if (a.word.length() != b.word.length()) return a.word.length() < b.word.length();
      return a.word < b.word;
    });
    const std::size_t count = std::min<std::size_t>(cfg_.removal_batch, ranked.size());
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t idx = index_of(ranked[k].word);
      layout_.erase(ranked[k].word);
      placed_[idx] = false;
      tabu_[idx] = true;
      log("remove " + ranked[k].word.text());
    }
    if (layout_.empty()) seed_layout();
  }

  void reset() {
    layout_.clear();
    std::fill(placed_.begin(), placed_.end(), false);
    std::fill(tabu_.begin(), tabu_.end(), false);
    fruitless_ = 0;
    // Reshuffle within the priority and regular groups.
    const auto split = std::stable_partition(order_.begin(), order_.end(),
                                             [&](std::size_t i) { return words_[i].priority; });
    std::shuffle(order_.begin(), split, rng_);
    std::shuffle(split, order_.end(), rng_);
    log("reset");
    seed_layout();
  }

  std::size_t index_of(const NormalizedWord& w) const {
    const auto it = std::lower_bound(words_.begin(), words_.end(), w,
                                     [](const WordEntry& e, const NormalizedWord& x) { return e.word < x; });
    return static_cast<std::size_t>(it - words_.begin());
  }

  GenConfig cfg_;
  std::vector<WordEntry> words_;
  std::vector<std::size_t> order_;
  std::vector<bool> placed_;
  std::vector<bool> tabu_;
  Layout layout_;
  Layout best_;
  double best_score_ = -1.0;
  bool improved_ = false;
  int fruitless_ = 0;
  int adjustments_ = 0;
  int steps_ = 0;
  std::mt19937_64 rng_;
  std::vector<TraceRecord> trace_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Builds a layout from the word list. Returns the best-scoring layout seen
/// during the search. Throws Error(NoWordFits) when no word fits the grid.
inline GenResult generate(std::vector<WordEntry> words, const GenConfig& cfg) {
  if (words.empty()) throw Error(Errc::InvalidRequest, "word list is empty");
  return detail::Search(std::move(words), cfg).run();
}

inline GenResult generate(const std::vector<corpus::AnswerCluePair>& pairs, const GenConfig& cfg) {
  std::vector<WordEntry> words;
  words.reserve(pairs.size());
  for (const auto& p : pairs) words.push_back({p.answer, false});
  return generate(std::move(words), cfg);
}

// ---------------------------------------------------------------------------
// Numbering and rendering

struct Entry {
  int number = 0;
  std::string clue;
  std::string answer;
  int length = 0;
  int row = 0;
  int col = 0;
};

struct PuzzleDocument {
  int width = 0;
  int height = 0;
  std::vector<std::string> cells;
  std::vector<std::vector<int>> numbers;
  std::vector<Entry> across;
  std::vector<Entry> down;
};

/// Standard numbering: cells scanned row-major, each cell that starts an
/// across or down word takes the next number (shared when it starts both).
/// `clues` maps answers (grid form text) to clue text.
inline PuzzleDocument number_and_render(const Layout& layout, const std::map<std::string, std::string>& clues) {
  PuzzleDocument doc;
  doc.width = layout.width();
  doc.height = layout.height();
  doc.cells = layout.rows();
  doc.numbers.assign(layout.height(), std::vector<int>(layout.width(), 0));

  std::map<Cell, std::vector<const Placement*>> starts;
  for (const auto& p : layout.placements()) {
    if (!clues.contains(p.word.text())) {
      throw Error(Errc::MissingClue, "no clue for " + p.word.text(), {{"answer", p.word.text()}});
    }
    starts[{p.row, p.col}].push_back(&p);
  }
  int next = 1;
  for (const auto& [cell, placed] : starts) {
    const int number = next++;
    doc.numbers[cell.row][cell.col] = number;
    for (const Placement* p : placed) {
      Entry e{number, clues.at(p->word.text()), p->word.text(), static_cast<int>(p->word.length()), p->row, p->col};
      (p->direction == Direction::Across ? doc.across : doc.down).push_back(std::move(e));
    }
  }
  return doc;
}

inline void to_json(nlohmann::json& j, const Entry& e) {
  j = {{"num", e.number}, {"clue", e.clue}, {"answer", e.answer}, {"len", e.length}, {"row", e.row}, {"col", e.col}};
}

inline void from_json(const nlohmann::json& j, Entry& e) {
  e.number = j.at("num").get<int>();
  e.clue = j.at("clue").get<std::string>();
  e.answer = j.at("answer").get<std::string>();
  e.length = j.at("len").get<int>();
  e.row = j.value("row", 0);
  e.col = j.value("col", 0);
}

inline void to_json(nlohmann::json& j, const PuzzleDocument& d) {
  j = {{"width", d.width}, {"height", d.height}, {"cells", d.cells},
       {"numbers", d.numbers}, {"across", d.across}, {"down", d.down}};
}

inline void from_json(const nlohmann::json& j, PuzzleDocument& d) {
  d.width = j.at("width").get<int>();
  d.height = j.at("height").get<int>();
  d.cells = j.at("cells").get<std::vector<std::string>>();
  d.numbers = j.at("numbers").get<std::vector<std::vector<int>>>();
  d.across = j.at("across").get<std::vector<Entry>>();
  d.down = j.at("down").get<std::vector<Entry>>();
}

/// Canonical serialized form; equal documents give identical bytes.
inline std::string to_json_text(const PuzzleDocument& doc) { return nlohmann::json(doc).dump(2) + "\n"; }

/// Monospace rendering: a blank numbered grid, the solution, then the clues.
inline std::string render_text(const PuzzleDocument& doc) {
  std::ostringstream out;
  const auto border = [&] {
    out << '+';
    for (int c = 0; c < doc.width; ++c) out << "---";
    out << "+\n";
  };
  const auto grid = [&](bool solved) {
    border();
    for (int r = 0; r < doc.height; ++r) {
      const std::u32string row = utf8::decode(doc.cells[r]);
      out << '|';
      for (int c = 0; c < doc.width; ++c) {
        const char32_t ch = row[c];
        const int num = doc.numbers[r][c];
        if (ch == U'.') {
          out << "###";
          continue;
        }
        if (num > 0 && num < 100) {
          if (num < 10) out << ' ';
          out << num;
        } else {
          out << "  ";
        }
        if (solved) out << utf8::encode(ch);
        else out << ' ';
      }
      out << "|\n";
    }
    border();
  };
  grid(false);
  out << '\n';
  const auto clue_list = [&](std::string_view title, const std::vector<Entry>& entries) {
    out << title << '\n';
    for (const auto& e : entries) out << "  " << e.number << ". " << e.clue << " (" << e.length << ")\n";
  };
  clue_list("SOLDAN SAĞA", doc.across);
  clue_list("YUKARIDAN AŞAĞIYA", doc.down);
  out << "\nÇÖZÜM\n";
  grid(true);
  return out.str();
}

}  // namespace karekurucu::grid
