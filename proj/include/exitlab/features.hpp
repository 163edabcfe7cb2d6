#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "exitlab/game.hpp"

namespace exitlab {

enum class CellTest : std::uint8_t {
  kEmpty = 0,
  kFriend = 1,
  kEnemy = 2,
  kOffBoard = 3
};

// One binary local pattern, evaluated relative to an action's destination
// cell from the mover's point of view.
struct Pattern {
  enum class Kind : std::uint8_t { kBias, kCell, kOrigin };

  Kind kind = Kind::kBias;
  int dr = 0, dc = 0;                  // absolute offset (kCell / kOrigin)
  CellTest test = CellTest::kEmpty;    // kCell only

  bool operator==(const Pattern&) const = default;
};

std::string pattern_to_string(const Pattern& p);
Pattern pattern_from_string(const std::string& text);

// Fixed per-player pattern list with dense indices 0..dimension-1.
// Index 0 is always the bias feature.
class FeatureSet {
 public:
  // Atomic vocabulary: bias, then {empty,friend,enemy,off-board} for each of
  // the game's adjacency offsets, then (movement games) one pattern per
  // possible origin direction.
  static FeatureSet atomic(const Game& game, Player player);

  // Arbitrary pattern list (bias must be first).
  static FeatureSet custom(Player player, std::vector<Pattern> patterns);

  int dimension() const { return static_cast<int>(patterns_.size()); }
  Player player() const { return player_; }
  const std::vector<Pattern>& patterns() const { return patterns_; }
  bool is_atomic() const { return atomic_; }
  int offset_count() const { return offset_count_; }
  int origin_count() const { return origin_count_; }

  // One pattern per line; parse() inverts describe().
  std::string describe() const;
  static FeatureSet parse(Player player, const std::vector<std::string>& lines);

  bool operator==(const FeatureSet&) const = default;

 private:
  Player player_ = kPlayer1;
  std::vector<Pattern> patterns_;
  bool atomic_ = false;
  int offset_count_ = 0;
  int origin_count_ = 0;
};

// Sorted active pattern indices of one (state, action) pair.
struct FeatureVector {
  std::vector<int> active;
  int dimension = 0;

  bool operator==(const FeatureVector&) const = default;
};

namespace detail {

inline CellTest cell_test_at(const Game& game, const GameState& s, int r,
                             int c) {
  if (r < 0 || r >= game.rows() || c < 0 || c >= game.cols()) {
    return CellTest::kOffBoard;
  }
  std::int8_t v = s.board[r * game.cols() + c];
  if (v == 0) return CellTest::kEmpty;
  return v == s.mover ? CellTest::kFriend : CellTest::kEnemy;
}

}  // namespace detail

// Calls f(index) for every active pattern index, in increasing index order.
// The atomic layout is walked directly (each offset activates exactly one of
// its four tests); custom sets fall back to testing every pattern.
template <typename F>
void for_each_active(const Game& game, const GameState& s, const Action& a,
                     const FeatureSet& fs, F&& f) {
  const int r0 = a.to / game.cols(), c0 = a.to % game.cols();
  if (fs.is_atomic()) {
    f(0);
    const auto& patterns = fs.patterns();
    for (int k = 0; k < fs.offset_count(); ++k) {
      const Pattern& p = patterns[1 + 4 * k];
      CellTest t = detail::cell_test_at(game, s, r0 + p.dr, c0 + p.dc);
      f(1 + 4 * k + static_cast<int>(t));
    }
    if (fs.origin_count() > 0 && a.from >= 0) {
      int dr = a.from / game.cols() - r0, dc = a.from % game.cols() - c0;
      int base = 1 + 4 * fs.offset_count();
      for (int d = 0; d < fs.origin_count(); ++d) {
        const Pattern& p = patterns[base + d];
        if (p.dr == dr && p.dc == dc) {
          f(base + d);
          break;
        }
      }
    }
    return;
  }
  const auto& patterns = fs.patterns();
  for (int i = 0; i < fs.dimension(); ++i) {
    const Pattern& p = patterns[i];
    switch (p.kind) {
      case Pattern::Kind::kBias:
        f(i);
        break;
      case Pattern::Kind::kCell:
        if (detail::cell_test_at(game, s, r0 + p.dr, c0 + p.dc) == p.test) {
          f(i);
        }
        break;
      case Pattern::Kind::kOrigin:
        if (a.from >= 0 && a.from / game.cols() - r0 == p.dr &&
            a.from % game.cols() - c0 == p.dc) {
          f(i);
        }
        break;
    }
  }
}

// Sparse binary feature vector of (s, a); fs must belong to s.mover.
// Throws std::invalid_argument when a is illegal in s.
FeatureVector featurize(const Game& game, const GameState& s, const Action& a,
                        const FeatureSet& fs);

}  // namespace exitlab
