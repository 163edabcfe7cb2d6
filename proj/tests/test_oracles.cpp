#include "test_oracles.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace oracle {

using exitlab::Action;
using exitlab::Game;
using exitlab::GameState;
using exitlab::Rng;

bool ttt_line(unsigned mask) {
  static const unsigned kLines[8] = {0007, 0070, 0700, 0111,
                                     0222, 0444, 0421, 0124};
  for (unsigned line : kLines) {
    if ((mask & line) == line) return true;
  }
  return false;
}

namespace {

// value + 2 stored per (x, o, mover); 0 = unknown
std::array<signed char, 512 * 512 * 2> g_memo{};

}  // namespace

int ttt_minimax(unsigned x_mask, unsigned o_mask, bool x_to_move) {
  unsigned other = x_to_move ? o_mask : x_mask;
  if (ttt_line(other)) return -1;  // previous move won
  unsigned occupied = x_mask | o_mask;
  if (occupied == 0x1FF) return 0;
  std::size_t key =
      (static_cast<std::size_t>(x_mask) << 10) | (o_mask << 1) | x_to_move;
  if (g_memo[key] != 0) return g_memo[key] - 2;
  int best = -2;
  for (unsigned cell = 0; cell < 9; ++cell) {
    unsigned bit = 1u << cell;
    if (occupied & bit) continue;
    int child = -ttt_minimax(x_to_move ? x_mask | bit : x_mask,
                             x_to_move ? o_mask : o_mask | bit, !x_to_move);
    best = std::max(best, child);
  }
  g_memo[key] = static_cast<signed char>(best + 2);
  return best;
}

void ttt_masks(const GameState& s, unsigned& x_mask, unsigned& o_mask) {
  x_mask = o_mask = 0;
  for (unsigned cell = 0; cell < 9; ++cell) {
    if (s.board[cell] == 1) x_mask |= 1u << cell;
    if (s.board[cell] == 2) o_mask |= 1u << cell;
  }
}

int ttt_value(const GameState& s) {
  unsigned x, o;
  ttt_masks(s, x, o);
  return ttt_minimax(x, o, s.mover == exitlab::kPlayer1);
}

std::vector<int> ttt_move_values(const GameState& s) {
  unsigned x, o;
  ttt_masks(s, x, o);
  bool x_to_move = s.mover == exitlab::kPlayer1;
  std::vector<int> values;
  for (unsigned cell = 0; cell < 9; ++cell) {
    unsigned bit = 1u << cell;
    if ((x | o) & bit) continue;
    values.push_back(-ttt_minimax(x_to_move ? x | bit : x,
                                  x_to_move ? o : o | bit, !x_to_move));
  }
  return values;
}

std::vector<int> naive_active_patterns(const Game& game, const GameState& s,
                                       const Action& a,
                                       const exitlab::FeatureSet& fs) {
  std::vector<int> active;
  const int rows = game.rows(), cols = game.cols();
  const int tr = a.to / cols, tc = a.to % cols;
  const auto& patterns = fs.patterns();
  for (int i = 0; i < fs.dimension(); ++i) {
    const exitlab::Pattern& p = patterns[i];
    bool match = false;
    switch (p.kind) {
      case exitlab::Pattern::Kind::kBias:
        match = true;
        break;
      case exitlab::Pattern::Kind::kCell: {
        int r = tr + p.dr, c = tc + p.dc;
        exitlab::CellTest observed;
        if (r < 0 || r >= rows || c < 0 || c >= cols) {
          observed = exitlab::CellTest::kOffBoard;
        } else {
          std::int8_t v = s.board[r * cols + c];
          observed = v == 0 ? exitlab::CellTest::kEmpty
                            : (v == s.mover ? exitlab::CellTest::kFriend
                                            : exitlab::CellTest::kEnemy);
        }
        match = observed == p.test;
        break;
      }
      case exitlab::Pattern::Kind::kOrigin: {
        if (a.from < 0) break;
        int fr = a.from / cols, fc = a.from % cols;
        match = fr - tr == p.dr && fc - tc == p.dc;
        break;
      }
    }
    if (match) active.push_back(i);
  }
  return active;
}

int breakthrough_winner(const std::vector<std::int8_t>& board, int size) {
  int pawns[2] = {0, 0};
  for (int cell = 0; cell < size * size; ++cell) {
    if (board[cell] == 1) ++pawns[0];
    if (board[cell] == 2) ++pawns[1];
  }
  for (int c = 0; c < size; ++c) {
    if (board[(size - 1) * size + c] == 1) return 1;
    if (board[c] == 2) return 2;
  }
  if (pawns[0] == 0) return 2;
  if (pawns[1] == 0) return 1;
  return 0;
}

std::vector<GameState> random_playthrough(const Game& game, Rng& rng) {
  std::vector<GameState> states;
  GameState s = game.initial_state();
  states.push_back(s);
  while (!s.is_terminal()) {
    auto legal = game.legal_actions(s);
    s = game.apply(s, legal[exitlab::rand_index(
                       rng, static_cast<int>(legal.size()))]);
    states.push_back(s);
  }
  return states;
}

}  // namespace oracle
