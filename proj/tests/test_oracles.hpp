// Independent oracles used by the test suites. These deliberately avoid the
// library's own code paths wherever they act as a cross-check.
#pragma once

#include <string>
#include <vector>

#include "exitlab/features.hpp"
#include "exitlab/game.hpp"
#include "exitlab/rng.hpp"

namespace oracle {

// --- standalone tic-tac-toe on bitmasks (independent of game-core) --------

// true when the 9-bit mask contains a completed line
bool ttt_line(unsigned mask);

// Negamax value from the mover's perspective (+1 win, 0 draw, -1 loss),
// memoized over (x_mask, o_mask, x_to_move).
int ttt_minimax(unsigned x_mask, unsigned o_mask, bool x_to_move);

// Masks for a game-core state (player 1 = x).
void ttt_masks(const exitlab::GameState& s, unsigned& x_mask, unsigned& o_mask);

// Value of the state from its mover's perspective via the standalone solver.
int ttt_value(const exitlab::GameState& s);

// Mover-perspective value of each legal action (row-major cell order).
std::vector<int> ttt_move_values(const exitlab::GameState& s);

// --- naive pattern matcher -------------------------------------------------

// Evaluates every pattern of fs directly against the board; returns the
// active indices in increasing order.
std::vector<int> naive_active_patterns(const exitlab::Game& game,
                                       const exitlab::GameState& s,
                                       const exitlab::Action& a,
                                       const exitlab::FeatureSet& fs);

// --- independent breakthrough result check ---------------------------------

// 0 = no result, else the winning player; checks back ranks and pawn counts
// on the raw board only.
int breakthrough_winner(const std::vector<std::int8_t>& board, int size);

// --- helpers ---------------------------------------------------------------

// Uniform-random playout from the initial state; returns every state visited
// (including the terminal one).
std::vector<exitlab::GameState> random_playthrough(const exitlab::Game& game,
                                                   exitlab::Rng& rng);

}  // namespace oracle
