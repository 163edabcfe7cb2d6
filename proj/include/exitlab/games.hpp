#pragma once

#include <memory>
#include <string>
#include <vector>

#include "exitlab/game.hpp"

namespace exitlab {

// Shared behaviour of the built-in games: rectangular board, alternating
// movers, placement moves by default, ply-cap draw.
class BoardGame : public Game {
 public:
  BoardGame(std::string name, int rows, int cols, int ply_cap);

  const std::string& name() const override { return name_; }
  int rows() const override { return rows_; }
  int cols() const override { return cols_; }
  int ply_cap() const override { return ply_cap_; }

  GameState initial_state() const override;
  std::vector<Action> legal_actions(const GameState& s) const override;
  bool is_legal(const GameState& s, const Action& a) const override;
  GameState apply(const GameState& s, const Action& a) const override;
  Terminal recompute_status(const GameState& s) const override;

  std::vector<std::pair<int, int>> pattern_offsets(Player p) const override;
  GameState mirror_state(const GameState& s) const override;
  Action mirror_action(const Action& a) const override;

 protected:
  using Board = std::vector<std::int8_t>;

  // Populates the starting board (empty by default).
  virtual void setup_board(Board&) const {}

  // Move generation in row-major scan order; placements by default.
  virtual void gen_moves(const Board& board, Player mover,
                         std::vector<Action>& out) const;
  virtual bool any_move(const Board& board, Player mover) const;

  // Applies the move's board edit; mover/ply/status handled by apply.
  virtual void edit_board(Board& board, const Action& a, Player mover) const;

  // Win produced by the given player's move ending at a.to, if any.
  virtual Terminal move_result(const Board& board, const Action& a,
                               Player mover) const = 0;

  // Full-board scan equivalent of move_result, used when rebuilding states.
  virtual Terminal scan_result(const Board& board) const = 0;

  // Result when the player to move has no legal action (and no win occurred).
  virtual Terminal no_move_result(Player mover) const;

  // Per-player offset mirror for pattern geometry (identity by default).
  virtual std::pair<int, int> mirror_offset(std::pair<int, int> off) const {
    return off;
  }

  // Cell remap used by mirror_state (identity by default).
  virtual int mirror_cell(int cell) const { return cell; }

  std::string name_;
  int rows_, cols_, ply_cap_;
};

class TicTacToe final : public BoardGame {
 public:
  explicit TicTacToe(int ply_cap = -1);

 protected:
  Terminal move_result(const Board& board, const Action& a,
                       Player mover) const override;
  Terminal scan_result(const Board& board) const override;
};

class Hex final : public BoardGame {
 public:
  explicit Hex(int size, int ply_cap = -1);
  std::vector<std::pair<int, int>> pattern_offsets(Player p) const override;

 protected:
  Terminal move_result(const Board& board, const Action& a,
                       Player mover) const override;
  Terminal scan_result(const Board& board) const override;
  std::pair<int, int> mirror_offset(std::pair<int, int> off) const override;
  int mirror_cell(int cell) const override;

 private:
  // Player 1 connects row 0 to row size-1, player 2 column 0 to column size-1.
  bool connected(const Board& board, Player p) const;
};

class Gomoku final : public BoardGame {
 public:
  explicit Gomoku(int size = 9, int run = 5, int ply_cap = -1);

 protected:
  Terminal move_result(const Board& board, const Action& a,
                       Player mover) const override;
  Terminal scan_result(const Board& board) const override;

 private:
  int run_;
};

class Breakthrough final : public BoardGame {
 public:
  explicit Breakthrough(int size = 6, int ply_cap = -1);
  bool is_legal(const GameState& s, const Action& a) const override;
  std::vector<std::pair<int, int>> origin_offsets(Player p) const override;

 protected:
  void setup_board(Board&) const override;
  void gen_moves(const Board& board, Player mover,
                 std::vector<Action>& out) const override;
  bool any_move(const Board& board, Player mover) const override;
  void edit_board(Board& board, const Action& a, Player mover) const override;
  Terminal move_result(const Board& board, const Action& a,
                       Player mover) const override;
  Terminal scan_result(const Board& board) const override;
  // A player with no mobile pawn loses.
  Terminal no_move_result(Player mover) const override;
  std::pair<int, int> mirror_offset(std::pair<int, int> off) const override;
  int mirror_cell(int cell) const override;

 private:
  int forward(Player p) const { return p == kPlayer1 ? 1 : -1; }
  int last_rank(Player p) const { return p == kPlayer1 ? rows_ - 1 : 0; }
};

// Built-in games: tictactoe, hex5, hex7, gomoku9, breakthrough6.
std::shared_ptr<const Game> make_game(const std::string& name);
std::vector<std::string> game_names();

}  // namespace exitlab
