#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace exitlab {

using Player = int;  // 1 or 2
inline constexpr Player kPlayer1 = 1;
inline constexpr Player kPlayer2 = 2;

inline Player opponent(Player p) { return 3 - p; }

// Zero-sum terminal utilities, one entry per player, each in [-1, 1].
struct Outcome {
  double utility[2] = {0.0, 0.0};

  double for_player(Player p) const { return utility[p - 1]; }

  static Outcome win(Player p) {
    Outcome o;
    o.utility[p - 1] = 1.0;
    o.utility[2 - p] = -1.0;
    return o;
  }
  static Outcome draw() { return Outcome{}; }

  bool operator==(const Outcome&) const = default;
};

enum class ResultKind : std::uint8_t { kOngoing, kWin, kDraw };

struct Terminal {
  ResultKind kind = ResultKind::kOngoing;
  Player winner = 0;  // valid when kind == kWin

  bool over() const { return kind != ResultKind::kOngoing; }
  bool operator==(const Terminal&) const = default;
};

// Placement actions use from == -1; movement actions carry both cells.
struct Action {
  int from = -1;
  int to = -1;

  bool operator==(const Action&) const = default;
};

inline Action placement(int cell) { return Action{-1, cell}; }

struct GameState {
  std::vector<std::int8_t> board;  // 0 empty, 1/2 piece of that player
  Player mover = kPlayer1;
  int ply = 0;
  Terminal terminal;

  bool is_terminal() const { return terminal.over(); }
  bool operator==(const GameState&) const = default;
};

// Two-player, deterministic, perfect-information, zero-sum game.
// States are immutable values; apply returns the successor.
class Game {
 public:
  virtual ~Game() = default;

  virtual const std::string& name() const = 0;
  virtual int rows() const = 0;
  virtual int cols() const = 0;
  int cell_count() const { return rows() * cols(); }

  // Reaching this many plies without a result is a draw.
  virtual int ply_cap() const = 0;

  virtual GameState initial_state() const = 0;

  // Deterministic order (row-major cell scan); empty iff s is terminal.
  virtual std::vector<Action> legal_actions(const GameState& s) const = 0;

  virtual bool is_legal(const GameState& s, const Action& a) const = 0;

  // Successor state; throws std::invalid_argument on illegal actions.
  virtual GameState apply(const GameState& s, const Action& a) const = 0;

  // Throws std::invalid_argument when s is not terminal.
  Outcome utilities(const GameState& s) const;

  // Rebuilds the terminal status of a board reached through legal play.
  virtual Terminal recompute_status(const GameState& s) const = 0;

  // Local-pattern geometry for the feature module: absolute (dr,dc) offsets
  // around an action's destination cell, mirrored appropriately per player.
  virtual std::vector<std::pair<int, int>> pattern_offsets(Player p) const = 0;

  // Movement games additionally describe the possible origin directions
  // (destination -> origin), again as absolute offsets per player.
  virtual std::vector<std::pair<int, int>> origin_offsets(Player) const {
    return {};
  }

  // Colour-swap transform: swaps piece colours and the mover and remaps the
  // board so that player 2 faces the position player 1 faced.
  virtual GameState mirror_state(const GameState& s) const = 0;
  virtual Action mirror_action(const Action& a) const = 0;

 protected:
  int index(int r, int c) const { return r * cols() + c; }
  bool in_bounds(int r, int c) const {
    return r >= 0 && r < rows() && c >= 0 && c < cols();
  }
};

// One-line text form: "<game> <board> <mover> <ply>" with '.', 'x', 'o' cells.
std::string serialize_state(const Game& game, const GameState& s);
GameState deserialize_state(const Game& game, const std::string& line);

}  // namespace exitlab
